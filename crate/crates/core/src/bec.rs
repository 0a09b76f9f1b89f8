//! Impurity qubit in a homogeneous atomic condensate.
//!
//! Bogoliubov phonons of the condensate play the role of the reservoir
//! modes. All quantities are SI with ħ written out explicitly; frequencies
//! are angular (rad/s). Internally the kinetic energy `ε_k = ħk²/2m_B` and
//! the mean-field rate `ν = n g_B / ħ` are both carried as rad/s, so the
//! dispersion reads `ω_k = sqrt(ε_k (ε_k + 2ν))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{as_object, check_keys, get_f64, get_str, KeySpec};
use crate::constants::{
    species_mass_kg, ATOMIC_MASS_UNIT, A_RB, DILUTENESS_BOUND, HBAR, MASS_NA23_U, MASS_RB87_U,
};
use crate::error::{Error, Result};
use crate::quadrature::OscillatoryKernel;
use crate::reservoir::{DiscreteMode, DiscreteReservoir};
use crate::special;

/// Upper cutoff of the radial integrals in units of `1/ℓ_A`.
pub const K_MAX_TRAP_UNITS: f64 = 12.0;

/// Below `K_MIN_TRAP_UNITS / ℓ_A` kernels are evaluated from their leading small-k form.
pub const K_MIN_TRAP_UNITS: f64 = 1e-4;

/// Raw physical parameters, as read from a model config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BecParameters {
    /// Condensate density, m⁻³.
    pub density_m3: f64,
    /// Impurity mass, kg.
    pub mass_a_kg: f64,
    /// Condensate atom mass, kg.
    pub mass_b_kg: f64,
    /// Trap length of the impurity ground state, m.
    pub ell_a_m: f64,
    pub a0_m: f64,
    pub a1_m: f64,
    /// Boson-boson scattering length, m.
    pub ab_m: f64,
    /// Bare qubit splitting, rad/s.
    pub omega_a_rad_s: f64,
}

impl BecParameters {
    /// ^23Na impurity in a ^87Rb condensate, n = 1e20 m⁻³, ℓ_A = 45 nm,
    /// a1 − a0 = 2.9 nm with a0 = 0 (so χ = 1), a_B = a_Rb.
    pub fn na_in_rb() -> Self {
        Self {
            density_m3: 1e20,
            mass_a_kg: MASS_NA23_U * ATOMIC_MASS_UNIT,
            mass_b_kg: MASS_RB87_U * ATOMIC_MASS_UNIT,
            ell_a_m: 45e-9,
            a0_m: 0.0,
            a1_m: 2.9e-9,
            ab_m: A_RB,
            omega_a_rad_s: 0.0,
        }
    }

    const KEYS: [KeySpec; 10] = [
        KeySpec::new("density", "m3"),
        KeySpec::new("mass_A", "kg"),
        KeySpec::new("species_A", ""),
        KeySpec::new("mass_B", "kg"),
        KeySpec::new("species_B", ""),
        KeySpec::new("ell_A", "m"),
        KeySpec::new("a0", "m"),
        KeySpec::new("a1", "m"),
        KeySpec::new("aB", "m"),
        KeySpec::new("OmegaA", "rad_s"),
    ];

    /// Parse a model object. Masses default to ^23Na / ^87Rb and `OmegaA_rad_s` to 0.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = as_object(value, "model")?;
        Self::from_map(obj)
    }

    pub fn from_map(obj: &Map<String, Value>) -> Result<Self> {
        check_keys(obj, &Self::KEYS, "model")?;
        let required = |key: &'static str| -> Result<f64> {
            get_f64(obj, key)?.ok_or(Error::MissingParameter(key))
        };
        let mass = |kg_key: &'static str, species_key: &'static str, default_u: f64| -> Result<f64> {
            match (get_f64(obj, kg_key)?, get_str(obj, species_key)?) {
                (Some(_), Some(_)) => Err(Error::invalid(
                    kg_key,
                    format!("give either `{kg_key}` or `{species_key}`, not both"),
                )),
                (Some(m), None) => Ok(m),
                (None, Some(label)) => species_mass_kg(label).ok_or_else(|| {
                    Error::invalid(kg_key, format!("unknown species `{label}`"))
                }),
                (None, None) => Ok(default_u * ATOMIC_MASS_UNIT),
            }
        };
        Ok(Self {
            density_m3: required("density_m3")?,
            mass_a_kg: mass("mass_A_kg", "species_A", MASS_NA23_U)?,
            mass_b_kg: mass("mass_B_kg", "species_B", MASS_RB87_U)?,
            ell_a_m: required("ell_A_m")?,
            a0_m: required("a0_m")?,
            a1_m: required("a1_m")?,
            ab_m: required("aB_m")?,
            omega_a_rad_s: get_f64(obj, "OmegaA_rad_s")?.unwrap_or(0.0),
        })
    }

    /// Serialise with the config key names.
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "density_m3": self.density_m3,
            "mass_A_kg": self.mass_a_kg,
            "mass_B_kg": self.mass_b_kg,
            "ell_A_m": self.ell_a_m,
            "a0_m": self.a0_m,
            "a1_m": self.a1_m,
            "aB_m": self.ab_m,
            "OmegaA_rad_s": self.omega_a_rad_s,
        })
    }

    /// Gas parameter `sqrt(n a_B³)`.
    pub fn gas_parameter(&self) -> f64 {
        (self.density_m3 * self.ab_m.powi(3)).sqrt()
    }
}

/// Quantities derived once from [`BecParameters`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedBecQuantities {
    /// Contact strength `4πħ² a_B / m_B`, J m³.
    pub g_b: f64,
    /// `2πħ² a_0 / m_AB`, J m³.
    pub g0: f64,
    pub g1: f64,
    /// Kernel prefactor `2n (g1 − g0)² / (π² ħ²)`, m³ s⁻².
    pub p: f64,
    /// Relative displacement `(a1 + a0)/(a1 − a0)`.
    pub chi: f64,
    /// Mean-field shift `n (g1 − g0) / ħ`, rad/s.
    pub delta: f64,
    /// `Ω_A + Δ`, rad/s.
    pub omega0: f64,
    /// Mean-field rate `n g_B / ħ`, rad/s.
    pub nu: f64,
    /// Reduced mass, kg.
    pub m_ab: f64,
}

/// A validated condensate reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BecReservoirModel {
    params: BecParameters,
    derived: DerivedBecQuantities,
}

/// Validate parameters and compute the derived quantities.
pub fn build_bec_model(params: &BecParameters) -> Result<BecReservoirModel> {
    BecReservoirModel::new(*params)
}

fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

impl BecReservoirModel {
    pub fn new(params: BecParameters) -> Result<Self> {
        require_positive("density_m3", params.density_m3)?;
        require_positive("mass_A_kg", params.mass_a_kg)?;
        require_positive("mass_B_kg", params.mass_b_kg)?;
        require_positive("ell_A_m", params.ell_a_m)?;
        require_positive("aB_m", params.ab_m)?;
        for (name, v) in [
            ("a0_m", params.a0_m),
            ("a1_m", params.a1_m),
            ("OmegaA_rad_s", params.omega_a_rad_s),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if params.a1_m == params.a0_m {
            return Err(Error::ProbeDecoupled);
        }
        let gas = params.gas_parameter();
        if gas >= DILUTENESS_BOUND {
            return Err(Error::Diluteness {
                value: gas,
                bound: DILUTENESS_BOUND,
                a_b: params.ab_m,
            });
        }
        Ok(Self::derive(params))
    }

    /// Derived quantities without the diluteness check; used for derivative stencils.
    pub(crate) fn derive(params: BecParameters) -> Self {
        let hbar2 = HBAR * HBAR;
        let m_ab = params.mass_a_kg * params.mass_b_kg / (params.mass_a_kg + params.mass_b_kg);
        let g_b = 4.0 * PI * hbar2 * params.ab_m / params.mass_b_kg;
        let g0 = 2.0 * PI * hbar2 * params.a0_m / m_ab;
        let g1 = 2.0 * PI * hbar2 * params.a1_m / m_ab;
        let dg = g1 - g0;
        let p = 2.0 * params.density_m3 * dg * dg / (PI * PI * hbar2);
        let chi = (params.a1_m + params.a0_m) / (params.a1_m - params.a0_m);
        let delta = params.density_m3 * dg / HBAR;
        let nu = params.density_m3 * g_b / HBAR;
        Self {
            params,
            derived: DerivedBecQuantities {
                g_b,
                g0,
                g1,
                p,
                chi,
                delta,
                omega0: params.omega_a_rad_s + delta,
                nu,
                m_ab,
            },
        }
    }

    /// Na-23 impurity in a Rb-87 condensate at the reference parameter set.
    pub fn reference() -> Self {
        Self::new(BecParameters::na_in_rb()).expect("reference parameters are valid")
    }

    pub fn params(&self) -> &BecParameters {
        &self.params
    }

    pub fn derived(&self) -> &DerivedBecQuantities {
        &self.derived
    }

    pub fn chi(&self) -> f64 {
        self.derived.chi
    }

    pub fn ab(&self) -> f64 {
        self.params.ab_m
    }

    pub fn ell(&self) -> f64 {
        self.params.ell_a_m
    }

    /// Same model with a different boson-boson scattering length (validated).
    pub fn with_scattering_length(&self, ab_m: f64) -> Result<Self> {
        Self::new(BecParameters { ab_m, ..self.params })
    }

    pub(crate) fn with_scattering_length_unchecked(&self, ab_m: f64) -> Self {
        Self::derive(BecParameters { ab_m, ..self.params })
    }

    /// Rebalance `a0`, `a1` to the requested χ at fixed `a1 − a0`.
    pub fn with_chi(&self, chi: f64) -> Result<Self> {
        if !chi.is_finite() {
            return Err(Error::invalid("chi", "must be finite"));
        }
        let diff = self.params.a1_m - self.params.a0_m;
        let sum = chi * diff;
        Self::new(BecParameters {
            a0_m: 0.5 * (sum - diff),
            a1_m: 0.5 * (sum + diff),
            ..self.params
        })
    }

    pub fn k_max(&self) -> f64 {
        K_MAX_TRAP_UNITS / self.params.ell_a_m
    }

    pub fn k_min(&self) -> f64 {
        K_MIN_TRAP_UNITS / self.params.ell_a_m
    }

    /// Kinetic energy `ħk²/2m_B` as an angular frequency.
    pub fn kinetic(&self, k: f64) -> f64 {
        HBAR * k * k / (2.0 * self.params.mass_b_kg)
    }

    /// Bogoliubov excitation frequency `ω_k`, rad/s.
    pub fn dispersion(&self, k: f64) -> f64 {
        let eps = self.kinetic(k);
        (eps * (eps + 2.0 * self.derived.nu)).sqrt()
    }

    /// Group velocity `dω/dk`, finite at `k = 0` where it equals the sound speed.
    pub fn group_velocity(&self, k: f64) -> f64 {
        let eps = self.kinetic(k);
        let nu = self.derived.nu;
        (eps + nu) * (2.0 * HBAR / self.params.mass_b_kg).sqrt() / (eps + 2.0 * nu).sqrt()
    }

    /// `ε_k / ω_k = sqrt(ε/(ε + 2ν))`.
    fn energy_ratio(&self, eps: f64) -> f64 {
        (eps / (eps + 2.0 * self.derived.nu)).sqrt()
    }

    /// `(∂ω_k/∂a_B)/ω_k = ν / (a_B (ε + 2ν))`.
    fn log_sensitivity(&self, eps: f64) -> f64 {
        let nu = self.derived.nu;
        nu / (self.params.ab_m * (eps + 2.0 * nu))
    }

    /// `∂ω_k/∂a_B = n ε_k g_B / (a_B ħ ω_k)` in rad/(s m).
    pub fn dispersion_derivative_ab(&self, k: f64) -> f64 {
        self.dispersion(k) * self.log_sensitivity(self.kinetic(k))
    }

    fn envelope(&self, k: f64) -> f64 {
        let x = k * self.params.ell_a_m;
        (-0.5 * x * x).exp()
    }

    /// `k² ε_k / ω_k³`, finite at `k = 0`.
    fn stationary_density(&self, k: f64) -> f64 {
        let eps = self.kinetic(k);
        let root = (2.0 * self.params.mass_b_kg / HBAR).sqrt();
        k * root / (eps + 2.0 * self.derived.nu).powf(1.5)
    }

    /// Upper bound on `∫_{k0}^∞ k² e^{−k²ℓ²/2} dk`.
    fn gaussian_tail(&self, k0: f64) -> f64 {
        let ell = self.params.ell_a_m;
        let full = (PI / 2.0).sqrt() / ell.powi(3);
        if k0 <= 0.0 {
            return full;
        }
        let z = k0 * ell / 2f64.sqrt();
        let erfc_bound = ((-z * z).exp() / (z * PI.sqrt())).min(1.0);
        (k0 * self.envelope(k0) / (ell * ell) + full * erfc_bound).min(full)
    }

    /// The decay and phase kernels of the continuum encoding factors.
    pub fn continuum_kernels(&self) -> (DecayKernel<'_>, PhaseKernel<'_>) {
        (DecayKernel { model: self }, PhaseKernel { model: self })
    }

    /// Integrand of the stationary decay factor, `P k² ε e^{−k²ℓ²/2} / ω³`.
    pub fn stationary_integrand(&self, k: f64) -> f64 {
        self.derived.p * self.stationary_density(k) * self.envelope(k)
    }

    /// `∂/∂a_B` of [`Self::stationary_integrand`].
    pub fn stationary_integrand_dab(&self, k: f64) -> f64 {
        let eps = self.kinetic(k);
        -3.0 * self.derived.p * self.stationary_density(k) * self.log_sensitivity(eps) * self.envelope(k)
    }

    /// Integrand of the linear-in-t phase coefficient, `k² ε e^{−k²ℓ²/2} / ω²`.
    pub fn secular_integrand(&self, k: f64) -> f64 {
        let eps = self.kinetic(k);
        k * k * self.envelope(k) / (eps + 2.0 * self.derived.nu)
    }

    /// `∂/∂a_B` of [`Self::secular_integrand`].
    pub fn secular_integrand_dab(&self, k: f64) -> f64 {
        let eps = self.kinetic(k);
        -2.0 * k * k * self.envelope(k) * self.log_sensitivity(eps) / (eps + 2.0 * self.derived.nu)
    }

    /// Radial discretisation into `shells` effective modes of width `k_cut/shells`.
    ///
    /// Each shell lumps the degenerate plane waves of one |k|, so its
    /// `|g|²` is the continuum density times the shell volume factor
    /// `k² Δk / 2π²`; Γ and Φ are additive in these weights. The result is
    /// in rad/s (ħ = 1 after dividing couplings by ħ).
    pub fn discretize(&self, shells: usize, k_cut: f64) -> Result<DiscreteReservoir> {
        if shells == 0 {
            return Err(Error::invalid("shells", "need at least one shell"));
        }
        let dk = k_cut / shells as f64;
        let prefactor = self.params.density_m3 * (self.derived.g1 - self.derived.g0).powi(2)
            / (HBAR * HBAR);
        let modes = (0..shells)
            .map(|j| {
                let k = (j as f64 + 0.5) * dk;
                let eps = self.kinetic(k);
                let weight = k * k * dk / (2.0 * PI * PI);
                let g2 = prefactor * self.energy_ratio(eps) * self.envelope(k) * weight;
                let g = g2.sqrt();
                DiscreteMode::real(self.dispersion(k), g, self.derived.chi * g)
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteReservoir::zero_temperature(modes)
    }
}

/// `K_Γ(k, t) = P k² ε (1 − cos ωt) e^{−k²ℓ²/2} / ω³`.
#[derive(Debug, Clone, Copy)]
pub struct DecayKernel<'a> {
    model: &'a BecReservoirModel,
}

/// `K_Φ(k, t) = χ P k² ε (sin ωt − ωt) e^{−k²ℓ²/2} / ω³`.
#[derive(Debug, Clone, Copy)]
pub struct PhaseKernel<'a> {
    model: &'a BecReservoirModel,
}

/// `∂K_Γ/∂a_B`.
#[derive(Debug, Clone, Copy)]
pub struct DecayKernelDerivative<'a> {
    model: &'a BecReservoirModel,
}

/// `∂K_Φ/∂a_B`.
#[derive(Debug, Clone, Copy)]
pub struct PhaseKernelDerivative<'a> {
    model: &'a BecReservoirModel,
}

impl BecReservoirModel {
    pub fn decay_kernel_derivative(&self) -> DecayKernelDerivative<'_> {
        DecayKernelDerivative { model: self }
    }

    pub fn phase_kernel_derivative(&self) -> PhaseKernelDerivative<'_> {
        PhaseKernelDerivative { model: self }
    }

    /// Common factor `P k² e^{−k²ℓ²/2} (ε/ω) t²` and the phase `ωt`.
    ///
    /// Below `k_min` the leading small-k forms `ε/ω ≈ sqrt(ε/2ν)` and
    /// `ω ≈ c k` are used.
    fn kernel_base(&self, k: f64, t: f64) -> (f64, f64, f64) {
        let eps = self.kinetic(k);
        let (ratio, omega) = if k < self.k_min() {
            let nu = self.derived.nu;
            ((eps / (2.0 * nu)).sqrt(), k * self.group_velocity(0.0))
        } else {
            (self.energy_ratio(eps), self.dispersion(k))
        };
        let base = self.derived.p * k * k * self.envelope(k) * ratio * t * t;
        (base, omega * t, eps)
    }

    fn tail_scales(&self, k0: f64) -> (f64, f64, f64) {
        let omega = self.dispersion(k0).max(f64::MIN_POSITIVE);
        let s0 = self.log_sensitivity(self.kinetic(k0));
        (self.derived.p * self.gaussian_tail(k0), omega, s0)
    }
}

impl OscillatoryKernel for DecayKernel<'_> {
    fn eval(&self, k: f64, t: f64) -> f64 {
        let (base, x, _) = self.model.kernel_base(k, t);
        base * special::one_minus_cos_sq(x)
    }

    fn phase_rate(&self, k: f64) -> f64 {
        self.model.group_velocity(k)
    }

    fn tail_bound(&self, k0: f64, t: f64) -> Option<f64> {
        let (scale, omega, _) = self.model.tail_scales(k0);
        Some(scale * (0.5 * t * t).min(2.0 / (omega * omega)))
    }
}

impl OscillatoryKernel for PhaseKernel<'_> {
    fn eval(&self, k: f64, t: f64) -> f64 {
        let (base, x, _) = self.model.kernel_base(k, t);
        self.model.derived.chi * base * special::sin_minus_x_sq(x)
    }

    fn phase_rate(&self, k: f64) -> f64 {
        self.model.group_velocity(k)
    }

    fn tail_bound(&self, k0: f64, t: f64) -> Option<f64> {
        let (scale, omega, _) = self.model.tail_scales(k0);
        Some(self.model.derived.chi.abs() * scale * (t / omega + 1.0 / (omega * omega)))
    }
}

impl OscillatoryKernel for DecayKernelDerivative<'_> {
    fn eval(&self, k: f64, t: f64) -> f64 {
        let (base, x, eps) = self.model.kernel_base(k, t);
        base * self.model.log_sensitivity(eps) * special::decay_derivative_factor(x)
    }

    fn phase_rate(&self, k: f64) -> f64 {
        self.model.group_velocity(k)
    }

    fn tail_bound(&self, k0: f64, t: f64) -> Option<f64> {
        let (scale, omega, s0) = self.model.tail_scales(k0);
        Some(scale * s0 * (t / omega + 6.0 / (omega * omega)))
    }
}

impl OscillatoryKernel for PhaseKernelDerivative<'_> {
    fn eval(&self, k: f64, t: f64) -> f64 {
        let (base, x, eps) = self.model.kernel_base(k, t);
        self.model.derived.chi * base * self.model.log_sensitivity(eps) * special::phase_derivative_factor(x)
    }

    fn phase_rate(&self, k: f64) -> f64 {
        self.model.group_velocity(k)
    }

    fn tail_bound(&self, k0: f64, t: f64) -> Option<f64> {
        let (scale, omega, s0) = self.model.tail_scales(k0);
        Some(self.model.derived.chi.abs() * scale * s0 * (5.0 * t / omega + 3.0 / (omega * omega)))
    }
}

/// `ω_k` for `k ≥ 0`.
pub fn bogoliubov_dispersion(k: f64, model: &BecReservoirModel) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::invalid("k", format!("must be >= 0, got {k}")));
    }
    Ok(model.dispersion(k))
}
