//! Seeded batch of oracle comparisons with one JSON-serializable report per case.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fisher::{classical_fisher_outcomes, outcome_probability, qfi_numeric};
use super::fock::{fock_trajectory, FockConfig};
use crate::dynamics::{evolve_state, gamma_discrete, phi_discrete, Frame, QubitState};
use crate::error::Result;
use crate::metrology::{
    fisher_of_measurement, lambda_axis, optimal_angle, parallel_axis, perpendicular_axis, qfi_dephasing,
    qfi_from_bloch, EncodingDerivatives,
};
use crate::reservoir::{DiscreteMode, DiscreteReservoir};

/// Agreement required between exact evolution and the closed form.
pub const FOCK_TOL: f64 = 1e-6;
/// Relative agreement required between the three QFI routes.
pub const QFI_TOL: f64 = 1e-7;
/// Relative tolerance on the optimal-measurement identities.
pub const MEASUREMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub case_id: String,
    pub max_abs_error: f64,
    /// Photon cutoff at convergence; `None` for cases without a Fock basis.
    pub n_max_used: Option<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub fock_cases: usize,
    pub fock_times: usize,
    pub qfi_draws: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            fock_cases: 50,
            fock_times: 20,
            qfi_draws: 1000,
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn coupling(rng: &mut impl Rng, bound: f64) -> Complex64 {
    Complex64::from_polar(bound * rng.gen::<f64>(), 2.0 * PI * rng.gen::<f64>())
}

/// One or two modes with `ω ∈ [0.5, 2]` and `|g|, |ξ| ≤ 0.3ω`, at zero temperature.
pub fn random_fock_reservoir(rng: &mut impl Rng) -> Result<DiscreteReservoir> {
    let n_modes = rng.gen_range(1..=2);
    let modes = (0..n_modes)
        .map(|_| {
            let omega = rng.gen_range(0.5..2.0);
            DiscreteMode::new(omega, coupling(rng, 0.3 * omega), coupling(rng, 0.3 * omega))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteReservoir::zero_temperature(modes)
}

/// `n` equally spaced times over two periods of the slowest mode, starting at 0.
pub fn fock_times(res: &DiscreteReservoir, n: usize) -> Vec<f64> {
    let slowest = res.modes().iter().map(|m| m.omega).fold(f64::INFINITY, f64::min);
    let t_end = 4.0 * PI / slowest;
    let n = n.max(2);
    (0..n).map(|j| t_end * j as f64 / (n - 1) as f64).collect()
}

/// Largest `|⟨1|ρ|0⟩_exact − ⟨1|ρ|0⟩_closed|` over the grid, plus the cutoff used.
pub fn fock_case(res: &DiscreteReservoir, times: &[f64], omega0: f64, cfg: &FockConfig) -> Result<(f64, usize)> {
    let run = fock_trajectory(res, times, omega0, cfg)?;
    let mut worst: f64 = 0.0;
    for (c, &t) in run.coherences.iter().zip(times) {
        let gamma = gamma_discrete(res, t)?;
        let phi = phi_discrete(res, t, omega0, Frame::Lab)?;
        let closed = Complex64::from_polar(0.5 * (-gamma).exp(), -phi);
        worst = worst.max((c - closed).norm());
    }
    Ok((worst, run.n_max_used))
}

/// Random mixed-state encoding: `Γ ∈ [10⁻³, 3]`, `∂Γ, ∂Φ ∈ [−5, 5]`, `λ ∈ [0.2, 3]`.
pub fn random_encoding(rng: &mut impl Rng) -> Result<EncodingDerivatives> {
    let lambda = rng.gen_range(0.2..3.0);
    let gamma = rng.gen_range(1e-3..=3.0);
    let dgamma = rng.gen_range(-5.0..=5.0);
    let phi = rng.gen_range(-PI..PI);
    let dphi = rng.gen_range(-5.0..=5.0);
    EncodingDerivatives::new(gamma, dgamma, phi, dphi, lambda)
}

/// The state family `ρ(x)` whose value and slope at `λ` match `d`.
pub fn linear_family(d: &EncodingDerivatives) -> impl Fn(f64) -> Result<QubitState> + '_ {
    move |x| {
        let shift = x - d.lambda_value;
        evolve_state((d.gamma + d.dgamma * shift).max(0.0), d.phi + d.dphi * shift)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Worst relative disagreement among the three QFI routes, and whether
/// `F_Q = F∥ + F⊥` held exactly for every draw.
pub fn qfi_identity_errors(seed: u64, draws: usize) -> Result<(f64, bool)> {
    let mut rng = rng_for(seed, 1);
    let mut worst: f64 = 0.0;
    let mut additive = true;
    for _ in 0..draws {
        let d = random_encoding(&mut rng)?;
        let split = qfi_dephasing(&d)?;
        additive &= split.f_q == split.f_par + split.f_perp;
        let (w, dw) = d.bloch_pair();
        let bloch = qfi_from_bloch(&w, &dw)?;
        let numeric = qfi_numeric(linear_family(&d), d.lambda_value)?;
        worst = worst.max(rel(split.f_q, bloch)).max(rel(split.f_q, numeric)).max(rel(bloch, numeric));
    }
    Ok((worst, additive))
}

/// Worst relative deviation of `F(Λ)/F_Q` from 1 and of `F(σ∥)`, `F(σ⊥)` from
/// `F∥`, `F⊥` (measured against `F_Q`).
pub fn measurement_errors(seed: u64, draws: usize) -> Result<f64> {
    let mut rng = rng_for(seed, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let d = random_encoding(&mut rng)?;
        let split = qfi_dephasing(&d)?;
        if split.f_q == 0.0 {
            continue;
        }
        let state = d.state();
        let (_, dw) = d.bloch_pair();
        let angle = optimal_angle(&d)?;
        let f_lambda = fisher_of_measurement(&state, &dw, &lambda_axis(d.phi, angle))?;
        let f_par = fisher_of_measurement(&state, &dw, &parallel_axis(d.phi))?;
        let f_perp = fisher_of_measurement(&state, &dw, &perpendicular_axis(d.phi))?;
        worst = worst
            .max((f_lambda / split.f_q - 1.0).abs())
            .max((f_par - split.f_par).abs() / split.f_q)
            .max((f_perp - split.f_perp).abs() / split.f_q);
    }
    Ok(worst)
}

/// Two-outcome Fisher information from finite-differenced probabilities
/// against the Bloch formula, for σ∥, σ⊥ and a random axis, measured against `F_Q`.
pub fn two_outcome_errors(seed: u64, draws: usize) -> Result<f64> {
    let mut rng = rng_for(seed, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let d = random_encoding(&mut rng)?;
        let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
        let azimuth: f64 = rng.gen_range(0.0..2.0 * PI);
        let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
        let random_axis = [sin_theta * azimuth.cos(), sin_theta * azimuth.sin(), cos_theta];
        let f_q = qfi_dephasing(&d)?.f_q;
        if f_q == 0.0 {
            continue;
        }
        let family = linear_family(&d);
        let (_, dw) = d.bloch_pair();
        for axis in [parallel_axis(d.phi), perpendicular_axis(d.phi), random_axis] {
            let numeric = classical_fisher_outcomes(|x| Ok(outcome_probability(&family(x)?, &axis)), d.lambda_value)?;
            let formula = fisher_of_measurement(&d.state(), &dw, &axis)?;
            worst = worst.max((numeric - formula).abs() / f_q);
        }
    }
    Ok(worst)
}

/// Run the full oracle suite.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<OracleReport>> {
    let cfg = FockConfig::default();
    let mut reports = (0..opts.fock_cases)
        .into_par_iter()
        .map(|i| -> Result<OracleReport> {
            let mut rng = rng_for(opts.seed, 100 + i as u64);
            let res = random_fock_reservoir(&mut rng)?;
            let omega0 = rng.gen_range(-1.0..1.0);
            let times = fock_times(&res, opts.fock_times);
            let (err, n_max) = fock_case(&res, &times, omega0, &cfg)?;
            Ok(OracleReport {
                case_id: format!("fock-{i:03}"),
                max_abs_error: err,
                n_max_used: Some(n_max),
                passed: err <= FOCK_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (qfi_err, additive) = qfi_identity_errors(opts.seed, opts.qfi_draws)?;
    reports.push(OracleReport {
        case_id: "qfi-identities".into(),
        max_abs_error: qfi_err,
        n_max_used: None,
        passed: qfi_err <= QFI_TOL && additive,
    });
    let meas = measurement_errors(opts.seed, opts.qfi_draws)?;
    reports.push(OracleReport {
        case_id: "optimal-measurement".into(),
        max_abs_error: meas,
        n_max_used: None,
        passed: meas <= MEASUREMENT_TOL,
    });
    let two = two_outcome_errors(opts.seed, opts.qfi_draws)?;
    reports.push(OracleReport {
        case_id: "two-outcome-fisher".into(),
        max_abs_error: two,
        n_max_used: None,
        passed: two <= QFI_TOL,
    });
    Ok(reports)
}
