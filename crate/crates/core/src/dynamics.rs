//! Decay and phase factors of the dephasing channel and the evolved probe state.
//!
//! Discrete reservoirs are summed exactly; the condensate continuum is
//! integrated on half-period panels. Continuum phases are reported in the
//! frame rotating at `ω₀`; discrete phases default to the lab frame.

use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bec::BecReservoirModel;
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_oscillatory_with, integrate_with, QuadratureOptions, QuadratureResult,
};
use crate::reservoir::DiscreteReservoir;

/// Reference frame of a phase factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Includes the free precession `ω₀ t`.
    Lab,
    /// Free precession removed.
    Rotating,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Lab => "lab",
            Frame::Rotating => "rotating",
        })
    }
}

/// Probe state `ρ = (I + w·σ)/2` stored as its Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub bloch: [f64; 3],
}

impl QubitState {
    /// Tolerance on `|w| ≤ 1`.
    pub const NORM_SLACK: f64 = 1e-12;

    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        let s = Self { bloch };
        if !bloch.iter().all(|c| c.is_finite()) {
            return Err(Error::Domain("Bloch vector not finite".into()));
        }
        if s.length() > 1.0 + Self::NORM_SLACK {
            return Err(Error::Domain(format!("|w| = {} exceeds 1", s.length())));
        }
        Ok(s)
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        Self { bloch: [1.0, 0.0, 0.0] }
    }

    pub fn length(&self) -> f64 {
        self.bloch.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `⟨1|ρ|0⟩ = (w_x − i w_y)/2`, with `|1⟩` the `σ_z = +1` state.
    pub fn coherence(&self) -> Complex64 {
        Complex64::new(self.bloch[0], -self.bloch[1]) * 0.5
    }

    /// Eigenvalues `(1 ± |w|)/2`, descending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let w = self.length();
        [(1.0 + w) / 2.0, (1.0 - w) / 2.0]
    }

    /// Density matrix in the basis `(|1⟩, |0⟩)`.
    pub fn density_matrix(&self) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.bloch;
        [
            [Complex64::new((1.0 + z) / 2.0, 0.0), Complex64::new(x, -y) * 0.5],
            [Complex64::new(x, y) * 0.5, Complex64::new((1.0 - z) / 2.0, 0.0)],
        ]
    }
}

/// State after the dephasing channel: `w = (e^{−Γ} cos Φ, e^{−Γ} sin Φ, 0)`.
pub fn evolve_state(gamma: f64, phi: f64) -> Result<QubitState> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("decay factor must be >= 0, got {gamma}")));
    }
    let w = (-gamma).exp();
    Ok(QubitState {
        bloch: [w * phi.cos(), w * phi.sin(), 0.0],
    })
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")))
    }
}

/// `Γ(t) = Σ 4|g_k|² (1 − cos ω_k t)/ω_k² · coth(βω_k/2)`.
pub fn gamma_discrete(res: &DiscreteReservoir, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(res
        .modes()
        .iter()
        .map(|m| {
            let half = 0.5 * m.omega * t;
            // 1 − cos x = 2 sin²(x/2)
            let one_minus_cos = 2.0 * half.sin().powi(2);
            4.0 * m.g.norm_sqr() * one_minus_cos / (m.omega * m.omega) * res.thermal_factor(m.omega)
        })
        .sum())
}

/// `Φ(t) = ω₀t·[lab] − Σ 4 Re[ξ g*/ω] t + Σ 4 Im[ξ g* (1 − e^{−iωt})/ω²]`.
pub fn phi_discrete(res: &DiscreteReservoir, t: f64, omega0: f64, frame: Frame) -> Result<f64> {
    check_time(t)?;
    let free = match frame {
        Frame::Lab => omega0 * t,
        Frame::Rotating => 0.0,
    };
    let sum: f64 = res
        .modes()
        .iter()
        .map(|m| {
            let cross = m.xi * m.g.conj();
            let x = m.omega * t;
            let one_minus_exp = Complex64::new(2.0 * (0.5 * x).sin().powi(2), x.sin());
            -4.0 * (cross / m.omega).re * t + 4.0 * (cross * one_minus_exp / (m.omega * m.omega)).im
        })
        .sum();
    Ok(free + sum)
}

/// Continuum decay factor at zero temperature.
pub fn gamma_bec(model: &BecReservoirModel, t: f64, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    check_time(t)?;
    let (decay, _) = model.continuum_kernels();
    integrate_oscillatory_with(decay, t, model.k_max(), opts)
}

/// Continuum phase factor at zero temperature, rotating frame.
pub fn phi_bec(model: &BecReservoirModel, t: f64, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    check_time(t)?;
    let (_, phase) = model.continuum_kernels();
    integrate_oscillatory_with(phase, t, model.k_max(), opts)
}

/// Long-time limit of the continuum decay factor (`cos ωt` averaged away).
pub fn gamma_bec_stationary(model: &BecReservoirModel, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    integrate_with(|k| model.stationary_integrand(k), 0.0, model.k_max(), opts)
}

/// `C = ∫ k² ε e^{−k²ℓ²/2}/ω² dk`; the continuum phase grows as `−χ P C t` at late times.
pub fn phase_secular_coefficient(
    model: &BecReservoirModel,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    integrate_with(|k| model.secular_integrand(k), 0.0, model.k_max(), opts)
}

/// Γ and Φ sampled on a caller-supplied time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingTrajectory {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    pub phi: Vec<f64>,
    pub frame: Frame,
}

impl EncodingTrajectory {
    fn check_grid(times: &[f64]) -> Result<()> {
        for t in times {
            check_time(*t)?;
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times", "time grid must be strictly increasing"));
        }
        Ok(())
    }

    pub fn discrete(res: &DiscreteReservoir, times: &[f64], omega0: f64, frame: Frame) -> Result<Self> {
        Self::check_grid(times)?;
        let gamma = times.iter().map(|&t| gamma_discrete(res, t)).collect::<Result<_>>()?;
        let phi = times
            .iter()
            .map(|&t| phi_discrete(res, t, omega0, frame))
            .collect::<Result<_>>()?;
        Ok(Self {
            times: times.to_vec(),
            gamma,
            phi,
            frame,
        })
    }

    /// Continuum trajectory; time points are evaluated in parallel.
    pub fn bec(model: &BecReservoirModel, times: &[f64], opts: &QuadratureOptions) -> Result<Self> {
        Self::check_grid(times)?;
        let pairs = times
            .par_iter()
            .map(|&t| Ok((gamma_bec(model, t, opts)?.value, phi_bec(model, t, opts)?.value)))
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let (gamma, phi) = pairs.into_iter().unzip();
        Ok(Self {
            times: times.to_vec(),
            gamma,
            phi,
            frame: Frame::Rotating,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub const CSV_HEADER: &'static str = "t_s,gamma,phi_rad,coherence,frame";

    /// Columns `t_s, gamma, phi_rad, coherence, frame`; `coherence = e^{−Γ}`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{}",
                self.times[i],
                self.gamma[i],
                self.phi[i],
                (-self.gamma[i]).exp(),
                self.frame
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::DiscreteMode;
    use std::f64::consts::PI;

    fn single(beta: f64) -> DiscreteReservoir {
        let m = DiscreteMode::real(1.0, 0.1, 0.05).unwrap();
        DiscreteReservoir::thermal(vec![m], beta).unwrap()
    }

    #[test]
    fn gamma_single_mode_values() {
        let r = single(f64::INFINITY);
        assert!((gamma_discrete(&r, PI).unwrap() - 0.08).abs() < 1e-15);
        assert_eq!(gamma_discrete(&r, 0.0).unwrap(), 0.0);
        // coth(β/2) = 2
        let hot = single(2.0 * 0.5f64.atanh());
        assert!((gamma_discrete(&hot, PI).unwrap() - 0.16).abs() < 1e-14);
        assert!(gamma_discrete(&r, -1.0).is_err());
    }

    #[test]
    fn phi_single_mode_values() {
        let r = single(f64::INFINITY);
        let at_pi = phi_discrete(&r, PI, 0.0, Frame::Lab).unwrap();
        assert!((at_pi - (-0.02 * PI)).abs() < 1e-15);
        assert!((at_pi + 0.062_832).abs() < 1e-6);
        let at_half = phi_discrete(&r, PI / 2.0, 0.0, Frame::Lab).unwrap();
        assert!((at_half - (-0.01 * PI + 0.02)).abs() < 1e-15);
        assert!((at_half + 0.011_415_9).abs() < 1e-7);
    }

    #[test]
    fn antisymmetric_phase_is_free_precession() {
        let modes = vec![
            DiscreteMode::real(1.0, 0.2, 0.0).unwrap(),
            DiscreteMode::new(2.5, Complex64::new(0.1, -0.3), Complex64::new(0.0, 0.0)).unwrap(),
        ];
        let r = DiscreteReservoir::zero_temperature(modes).unwrap();
        for &t in &[0.0, 0.3, 1.7, 12.0] {
            assert_eq!(phi_discrete(&r, t, 0.7, Frame::Lab).unwrap(), 0.7 * t);
            assert_eq!(phi_discrete(&r, t, 0.7, Frame::Rotating).unwrap(), 0.0);
        }
    }

    #[test]
    fn evolve_state_cases() {
        assert_eq!(evolve_state(0.0, 0.0).unwrap(), QubitState::plus());
        let s = evolve_state(2f64.ln(), PI / 2.0).unwrap();
        assert!(s.bloch[0].abs() < 1e-16 && (s.bloch[1] - 0.5).abs() < 1e-15 && s.bloch[2] == 0.0);
        let gone = evolve_state(800.0, 1.0).unwrap();
        assert_eq!(gone.length(), 0.0);
        assert!(evolve_state(-0.1, 0.0).is_err());
    }

    #[test]
    fn coherence_convention() {
        let s = evolve_state(0.3, 0.4).unwrap();
        let expect = Complex64::from_polar(0.5 * (-0.3f64).exp(), -0.4);
        assert!((s.coherence() - expect).norm() < 1e-15);
        let rho = s.density_matrix();
        assert_eq!(rho[0][1], s.coherence());
    }

    #[test]
    fn trajectory_grid_validation_and_csv() {
        let r = single(f64::INFINITY);
        assert!(EncodingTrajectory::discrete(&r, &[0.0, 1.0, 1.0], 0.0, Frame::Lab).is_err());
        let tr = EncodingTrajectory::discrete(&r, &[0.0, 1.0], 0.0, Frame::Lab).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), EncodingTrajectory::CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "0e0,0e0,0e0,1e0,lab");
    }
}
