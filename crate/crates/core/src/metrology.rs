//! Quantum Fisher information of the dephased probe, its split into
//! decay-induced and phase-induced parts, two-outcome measurement Fisher
//! information and the measurement that saturates the quantum Cramér–Rao bound.
//!
//! Measurement axes are Bloch-sphere unit vectors; the observable is `axis·σ`
//! with eigenvalues ±1. The parallel/perpendicular axes follow the Bloch
//! vector's azimuth `Φ`:
//!
//! * `σ∥ = cos Φ σ_x + sin Φ σ_y`
//! * `σ⊥ = cos Φ σ_y − sin Φ σ_x`
//! * `Λ(φ) = cos φ σ∥ + sin φ σ⊥`

use serde::{Deserialize, Serialize};

use crate::dynamics::QubitState;
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Below this distance from 1, `|w|` is treated as a pure state.
pub const PURE_STATE_TOL: f64 = 1e-12;

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm_sqr(a: &Vec3) -> f64 {
    dot(a, a)
}

/// Encoding factors and their derivatives with respect to the estimated parameter λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingDerivatives {
    pub gamma: f64,
    pub dgamma: f64,
    pub phi: f64,
    pub dphi: f64,
    pub lambda_value: f64,
}

impl EncodingDerivatives {
    pub fn new(gamma: f64, dgamma: f64, phi: f64, dphi: f64, lambda_value: f64) -> Result<Self> {
        let d = Self {
            gamma,
            dgamma,
            phi,
            dphi,
            lambda_value,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        if ![self.gamma, self.dgamma, self.phi, self.dphi, self.lambda_value]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::Domain("encoding derivatives must be finite".into()));
        }
        if self.gamma < 0.0 {
            return Err(Error::Domain(format!("decay factor must be >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Bloch length `w = e^{−Γ}`.
    pub fn bloch_length(&self) -> f64 {
        (-self.gamma).exp()
    }

    /// `∂_λ w = −w ∂_λΓ`.
    pub fn dbloch_length(&self) -> f64 {
        -self.bloch_length() * self.dgamma
    }

    /// The Bloch vector and its λ-derivative.
    pub fn bloch_pair(&self) -> (Vec3, Vec3) {
        let w = self.bloch_length();
        let (s, c) = self.phi.sin_cos();
        let dw = self.dbloch_length();
        (
            [w * c, w * s, 0.0],
            [dw * c - w * s * self.dphi, dw * s + w * c * self.dphi, 0.0],
        )
    }

    pub fn state(&self) -> QubitState {
        let (w, _) = self.bloch_pair();
        QubitState { bloch: w }
    }
}

/// QFI of a qubit from its Bloch vector `w` and `∂_λ w`.
pub fn qfi_from_bloch(w: &Vec3, dw: &Vec3) -> Result<f64> {
    let len2 = norm_sqr(w);
    let len = len2.sqrt();
    if !(len <= 1.0 + PURE_STATE_TOL) {
        return Err(Error::Domain(format!("Bloch vector length {len} exceeds 1")));
    }
    let speed = norm_sqr(dw);
    if (1.0 - len).abs() <= PURE_STATE_TOL {
        return Ok(speed);
    }
    let radial = dot(w, dw);
    Ok(speed + radial * radial / ((1.0 - len) * (1.0 + len)))
}

/// Decay-induced, phase-induced and total QFI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiDecomposition {
    pub f_par: f64,
    pub f_perp: f64,
    pub f_q: f64,
}

/// `F∥ = (∂Γ)²/(e^{2Γ} − 1)`, `F⊥ = e^{−2Γ}(∂Φ)²`, `F_Q = F∥ + F⊥`.
pub fn qfi_dephasing(d: &EncodingDerivatives) -> Result<QfiDecomposition> {
    d.validate()?;
    let f_par = if d.gamma == 0.0 {
        if d.dgamma != 0.0 {
            return Err(Error::Domain(
                "pure-state decay derivative inconsistent: Γ = 0 requires ∂Γ = 0".into(),
            ));
        }
        0.0
    } else {
        d.dgamma * d.dgamma / (2.0 * d.gamma).exp_m1()
    };
    let f_perp = (-2.0 * d.gamma).exp() * d.dphi * d.dphi;
    Ok(QfiDecomposition {
        f_par,
        f_perp,
        f_q: f_par + f_perp,
    })
}

/// `(∂⟨X⟩)² / ⟨ΔX²⟩` for `X = axis·σ`, with the axis held fixed under ∂_λ.
pub fn fisher_of_measurement(state: &QubitState, dstate: &Vec3, axis: &Vec3) -> Result<f64> {
    let axis_len = norm_sqr(axis).sqrt();
    if (axis_len - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("measurement axis must be unit length, got {axis_len}")));
    }
    let mean = dot(axis, &state.bloch);
    let variance = (1.0 - mean) * (1.0 + mean);
    let slope = dot(axis, dstate);
    if variance <= 0.0 {
        if slope == 0.0 {
            return Err(Error::Domain(
                "zero variance: axis aligned with a pure-state Bloch vector".into(),
            ));
        }
        return Err(Error::Domain("zero variance with nonzero signal".into()));
    }
    Ok(slope * slope / variance)
}

/// Axis of `σ∥` for Bloch azimuth `phi`.
pub fn parallel_axis(phi: f64) -> Vec3 {
    let (s, c) = phi.sin_cos();
    [c, s, 0.0]
}

/// Axis of `σ⊥` for Bloch azimuth `phi`.
pub fn perpendicular_axis(phi: f64) -> Vec3 {
    let (s, c) = phi.sin_cos();
    [-s, c, 0.0]
}

/// Axis of `Λ = cos φ σ∥ + sin φ σ⊥`.
pub fn lambda_axis(phi: f64, angle: f64) -> Vec3 {
    let p = parallel_axis(phi);
    let q = perpendicular_axis(phi);
    let (s, c) = angle.sin_cos();
    [c * p[0] + s * q[0], c * p[1] + s * q[1], 0.0]
}

/// Angle φ of the optimal measurement `Λ`, from
/// `tan φ = w(1 − w²) ∂Φ / ∂w` resolved with `atan2`.
pub fn optimal_angle(d: &EncodingDerivatives) -> Result<f64> {
    d.validate()?;
    let w = d.bloch_length();
    let dw = d.dbloch_length();
    if dw == 0.0 && d.dphi == 0.0 {
        return Err(Error::Domain("parameter not encoded: ∂w = ∂Φ = 0".into()));
    }
    let one_minus_w2 = -(-2.0 * d.gamma).exp_m1();
    let angle = if one_minus_w2 <= PURE_STATE_TOL && dw == 0.0 {
        // Pure state: only the phase carries information.
        std::f64::consts::FRAC_PI_2.copysign(d.dphi)
    } else {
        (w * one_minus_w2 * d.dphi).atan2(dw)
    };

    let target = qfi_dephasing(d)?.f_q;
    let (bloch, dbloch) = d.bloch_pair();
    let achieved = fisher_of_measurement(&QubitState { bloch }, &dbloch, &lambda_axis(d.phi, angle))?;
    if (achieved - target).abs() > 1e-8 * target.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "optimal angle check failed: F(Λ) = {achieved:e}, F_Q = {target:e}"
        )));
    }
    Ok(angle)
}

/// Dimensionless signal-to-noise ratio `λ² F`.
pub fn qsnr(lambda_value: f64, fisher: f64) -> Result<f64> {
    if lambda_value == 0.0 || !lambda_value.is_finite() {
        return Err(Error::Domain("QSNR needs a finite nonzero parameter value".into()));
    }
    if !(fisher >= 0.0) {
        return Err(Error::Domain(format!("Fisher information must be >= 0, got {fisher}")));
    }
    Ok(lambda_value * lambda_value * fisher)
}

/// Optimal relative error `1/sqrt(ν Q)`; `Q = 0` gives `+∞`.
pub fn relative_error(q: f64, nu: u64) -> Result<f64> {
    if nu < 1 {
        return Err(Error::invalid("nu", "repetition count must be >= 1"));
    }
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("QSNR must be >= 0, got {q}")));
    }
    if q == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (nu as f64 * q).sqrt())
}

/// `η = Q⊥ / (χ t)²`.
pub fn eta(q_perp: f64, chi: f64, t: f64) -> Result<f64> {
    if chi == 0.0 || !chi.is_finite() {
        return Err(Error::Domain("η needs χ ≠ 0".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain("η needs t > 0".into()));
    }
    Ok(q_perp / (chi * t).powi(2))
}

/// Everything the estimation layer reports for one encoding point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub f_par: f64,
    pub f_perp: f64,
    pub f_q: f64,
    pub q_par: f64,
    pub q_perp: f64,
    pub q: f64,
    /// NaN when the parameter is not encoded at all.
    pub phi_opt: f64,
    pub rel_error_min: f64,
    pub nu: u64,
}

impl EstimationReport {
    pub fn new(d: &EncodingDerivatives, nu: u64) -> Result<Self> {
        let qfi = qfi_dephasing(d)?;
        let lambda = d.lambda_value;
        let q_par = qsnr(lambda, qfi.f_par)?;
        let q_perp = qsnr(lambda, qfi.f_perp)?;
        let q = qsnr(lambda, qfi.f_q)?;
        let phi_opt = match optimal_angle(d) {
            Ok(a) => a,
            Err(_) if qfi.f_q == 0.0 => f64::NAN,
            Err(e) => return Err(e),
        };
        Ok(Self {
            f_par: qfi.f_par,
            f_perp: qfi.f_perp,
            f_q: qfi.f_q,
            q_par,
            q_perp,
            q,
            phi_opt,
            rel_error_min: relative_error(q, nu)?,
            nu,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn reference() -> EncodingDerivatives {
        EncodingDerivatives::new(2f64.ln(), 1.0, 0.3, 2.0, 1.0).unwrap()
    }

    #[test]
    fn bloch_qfi_examples() {
        assert_eq!(qfi_from_bloch(&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0]).unwrap(), 4.0);
        let f = qfi_from_bloch(&[0.5, 0.0, 0.0], &[-0.5, 1.0, 0.0]).unwrap();
        assert!((f - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(qfi_from_bloch(&[0.3, 0.1, 0.0], &[0.0; 3]).unwrap(), 0.0);
        assert!(qfi_from_bloch(&[1.0, 0.1, 0.0], &[0.0; 3]).is_err());
    }

    #[test]
    fn dephasing_qfi_examples() {
        let q = qfi_dephasing(&reference()).unwrap();
        assert!((q.f_par - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.f_perp - 1.0).abs() < 1e-15);
        assert!((q.f_q - 4.0 / 3.0).abs() < 1e-15);

        let pure = EncodingDerivatives::new(0.0, 0.0, 0.0, 2.0, 1.0).unwrap();
        let q = qfi_dephasing(&pure).unwrap();
        assert_eq!((q.f_par, q.f_perp, q.f_q), (0.0, 4.0, 4.0));

        let flat = EncodingDerivatives::new(0.7, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(qfi_dephasing(&flat).unwrap().f_q, 0.0);

        let bad = EncodingDerivatives::new(0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let msg = qfi_dephasing(&bad).unwrap_err().to_string();
        assert!(msg.contains("pure-state decay derivative inconsistent"));
    }

    #[test]
    fn measurement_fisher_examples() {
        let d = reference();
        let (w, dw) = d.bloch_pair();
        let state = QubitState { bloch: w };
        let par = fisher_of_measurement(&state, &dw, &parallel_axis(d.phi)).unwrap();
        let perp = fisher_of_measurement(&state, &dw, &perpendicular_axis(d.phi)).unwrap();
        assert!((par - 1.0 / 3.0).abs() < 1e-14);
        assert!((perp - 1.0).abs() < 1e-14);
        assert_eq!(fisher_of_measurement(&state, &[0.0; 3], &parallel_axis(0.1)).unwrap(), 0.0);
        assert!(fisher_of_measurement(&state, &dw, &[1.0, 1.0, 0.0]).is_err());
        let pure = QubitState::plus();
        assert!(fisher_of_measurement(&pure, &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn optimal_angle_examples() {
        let decay_only = EncodingDerivatives::new(0.4, 1.3, 0.2, 0.0, 1.0).unwrap();
        let a = optimal_angle(&decay_only).unwrap();
        assert!(a.abs() < 1e-15 || (a.abs() - PI).abs() < 1e-15, "{a}");

        let phase_only = EncodingDerivatives::new(0.4, 0.0, 0.2, -1.5, 1.0).unwrap();
        assert!((optimal_angle(&phase_only).unwrap().abs() - FRAC_PI_2).abs() < 1e-15);

        let d = EncodingDerivatives::new(2f64.ln(), 1.0, 0.0, 2.0, 1.0).unwrap();
        let a = optimal_angle(&d).unwrap();
        assert!((a.tan() + 1.5).abs() < 1e-12, "{}", a.tan());
        let (w, dw) = d.bloch_pair();
        let f = fisher_of_measurement(&QubitState { bloch: w }, &dw, &lambda_axis(d.phi, a)).unwrap();
        assert!((f - 4.0 / 3.0).abs() < 1e-14);

        let pure = EncodingDerivatives::new(0.0, 0.0, 0.5, 2.0, 1.0).unwrap();
        assert_eq!(optimal_angle(&pure).unwrap(), FRAC_PI_2);

        let none = EncodingDerivatives::new(0.5, 0.0, 0.5, 0.0, 1.0).unwrap();
        assert!(optimal_angle(&none).unwrap_err().to_string().contains("not encoded"));
    }

    #[test]
    fn qsnr_and_error() {
        assert_eq!(qsnr(2.0, 3.0).unwrap(), 12.0);
        assert!(qsnr(0.0, 3.0).is_err());
        assert_eq!(relative_error(4.0, 1).unwrap(), 0.5);
        assert_eq!(relative_error(0.0, 1).unwrap(), f64::INFINITY);
        assert!(relative_error(4.0, 0).is_err());
        // Q = η*(χt)² gives 1/(sqrt(η*) χ t).
        let (eta_star, chi, t): (f64, f64, f64) = (3.0e5, 2.0, 1e-3);
        let q = eta_star * (chi * t).powi(2);
        let rel = relative_error(q, 1).unwrap();
        assert!((rel - 1.0 / (eta_star.sqrt() * chi * t)).abs() < 1e-15 * rel);
    }

    #[test]
    fn eta_definition() {
        assert_eq!(eta(4.0, 2.0, 1.0).unwrap(), 1.0);
        assert!(eta(4.0, 0.0, 1.0).is_err());
        assert!(eta(4.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn report_invariants() {
        let r = EstimationReport::new(&EncodingDerivatives::new(0.2, 0.5, 1.0, 3.0, 2.0).unwrap(), 4).unwrap();
        assert_eq!(r.f_q, r.f_par + r.f_perp);
        assert!((r.rel_error_min - 1.0 / (4.0 * r.q).sqrt()).abs() < 1e-16);
        let zero = EstimationReport::new(&EncodingDerivatives::new(0.0, 0.0, 0.0, 0.0, 2.0).unwrap(), 1).unwrap();
        assert!(zero.phi_opt.is_nan());
        assert_eq!(zero.rel_error_min, f64::INFINITY);
    }
}
