//! Derivatives of the continuum functionals with respect to the condensate
//! scattering length `a_B`.
//!
//! `a_B` enters only through `g_B`, i.e. through `ω_k`. The analytic route
//! differentiates each integrand under the integral sign using
//! `∂ω_k/∂a_B = n ε_k g_B / (a_B ħ ω_k)`; the finite-difference route
//! re-integrates at shifted `a_B` and applies one Richardson pass.

use serde::{Deserialize, Serialize};

use crate::bec::BecReservoirModel;
use crate::dynamics::{gamma_bec, gamma_bec_stationary, phase_secular_coefficient, phi_bec};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_oscillatory_with, integrate_with, QuadratureOptions};

/// Relative step used by the finite-difference route.
pub const FD_RELATIVE_STEP: f64 = 1e-5;

/// Continuum quantity to differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Functional {
    /// `Γ(t)`.
    Gamma,
    /// `Φ(t)`, rotating frame.
    Phi,
    /// `Γ(∞)`.
    GammaStationary,
    /// Secular phase coefficient `C`.
    SecularCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeMethod {
    Analytic,
    FiniteDifference,
}

/// Value of `functional` for `model` at time `t` (ignored by time-independent functionals).
pub fn evaluate(functional: Functional, model: &BecReservoirModel, t: f64, opts: &QuadratureOptions) -> Result<f64> {
    Ok(match functional {
        Functional::Gamma => gamma_bec(model, t, opts)?.value,
        Functional::Phi => phi_bec(model, t, opts)?.value,
        Functional::GammaStationary => gamma_bec_stationary(model, opts)?.value,
        Functional::SecularCoefficient => phase_secular_coefficient(model, opts)?.value,
    })
}

/// `∂/∂a_B` of `functional` at the model's `a_B`.
pub fn derivative_wrt_param(
    functional: Functional,
    model: &BecReservoirModel,
    t: f64,
    method: DerivativeMethod,
    opts: &QuadratureOptions,
) -> Result<f64> {
    match method {
        DerivativeMethod::Analytic => analytic(functional, model, t, opts),
        DerivativeMethod::FiniteDifference => finite_difference(functional, model, t, opts),
    }
}

fn analytic(functional: Functional, model: &BecReservoirModel, t: f64, opts: &QuadratureOptions) -> Result<f64> {
    let k_max = model.k_max();
    let r = match functional {
        Functional::Gamma => {
            if t == 0.0 {
                return Ok(0.0);
            }
            integrate_oscillatory_with(model.decay_kernel_derivative(), t, k_max, opts)?
        }
        Functional::Phi => {
            if t == 0.0 {
                return Ok(0.0);
            }
            integrate_oscillatory_with(model.phase_kernel_derivative(), t, k_max, opts)?
        }
        Functional::GammaStationary => {
            integrate_with(|k| model.stationary_integrand_dab(k), 0.0, k_max, opts)?
        }
        Functional::SecularCoefficient => {
            integrate_with(|k| model.secular_integrand_dab(k), 0.0, k_max, opts)?
        }
    };
    Ok(r.value)
}

fn finite_difference(
    functional: Functional,
    model: &BecReservoirModel,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let ab = model.ab();
    let h = FD_RELATIVE_STEP * ab;
    if !(h > f64::MIN_POSITIVE * 1e6) || ab - h <= 0.0 || ab + h == ab {
        return Err(Error::StepUnderflow(ab));
    }
    let at = |x: f64| evaluate(functional, &model.with_scattering_length_unchecked(x), t, opts);
    let central = |step: f64| -> Result<f64> { Ok((at(ab + step)? - at(ab - step)?) / (2.0 * step)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
