//! Estimating the condensate scattering length `a_B` with the dephased probe:
//! per-time Fisher reports, sweeps over `(a_B, t)`, and the late-time ratio
//! `η* = lim Q⊥/(χt)²`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bec::BecReservoirModel;
use crate::derivative::{derivative_wrt_param, DerivativeMethod, Functional};
use crate::dynamics::{gamma_bec, gamma_bec_stationary, phi_bec};
use crate::error::{Error, Result};
use crate::metrology::{eta, EncodingDerivatives, EstimationReport};
use crate::quadrature::QuadratureOptions;

/// Γ, Φ and their `a_B` derivatives at time `t` (λ = a_B).
pub fn encoding_derivatives(model: &BecReservoirModel, t: f64, opts: &QuadratureOptions) -> Result<EncodingDerivatives> {
    let gamma = gamma_bec(model, t, opts)?.value.max(0.0);
    let phi = phi_bec(model, t, opts)?.value;
    let dgamma = derivative_wrt_param(Functional::Gamma, model, t, DerivativeMethod::Analytic, opts)?;
    let dphi = derivative_wrt_param(Functional::Phi, model, t, DerivativeMethod::Analytic, opts)?;
    EncodingDerivatives::new(gamma, dgamma, phi, dphi, model.ab())
}

/// One row of an estimation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensingPoint {
    pub t: f64,
    pub ab: f64,
    pub chi: f64,
    pub derivatives: EncodingDerivatives,
    pub report: EstimationReport,
}

impl SensingPoint {
    pub fn compute(model: &BecReservoirModel, t: f64, nu: u64, opts: &QuadratureOptions) -> Result<Self> {
        let derivatives = encoding_derivatives(model, t, opts)?;
        Ok(Self {
            t,
            ab: model.ab(),
            chi: model.chi(),
            derivatives,
            report: EstimationReport::new(&derivatives, nu)?,
        })
    }

    /// `η = Q⊥/(χt)²`.
    pub fn eta(&self) -> Result<f64> {
        eta(self.report.q_perp, self.chi, self.t)
    }
}

/// Evaluate every `(a_B, t)` pair; output is ordered by `a_B` then `t`.
pub fn sweep(
    model: &BecReservoirModel,
    ab_values: &[f64],
    times: &[f64],
    nu: u64,
    opts: &QuadratureOptions,
) -> Result<Vec<SensingPoint>> {
    let models = ab_values
        .iter()
        .map(|&ab| model.with_scattering_length(ab))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, f64)> = (0..models.len())
        .flat_map(|i| times.iter().map(move |&t| (i, t)))
        .collect();
    jobs.par_iter()
        .map(|&(i, t)| SensingPoint::compute(&models[i], t, nu, opts))
        .collect()
}

pub const REPORT_CSV_HEADER: &str = "t_s,aB_m,chi,gamma,dgamma,phi_rad,dphi,F_par,F_perp,F_Q,Q_par,Q_perp,Q,phi_opt_rad,rel_error_min,nu";

pub fn write_report_csv<W: Write>(points: &[SensingPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{REPORT_CSV_HEADER}")?;
    for p in points {
        let d = &p.derivatives;
        let r = &p.report;
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            p.t, p.ab, p.chi, d.gamma, d.dgamma, d.phi, d.dphi, r.f_par, r.f_perp, r.f_q, r.q_par,
            r.q_perp, r.q, r.phi_opt, r.rel_error_min, r.nu
        )?;
    }
    Ok(())
}

/// `η* = e^{−2Γ∞} a_B² (P ∂C/∂a_B)²`, the coefficient of `(χt)²` in the late-time phase QSNR.
pub fn eta_star_asymptotic(model: &BecReservoirModel, opts: &QuadratureOptions) -> Result<f64> {
    let gamma_inf = gamma_bec_stationary(model, opts)?.value;
    let dc = derivative_wrt_param(Functional::SecularCoefficient, model, 0.0, DerivativeMethod::Analytic, opts)?;
    let slope = model.derived().p * dc;
    Ok((-2.0 * gamma_inf).exp() * model.ab().powi(2) * slope * slope)
}

/// Controls for locating the late-time η plateau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauOptions {
    /// Relative variation over the last decade that counts as converged.
    pub variation_tol: f64,
    /// Samples per decade of the window.
    pub points_per_decade: usize,
    /// Initial window end as a multiple of the Γ saturation time.
    pub saturation_multiple: f64,
    /// Largest window end tried before giving up, s.
    pub max_t_end: f64,
    /// Per-integral evaluation cap used for the late-time window, which needs
    /// more half-period panels than the default cap allows.
    pub max_evaluations: usize,
}

impl Default for PlateauOptions {
    fn default() -> Self {
        Self {
            variation_tol: 0.01,
            points_per_decade: 12,
            saturation_multiple: 10.0,
            max_t_end: 0.1,
            max_evaluations: 20_000_000,
        }
    }
}

/// Located η plateau and the window it was read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaPlateau {
    pub value: f64,
    /// Relative spread `(max − min)/mean` over `[t_start, t_end]`.
    pub variation: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub t_saturation: f64,
    pub times: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Time after which Γ stays within 1% of its stationary value.
///
/// Scanned on a √2-spaced grid starting at the sound-crossing time `ℓ_A / c`.
pub fn gamma_saturation_time(model: &BecReservoirModel, opts: &QuadratureOptions) -> Result<f64> {
    let gamma_inf = gamma_bec_stationary(model, opts)?.value;
    let tau = model.ell() / model.group_velocity(0.0);
    let mut streak = 0;
    let mut first = None;
    for j in 0..80 {
        let t = tau * 2f64.powf(0.5 * j as f64);
        let g = gamma_bec(model, t, opts)?.value;
        if ((g - gamma_inf) / gamma_inf).abs() < 0.01 {
            first.get_or_insert(t);
            streak += 1;
            if streak == 3 {
                return Ok(first.unwrap_or(t));
            }
        } else {
            streak = 0;
            first = None;
        }
    }
    Err(Error::PlateauNotReached {
        variation: f64::NAN,
        t_end: tau * 2f64.powf(40.0),
    })
}

/// Log-spaced samples over `[t_end/10, t_end]`, both ends included.
pub fn last_decade(t_end: f64, points_per_decade: usize) -> Vec<f64> {
    let n = points_per_decade.max(2);
    (0..=n)
        .map(|i| t_end * 10f64.powf(i as f64 / n as f64 - 1.0))
        .collect()
}

/// Find the late-time plateau of η. The window end starts at
/// `saturation_multiple × t_sat` and doubles until the spread over the last
/// decade is below `variation_tol`.
pub fn eta_plateau(model: &BecReservoirModel, plateau: &PlateauOptions, opts: &QuadratureOptions) -> Result<EtaPlateau> {
    let opts = &QuadratureOptions {
        max_evaluations: opts.max_evaluations.max(plateau.max_evaluations),
        ..*opts
    };
    let t_sat = gamma_saturation_time(model, opts)?;
    let mut t_end = plateau.saturation_multiple * t_sat;
    loop {
        let times = last_decade(t_end, plateau.points_per_decade);
        let etas = times
            .par_iter()
            .map(|&t| SensingPoint::compute(model, t, 1, opts)?.eta())
            .collect::<Result<Vec<f64>>>()?;
        let max = etas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = etas.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = etas.iter().sum::<f64>() / etas.len() as f64;
        let variation = (max - min) / mean;
        if variation < plateau.variation_tol {
            // Upper half-decade of the window.
            let upper = &etas[etas.len() / 2..];
            let value = upper.iter().sum::<f64>() / upper.len() as f64;
            return Ok(EtaPlateau {
                value,
                variation,
                t_start: times[0],
                t_end,
                t_saturation: t_sat,
                times,
                eta: etas,
            });
        }
        if 2.0 * t_end > plateau.max_t_end {
            return Err(Error::PlateauNotReached { variation, t_end });
        }
        t_end *= 2.0;
    }
}

/// η* by both routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaStar {
    pub ab: f64,
    pub plateau: EtaPlateau,
    pub asymptotic: f64,
    /// `|plateau − asymptotic| / asymptotic`.
    pub relative_gap: f64,
}

/// Maximum tolerated disagreement between the two η* routes.
pub const ETA_STAR_AGREEMENT: f64 = 0.01;

pub fn eta_star(model: &BecReservoirModel, plateau: &PlateauOptions, opts: &QuadratureOptions) -> Result<EtaStar> {
    let asymptotic = eta_star_asymptotic(model, opts)?;
    let plateau = eta_plateau(model, plateau, opts)?;
    let relative_gap = ((plateau.value - asymptotic) / asymptotic).abs();
    if relative_gap > ETA_STAR_AGREEMENT {
        return Err(Error::Domain(format!(
            "η* routes disagree: plateau {:e} vs asymptotic {asymptotic:e} (gap {relative_gap:.3e})",
            plateau.value
        )));
    }
    Ok(EtaStar {
        ab: model.ab(),
        plateau,
        asymptotic,
        relative_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decade_grid_endpoints() {
        let g = last_decade(2e-2, 4);
        assert_eq!(g.len(), 5);
        assert!((g[0] - 2e-3).abs() < 1e-18);
        assert!((g[4] - 2e-2).abs() < 1e-18);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn report_row_recomputes() {
        let m = BecReservoirModel::reference();
        let p = SensingPoint::compute(&m, 1e-3, 1, &QuadratureOptions::default()).unwrap();
        let r = &p.report;
        assert_eq!(r.f_q, r.f_par + r.f_perp);
        assert!((r.q - p.ab * p.ab * r.f_q).abs() <= 1e-12 * r.q);
        let mut buf = Vec::new();
        write_report_csv(&[p], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 16);
    }
}
