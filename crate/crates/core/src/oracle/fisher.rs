//! Numerical Fisher information straight from density matrices and outcome
//! probabilities, with no Bloch-vector formulas.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::derivative::FD_RELATIVE_STEP;
use crate::dynamics::QubitState;
use crate::error::{Error, Result};
use crate::metrology::{Vec3, PURE_STATE_TOL};

fn step_for(lambda: f64) -> f64 {
    if lambda == 0.0 {
        FD_RELATIVE_STEP
    } else {
        FD_RELATIVE_STEP * lambda.abs()
    }
}

/// Central differences at `h` and `h/2` combined by one Richardson pass:
/// `[8(f(λ+h/2) − f(λ−h/2)) − (f(λ+h) − f(λ−h))] / (6h)`.
fn richardson_f64<F: Fn(f64) -> Result<f64>>(f: F, lambda: f64) -> Result<f64> {
    let h = step_for(lambda);
    let wide = f(lambda + h)? - f(lambda - h)?;
    let narrow = f(lambda + 0.5 * h)? - f(lambda - 0.5 * h)?;
    Ok((8.0 * narrow - wide) / (6.0 * h))
}

fn richardson_matrix<F>(f: F, lambda: f64) -> Result<Matrix2<Complex64>>
where
    F: Fn(f64) -> Result<Matrix2<Complex64>>,
{
    let h = step_for(lambda);
    let wide = f(lambda + h)? - f(lambda - h)?;
    let narrow = f(lambda + 0.5 * h)? - f(lambda - 0.5 * h)?;
    Ok((narrow * Complex64::new(8.0, 0.0) - wide) / Complex64::new(6.0 * h, 0.0))
}

fn matrix_of(state: &QubitState) -> Matrix2<Complex64> {
    let r = state.density_matrix();
    Matrix2::new(r[0][0], r[0][1], r[1][0], r[1][1])
}

/// `F_Q = 2 Σ_{ij} |⟨i|∂ρ|j⟩|² / (p_i + p_j)` in the eigenbasis of `ρ(λ)`.
///
/// `∂ρ` is taken by finite differences of `rho_of`. Pairs with
/// `p_i + p_j` below the pure-state tolerance are dropped, which is the
/// correct limit for rank-deficient states.
pub fn qfi_numeric<F>(rho_of: F, lambda: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<QubitState>,
{
    let rho = matrix_of(&rho_of(lambda)?);
    let drho = richardson_matrix(|x| Ok(matrix_of(&rho_of(x)?)), lambda)?;
    let eig = rho.symmetric_eigen();
    let v = eig.eigenvectors;
    let rotated = v.adjoint() * drho * v;
    let mut f = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let denom = eig.eigenvalues[i] + eig.eigenvalues[j];
            if denom > PURE_STATE_TOL {
                f += 2.0 * rotated[(i, j)].norm_sqr() / denom;
            }
        }
    }
    if !f.is_finite() {
        return Err(Error::Domain(format!("non-finite numeric QFI at λ = {lambda:e}")));
    }
    Ok(f)
}

/// Classical Fisher information of a two-outcome measurement from `p₊(λ)`:
/// `Σ_± (∂p_±)² / p_±`.
pub fn classical_fisher_outcomes<F>(p_plus: F, lambda: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let p = p_plus(lambda)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("outcome probability {p} must lie strictly inside (0, 1)")));
    }
    let dp = richardson_f64(&p_plus, lambda)?;
    Ok(dp * dp / p + dp * dp / (1.0 - p))
}

/// Projective measurement of `n·σ`: `p₊ = (1 + n·w)/2`.
pub fn outcome_probability(state: &QubitState, axis: &Vec3) -> f64 {
    let w = state.bloch;
    0.5 * (1.0 + axis[0] * w[0] + axis[1] * w[1] + axis[2] * w[2])
}
