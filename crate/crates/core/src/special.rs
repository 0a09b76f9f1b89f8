//! Cancellation-free forms of the oscillatory factors that appear in the
//! continuum kernels. Each function is finite at `x = 0` and uses a Taylor
//! series below a small-argument threshold.

/// `sin(x) / x`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `(1 − cos x) / x²`, evaluated as `½ sinc²(x/2)`.
pub fn one_minus_cos_sq(x: f64) -> f64 {
    let s = sinc(0.5 * x);
    0.5 * s * s
}

/// `(sin x − x) / x²`.
pub fn sin_minus_x_sq(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * (-1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (-1.0 / 5040.0 + x2 / 362_880.0)))
    } else {
        (x.sin() - x) / (x * x)
    }
}

/// `sinc(x) − 3 (1 − cos x)/x²`, the `x`-derivative combination of the decay kernel.
pub fn decay_derivative_factor(x: f64) -> f64 {
    sinc(x) - 3.0 * one_minus_cos_sq(x)
}

/// `−x (1 − cos x)/x² − 3 (sin x − x)/x²`, the combination entering the phase-kernel derivative.
///
/// Behaves as `x³/60` at small `x`; the series is
/// `Σ_{m≥1} (−1)^{m+1} 2m x^{2m+1} / (2m+3)!`.
pub fn phase_derivative_factor(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let mut term = x * x2;
        let mut sum = 0.0;
        let mut fact = 120.0; // (2m+3)! at m = 1
        for m in 1..=6 {
            let mf = m as f64;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * 2.0 * mf * term / fact;
            term *= x2;
            fact *= (2.0 * mf + 4.0) * (2.0 * mf + 5.0);
        }
        sum
    } else {
        -x * one_minus_cos_sq(x) - 3.0 * sin_minus_x_sq(x)
    }
}
