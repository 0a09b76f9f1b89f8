//! Adaptive Gauss–Kronrod integration and a period-panelized driver for
//! oscillatory radial kernels.
//!
//! Every integral is seeded with a partition of `[a, b]` into panels, each
//! panel is integrated with the 15-point Kronrod rule and its embedded
//! 7-point Gauss rule, and the panel with the largest error estimate is
//! bisected until the requested tolerance is met. Summation of the final
//! panel list is done in ascending-abscissa order so results do not depend
//! on heap iteration order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], positive half, descending; the last entry is the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Points per 15-point rule application.
pub const RULE_POINTS: usize = 15;

/// Default cap on integrand evaluations per integral.
pub const DEFAULT_MAX_EVALUATIONS: usize = 1_000_000;

/// Default relative tolerance for the dynamics integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Relative factor applied to the integral of |f| when no absolute tolerance is given.
pub const DEFAULT_ABS_SCALE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Tolerances and budget for one integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    /// `None` selects `DEFAULT_ABS_SCALE * ∫|f|`.
    pub abs_tol: Option<f64>,
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: None,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }
}

impl QuadratureOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::invalid("rel_tol", "must be positive and finite"));
        }
        if let Some(abs) = self.abs_tol {
            if !(abs > 0.0 && abs.is_finite()) {
                return Err(Error::invalid("abs_tol", "must be positive and finite"));
            }
        }
        if self.max_evaluations < RULE_POINTS {
            return Err(Error::invalid("max_evaluations", "smaller than one rule application"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 15/7-point Gauss–Kronrod application with the QUADPACK error heuristic.
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_centre = f(centre);
    let mut kronrod = f_centre * WGK[7];
    let mut gauss = f_centre * WG[3];
    let mut abs_value = kronrod.abs();
    let mut values = [0.0f64; 14];

    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(centre - dx);
        let hi = f(centre + dx);
        values[2 * j] = lo;
        values[2 * j + 1] = hi;
        kronrod += WGK[j] * (lo + hi);
        abs_value += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    if !kronrod.is_finite() || !f_centre.is_finite() {
        return Err(Error::Domain(format!(
            "integrand not finite on [{a:e}, {b:e}]"
        )));
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_centre - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((values[2 * j] - mean).abs() + (values[2 * j + 1] - mean).abs());
    }

    let abs_half = half.abs();
    let value = kronrod * half;
    let abs_value = abs_value * abs_half;
    let asc = asc * abs_half;
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        abs_value,
    })
}

/// Global adaptive refinement seeded with already-evaluated panels.
///
/// `extra_error` is added to the error budget (e.g. a truncated tail) and
/// `evaluations` counts the work already spent producing `seed`.
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    seed: Vec<Panel>,
    opts: &QuadratureOptions,
    extra_error: f64,
    mut evaluations: usize,
) -> Result<QuadratureResult> {
    let mut value: f64 = seed.iter().map(|p| p.value).sum();
    let mut error: f64 = seed.iter().map(|p| p.error).sum::<f64>() + extra_error;
    let abs_total: f64 = seed.iter().map(|p| p.abs_value).sum();
    let abs_tol = opts.abs_tol.unwrap_or(DEFAULT_ABS_SCALE * abs_total);

    let mut heap: BinaryHeap<Panel> = seed.into_iter().collect();
    let mut settled: Vec<Panel> = Vec::new();

    let target = |v: f64| abs_tol.max(opts.rel_tol * v.abs());

    while error > target(value) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if width <= 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE)
            || mid <= worst.a
            || mid >= worst.b
        {
            // Cannot be split further at double precision.
            settled.push(worst);
            continue;
        }
        if evaluations + 2 * RULE_POINTS > opts.max_evaluations {
            heap.push(worst);
            let (value, error) = collect(heap.into_vec(), settled, extra_error);
            return Err(Error::QuadratureLimit {
                estimate: value,
                error,
                evaluations,
            });
        }
        let left = gauss_kronrod_15(f, worst.a, mid)?;
        let right = gauss_kronrod_15(f, mid, worst.b)?;
        evaluations += 2 * RULE_POINTS;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let (value, error) = collect(heap.into_vec(), settled, extra_error);
    if error > target(value) && !heap_exhausted_ok(error, value, abs_tol, opts.rel_tol) {
        return Err(Error::QuadratureLimit {
            estimate: value,
            error,
            evaluations,
        });
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
    })
}

// Only reachable when every panel settled at the roundoff floor; accept when
// that floor is within a factor of the target.
fn heap_exhausted_ok(error: f64, value: f64, abs_tol: f64, rel_tol: f64) -> bool {
    error <= 10.0 * abs_tol.max(rel_tol * value.abs())
}

fn collect(mut open: Vec<Panel>, settled: Vec<Panel>, extra_error: f64) -> (f64, f64) {
    open.extend(settled);
    open.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = open.iter().map(|p| p.value).sum();
    let error = open.iter().map(|p| p.error).sum::<f64>() + extra_error;
    (value, error)
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("interval", "bounds must be finite"));
    }
    if a >= b {
        return Err(Error::invalid("interval", format!("need a < b, got [{a}, {b}]")));
    }
    Ok(())
}

/// Integrate `f` over `[a, b]` to `max(abs_tol, rel_tol |I|)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    integrate_with(
        f,
        a,
        b,
        &QuadratureOptions {
            rel_tol,
            abs_tol: Some(abs_tol),
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        },
    )
}

/// As [`integrate_adaptive`], with the full option set.
pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    check_interval(a, b)?;
    opts.validate()?;
    let first = gauss_kronrod_15(&f, a, b)?;
    refine(&f, vec![first], opts, 0.0, RULE_POINTS)
}

/// Apply a single 15-point rule with no refinement.
///
/// Exposed so callers can demonstrate what an unpanelized rule does on a
/// rapidly oscillating integrand.
pub fn single_rule<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<QuadratureResult> {
    check_interval(a, b)?;
    let p = gauss_kronrod_15(&f, a, b)?;
    Ok(QuadratureResult {
        value: p.value,
        abs_error_estimate: p.error,
        evaluations: RULE_POINTS,
    })
}

/// A radial kernel `K(k, t)` oscillating through a phase `ω(k) t`.
pub trait OscillatoryKernel {
    fn eval(&self, k: f64, t: f64) -> f64;

    /// `dω/dk` at `k`, used to size panels to half an oscillation period.
    fn phase_rate(&self, k: f64) -> f64;

    /// Upper bound on `∫_{k_from}^{∞} |K(k, t)| dk`, if the kernel can supply one.
    ///
    /// When available, panels past the point where the bound falls below the
    /// error budget are skipped and the bound is charged to the error estimate.
    fn tail_bound(&self, _k_from: f64, _t: f64) -> Option<f64> {
        None
    }
}

/// Closure-backed kernel with a given phase rate and no tail bound.
pub struct FnKernel<K, R> {
    pub kernel: K,
    pub rate: R,
}

impl<K, R> OscillatoryKernel for FnKernel<K, R>
where
    K: Fn(f64, f64) -> f64,
    R: Fn(f64) -> f64,
{
    fn eval(&self, k: f64, t: f64) -> f64 {
        (self.kernel)(k, t)
    }

    fn phase_rate(&self, k: f64) -> f64 {
        (self.rate)(k)
    }
}

impl<T: OscillatoryKernel + ?Sized> OscillatoryKernel for &T {
    fn eval(&self, k: f64, t: f64) -> f64 {
        (**self).eval(k, t)
    }

    fn phase_rate(&self, k: f64) -> f64 {
        (**self).phase_rate(k)
    }

    fn tail_bound(&self, k_from: f64, t: f64) -> Option<f64> {
        (**self).tail_bound(k_from, t)
    }
}

/// Width of the next panel starting at `k`: half a period of `cos(ω t)`,
/// using the larger phase rate of the two panel ends.
fn half_period_width<K: OscillatoryKernel>(kernel: &K, k: f64, t: f64, remaining: f64) -> f64 {
    let rate0 = kernel.phase_rate(k).abs();
    if !(rate0 > 0.0) || !rate0.is_finite() {
        return remaining;
    }
    let h0 = std::f64::consts::PI / (t * rate0);
    let rate1 = kernel.phase_rate(k + h0.min(remaining)).abs();
    let h = std::f64::consts::PI / (t * rate0.max(rate1));
    h.min(remaining)
}

/// Integrate `kernel(·, t)` over `[0, k_max]` on half-period panels.
pub fn integrate_oscillatory<K: OscillatoryKernel>(
    kernel: K,
    t: f64,
    k_max: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_oscillatory_with(kernel, t, k_max, &QuadratureOptions::with_rel_tol(rel_tol))
}

pub fn integrate_oscillatory_with<K: OscillatoryKernel>(
    kernel: K,
    t: f64,
    k_max: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    check_interval(0.0, k_max)?;
    opts.validate()?;
    let f = |k: f64| kernel.eval(k, t);
    if t == 0.0 {
        return integrate_with(f, 0.0, k_max, opts);
    }

    let mut panels = Vec::new();
    let mut evaluations = 0usize;
    let mut running = 0.0f64;
    let mut running_abs = 0.0f64;
    let mut tail_error = 0.0f64;
    let mut k = 0.0f64;
    while k < k_max {
        if let (Some(bound), false) = (kernel.tail_bound(k, t), panels.is_empty()) {
            let floor = opts
                .abs_tol
                .unwrap_or(DEFAULT_ABS_SCALE * running_abs)
                .max(opts.rel_tol * running.abs());
            if bound <= 0.01 * floor {
                tail_error = bound;
                break;
            }
        }
        let width = half_period_width(&kernel, k, t, k_max - k);
        let end = if k_max - (k + width) <= 1e-12 * k_max {
            k_max
        } else {
            k + width
        };
        if evaluations + RULE_POINTS > opts.max_evaluations {
            return Err(Error::QuadratureLimit {
                estimate: running,
                error: f64::INFINITY,
                evaluations,
            });
        }
        let p = gauss_kronrod_15(&f, k, end)?;
        evaluations += RULE_POINTS;
        running += p.value;
        running_abs += p.abs_value;
        panels.push(p);
        k = end;
    }
    refine(&f, panels, opts, tail_error, evaluations)
}
