//! Exact evolution of probe + reservoir in a truncated Fock basis.
//!
//! The full Hamiltonian
//! `H = ω₀σ_z/2 + Σ ω_k b†b + Σ_i |i⟩⟨i| Σ_k (g_{ki} b† + g*_{ki} b)`
//! is assembled as a sparse matrix over `2·(n_max+1)^M` states, the initial
//! product state `|+⟩ ⊗ |n⟩` is propagated, and the modes are traced out.
//! Nothing here uses the closed-form decay/phase factors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::QubitState;
use crate::error::{Error, Result};
use crate::reservoir::DiscreteReservoir;

/// Largest Hilbert-space dimension the oracle will build.
pub const MAX_DIMENSION: usize = 4096;

/// Largest number of reservoir modes.
pub const MAX_MODES: usize = 3;

/// Doubling `n_max` must change every coherence by less than this.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Thermal initial states are included until this much weight is captured.
pub const THERMAL_WEIGHT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagator {
    /// Scaled Taylor series applied to the state vector (sparse H).
    Taylor,
    /// Dense `exp(−iHt)` by scaling and squaring, for small cross-checks.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockConfig {
    /// Starting photon cutoff per mode.
    pub n_max: usize,
    /// Minimum number of propagation sub-steps between consecutive output times.
    pub time_steps: usize,
    pub propagator: Propagator,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            n_max: 12,
            time_steps: 1,
            propagator: Propagator::Taylor,
        }
    }
}

pub fn dimension(n_max: usize, modes: usize) -> Option<usize> {
    (n_max + 1).checked_pow(modes as u32).and_then(|d| d.checked_mul(2))
}

impl FockConfig {
    pub fn validate(&self, modes: usize) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::invalid("n_max", "must be >= 1"));
        }
        if modes == 0 || modes > MAX_MODES {
            return Err(Error::invalid("modes", format!("oracle supports 1..={MAX_MODES} modes, got {modes}")));
        }
        let dim = dimension(self.n_max, modes).unwrap_or(usize::MAX);
        if dim > MAX_DIMENSION {
            return Err(Error::DimensionExceeded { dim, cap: MAX_DIMENSION });
        }
        Ok(())
    }
}

/// Sparse Hermitian matrix in row-compressed form.
struct SparseHamiltonian {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    /// Max absolute row sum, an upper bound on the spectral norm.
    norm: f64,
}

impl SparseHamiltonian {
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for r in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in self.row_start[r]..self.row_start[r + 1] {
                acc += self.vals[idx] * v[self.cols[idx]];
            }
            out[r] = acc;
        }
    }

    fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for idx in self.row_start[r]..self.row_start[r + 1] {
                m[(r, self.cols[idx])] += self.vals[idx];
            }
        }
        m
    }
}

/// Basis index = `qubit · D + Σ n_k (n_max+1)^k`, qubit 1 ↔ |1⟩ (σ_z = +1).
struct Basis {
    n_max: usize,
    modes: usize,
    mode_dim: usize,
}

impl Basis {
    fn new(n_max: usize, modes: usize) -> Self {
        Self {
            n_max,
            modes,
            mode_dim: (n_max + 1).pow(modes as u32),
        }
    }

    fn occupations(&self, mut m: usize) -> Vec<usize> {
        let mut occ = vec![0; self.modes];
        for slot in occ.iter_mut() {
            *slot = m % (self.n_max + 1);
            m /= self.n_max + 1;
        }
        occ
    }

    fn stride(&self, k: usize) -> usize {
        (self.n_max + 1).pow(k as u32)
    }
}

fn build_hamiltonian(res: &DiscreteReservoir, omega0: f64, basis: &Basis) -> SparseHamiltonian {
    let modes = res.modes();
    let dim = 2 * basis.mode_dim;
    let mut row_start = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut diag_lo = f64::INFINITY;
    let mut diag_hi = f64::NEG_INFINITY;
    let mut rows = Vec::with_capacity(dim);

    for qubit in 0..2usize {
        let sign = if qubit == 1 { 1.0 } else { -1.0 };
        for m in 0..basis.mode_dim {
            let occ = basis.occupations(m);
            let mut entries: Vec<(usize, Complex64)> = Vec::with_capacity(1 + 2 * modes.len());
            let mut diag = 0.5 * sign * omega0;
            for (k, mode) in modes.iter().enumerate() {
                diag += mode.omega * occ[k] as f64;
                let c = if qubit == 1 {
                    mode.upper_level_coupling()
                } else {
                    mode.lower_level_coupling()
                };
                let stride = basis.stride(k);
                // ⟨n| c b† |n−1⟩ = c sqrt(n)
                if occ[k] > 0 {
                    let col = qubit * basis.mode_dim + m - stride;
                    entries.push((col, c * (occ[k] as f64).sqrt()));
                }
                // ⟨n| c* b |n+1⟩ = c* sqrt(n+1)
                if occ[k] < basis.n_max {
                    let col = qubit * basis.mode_dim + m + stride;
                    entries.push((col, c.conj() * ((occ[k] + 1) as f64).sqrt()));
                }
            }
            diag_lo = diag_lo.min(diag);
            diag_hi = diag_hi.max(diag);
            entries.push((qubit * basis.mode_dim + m, Complex64::new(diag, 0.0)));
            rows.push(entries);
        }
    }

    // Centre the diagonal: a global energy shift only adds a global phase.
    let shift = 0.5 * (diag_lo + diag_hi);
    let mut norm: f64 = 0.0;
    for mut entries in rows {
        entries.sort_by_key(|(c, _)| *c);
        row_start.push(cols.len());
        let mut row_sum = 0.0;
        for (c, mut v) in entries {
            if c == row_start.len() - 1 {
                v -= shift;
            }
            row_sum += v.norm();
            cols.push(c);
            vals.push(v);
        }
        norm = norm.max(row_sum);
    }
    row_start.push(cols.len());
    SparseHamiltonian {
        dim,
        row_start,
        cols,
        vals,
        norm,
    }
}

/// `ψ ← exp(−i H dt) ψ` by `steps` Taylor sub-steps, each summed to machine precision.
fn taylor_propagate(h: &SparseHamiltonian, psi: &mut [Complex64], dt: f64, min_steps: usize) {
    if dt == 0.0 {
        return;
    }
    let steps = ((h.norm * dt.abs()).ceil() as usize).max(min_steps).max(1);
    let tau = dt / steps as f64;
    let minus_i_tau = Complex64::new(0.0, -tau);
    let mut term = vec![Complex64::new(0.0, 0.0); h.dim];
    let mut next = vec![Complex64::new(0.0, 0.0); h.dim];
    for _ in 0..steps {
        term.copy_from_slice(psi);
        let mut acc = psi.to_vec();
        for order in 1..60 {
            h.apply(&term, &mut next);
            let scale = minus_i_tau / order as f64;
            let mut size = 0.0f64;
            for (t, n) in term.iter_mut().zip(next.iter()) {
                *t = *n * scale;
                size = size.max(t.norm());
            }
            for (a, t) in acc.iter_mut().zip(term.iter()) {
                *a += *t;
            }
            if size < 1e-18 {
                break;
            }
        }
        psi.copy_from_slice(&acc);
    }
}

fn initial_state(basis: &Basis, occ: &[usize]) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); 2 * basis.mode_dim];
    let m: usize = occ.iter().enumerate().map(|(k, &n)| n * basis.stride(k)).sum();
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[m] = amp;
    psi[basis.mode_dim + m] = amp;
    psi
}

/// `⟨1|Tr_B|ψ⟩⟨ψ||0⟩ = Σ_m ψ(1,m) ψ(0,m)*`.
fn coherence_of(basis: &Basis, psi: &[Complex64]) -> Complex64 {
    (0..basis.mode_dim)
        .map(|m| psi[basis.mode_dim + m] * psi[m].conj())
        .sum()
}

/// Initial Fock configurations and their Boltzmann weights.
fn thermal_configurations(res: &DiscreteReservoir, n_max: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    let modes = res.modes();
    if res.is_zero_temperature() {
        return Ok(vec![(vec![0; modes.len()], 1.0)]);
    }
    let beta = res.beta();
    let per_mode_tol = THERMAL_WEIGHT_TOL / modes.len() as f64;
    let mut cutoffs = Vec::with_capacity(modes.len());
    for m in modes {
        // P(n > c) = e^{−βω(c+1)} ≤ per_mode_tol
        let c = ((-per_mode_tol.ln()) / (beta * m.omega)).ceil() as usize;
        if c >= n_max {
            return Err(Error::Domain(format!(
                "thermal occupation cutoff {c} not below n_max {n_max}; temperature too high for the oracle"
            )));
        }
        cutoffs.push(c);
    }
    let mut out = vec![(Vec::new(), 1.0)];
    for (m, &c) in modes.iter().zip(&cutoffs) {
        let x = (-beta * m.omega).exp();
        let mut grown = Vec::with_capacity(out.len() * (c + 1));
        for (occ, w) in &out {
            for n in 0..=c {
                let mut o: Vec<usize> = occ.clone();
                o.push(n);
                grown.push((o, w * (1.0 - x) * x.powi(n as i32)));
            }
        }
        out = grown;
    }
    Ok(out)
}

/// Coherences `⟨1|ρ_s(t)|0⟩` on a time grid at a fixed cutoff.
pub fn coherences_at_cutoff(
    res: &DiscreteReservoir,
    times: &[f64],
    omega0: f64,
    n_max: usize,
    cfg: &FockConfig,
) -> Result<Vec<Complex64>> {
    let modes = res.modes().len();
    FockConfig { n_max, ..*cfg }.validate(modes)?;
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("times", "must be non-negative and non-decreasing"));
    }
    let basis = Basis::new(n_max, modes);
    let h = build_hamiltonian(res, omega0, &basis);
    let dense = match cfg.propagator {
        Propagator::Dense => Some(h.to_dense()),
        Propagator::Taylor => None,
    };
    let mut total = vec![Complex64::new(0.0, 0.0); times.len()];
    for (occ, weight) in thermal_configurations(res, n_max)? {
        let psi0 = initial_state(&basis, &occ);
        match &dense {
            Some(hd) => {
                for (slot, &t) in total.iter_mut().zip(times) {
                    let u = (hd * Complex64::new(0.0, -t)).exp();
                    let psi = &u * nalgebra::DVector::from_vec(psi0.clone());
                    *slot += coherence_of(&basis, psi.as_slice()) * weight;
                }
            }
            None => {
                let mut psi = psi0;
                let mut now = 0.0;
                for (slot, &t) in total.iter_mut().zip(times) {
                    taylor_propagate(&h, &mut psi, t - now, cfg.time_steps);
                    now = t;
                    *slot += coherence_of(&basis, &psi) * weight;
                }
            }
        }
    }
    Ok(total)
}

/// Converged oracle output.
#[derive(Debug, Clone, PartialEq)]
pub struct FockRun {
    pub coherences: Vec<Complex64>,
    pub n_max_used: usize,
    /// Largest coherence change between the last two cutoffs.
    pub last_change: f64,
}

impl FockRun {
    pub fn states(&self) -> Vec<QubitState> {
        self.coherences
            .iter()
            .map(|c| QubitState {
                bloch: [2.0 * c.re, -2.0 * c.im, 0.0],
            })
            .collect()
    }
}

/// Largest cutoff whose basis fits in [`MAX_DIMENSION`].
fn largest_cutoff(modes: usize) -> usize {
    let mut n = 0;
    while dimension(n + 1, modes).is_some_and(|d| d <= MAX_DIMENSION) {
        n += 1;
    }
    n
}

/// Coherences on a time grid, doubling `n_max` until successive cutoffs agree
/// to [`CONVERGENCE_TOL`]. The last refinement is clamped to the largest
/// cutoff that fits the dimension cap.
pub fn fock_trajectory(res: &DiscreteReservoir, times: &[f64], omega0: f64, cfg: &FockConfig) -> Result<FockRun> {
    let modes = res.modes().len();
    cfg.validate(modes)?;
    let ceiling = largest_cutoff(modes);
    let mut n = cfg.n_max;
    let mut current = coherences_at_cutoff(res, times, omega0, n, cfg)?;
    loop {
        let next_n = (2 * n).min(ceiling);
        if next_n <= n {
            let dim = dimension(2 * n, modes).unwrap_or(usize::MAX);
            return Err(Error::DimensionExceeded { dim, cap: MAX_DIMENSION });
        }
        let next = coherences_at_cutoff(res, times, omega0, next_n, cfg)?;
        let change = current
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change < CONVERGENCE_TOL {
            return Ok(FockRun {
                coherences: next,
                n_max_used: next_n,
                last_change: change,
            });
        }
        if next_n == ceiling {
            return Err(Error::NotConverged { n_max: next_n, change });
        }
        n = next_n;
        current = next;
    }
}

/// Probe state at a single time from converged exact evolution.
pub fn fock_evolve(res: &DiscreteReservoir, t: f64, omega0: f64, cfg: &FockConfig) -> Result<QubitState> {
    let run = fock_trajectory(res, &[t], omega0, cfg)?;
    Ok(run.states()[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{gamma_discrete, phi_discrete, Frame};
    use crate::reservoir::DiscreteMode;
    use std::f64::consts::PI;

    fn closed_form(res: &DiscreteReservoir, t: f64, omega0: f64) -> Complex64 {
        let g = gamma_discrete(res, t).unwrap();
        let p = phi_discrete(res, t, omega0, Frame::Lab).unwrap();
        Complex64::from_polar(0.5 * (-g).exp(), -p)
    }

    #[test]
    fn free_qubit_precesses() {
        let m = DiscreteMode::real(1.0, 0.0, 0.0).unwrap();
        let r = DiscreteReservoir::zero_temperature(vec![m]).unwrap();
        let run = fock_trajectory(&r, &[0.0, 0.5, 2.0], 1.3, &FockConfig { n_max: 2, ..Default::default() }).unwrap();
        for (c, t) in run.coherences.iter().zip([0.0, 0.5, 2.0]) {
            assert!((c.norm() - 0.5).abs() < 1e-13);
            assert!((c - Complex64::from_polar(0.5, -1.3 * t)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_matches_closed_form() {
        let m = DiscreteMode::real(1.0, 0.1, 0.05).unwrap();
        let r = DiscreteReservoir::zero_temperature(vec![m]).unwrap();
        let s = fock_evolve(&r, PI, 0.0, &FockConfig::default()).unwrap();
        let c = s.coherence();
        assert!((2.0 * c.norm() - (-0.08f64).exp()).abs() < 1e-9);
        assert!((-c.arg() + 0.062_831_853).abs() < 1e-8);
    }

    #[test]
    fn two_incommensurate_modes() {
        let modes = vec![
            DiscreteMode::real(1.0, 0.1, 0.05).unwrap(),
            DiscreteMode::real(2f64.sqrt(), 0.07, -0.03).unwrap(),
        ];
        let r = DiscreteReservoir::zero_temperature(modes).unwrap();
        let run = fock_trajectory(&r, &[2.0], 0.4, &FockConfig::default()).unwrap();
        assert!((run.coherences[0] - closed_form(&r, 2.0, 0.4)).norm() < 1e-6);
    }

    #[test]
    fn dense_and_taylor_propagators_agree() {
        let modes = vec![
            DiscreteMode::new(1.0, Complex64::new(0.2, 0.1), Complex64::new(-0.1, 0.15)).unwrap(),
            DiscreteMode::real(1.7, 0.12, 0.2).unwrap(),
        ];
        let r = DiscreteReservoir::zero_temperature(modes).unwrap();
        let times = [0.3, 1.1, 4.0];
        let taylor = coherences_at_cutoff(&r, &times, 0.2, 6, &FockConfig::default()).unwrap();
        let dense = coherences_at_cutoff(
            &r,
            &times,
            0.2,
            6,
            &FockConfig { propagator: Propagator::Dense, ..Default::default() },
        )
        .unwrap();
        for (a, b) in taylor.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn thermal_single_mode_matches_coth_factor() {
        let m = DiscreteMode::real(1.0, 0.08, 0.05).unwrap();
        let r = DiscreteReservoir::thermal(vec![m], 3.0).unwrap();
        let times = [0.7, 2.5];
        let run = fock_trajectory(&r, &times, 0.0, &FockConfig { n_max: 24, ..Default::default() }).unwrap();
        for (c, &t) in run.coherences.iter().zip(&times) {
            assert!((c - closed_form(&r, t, 0.0)).norm() < 1e-7, "t={t}: {c} vs {}", closed_form(&r, t, 0.0));
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let modes = vec![DiscreteMode::real(1.0, 0.1, 0.0).unwrap(); 3];
        let r = DiscreteReservoir::zero_temperature(modes).unwrap();
        let err = fock_trajectory(&r, &[1.0], 0.0, &FockConfig { n_max: 15, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::DimensionExceeded { .. }));
        let four = vec![DiscreteMode::real(1.0, 0.1, 0.0).unwrap(); 4];
        let r = DiscreteReservoir::zero_temperature(four).unwrap();
        assert!(fock_trajectory(&r, &[1.0], 0.0, &FockConfig::default()).is_err());
    }

    #[test]
    fn final_refinement_clamps_to_the_dimension_cap() {
        let modes = vec![
            DiscreteMode::real(1.0, 0.5, 0.4).unwrap(),
            DiscreteMode::real(1.0, 0.5, 0.4).unwrap(),
        ];
        let r = DiscreteReservoir::zero_temperature(modes).unwrap();
        let times = [PI];
        let run = fock_trajectory(&r, &times, 0.0, &FockConfig::default()).unwrap();
        assert_eq!(run.n_max_used, 44, "{run:?}");
        assert!((run.coherences[0] - closed_form(&r, PI, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn truncation_error_decreases_with_cutoff() {
        let m = DiscreteMode::real(1.0, 0.3, 0.25).unwrap();
        let r = DiscreteReservoir::zero_temperature(vec![m]).unwrap();
        let t = 2.2;
        let exact = closed_form(&r, t, 0.0);
        let errors: Vec<f64> = [2, 4, 8, 16]
            .iter()
            .map(|&n| (coherences_at_cutoff(&r, &[t], 0.0, n, &FockConfig::default()).unwrap()[0] - exact).norm())
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    }
}
