//! Discrete bosonic reservoirs coupled to the probe through `σ_z g_k` and the
//! state-independent displacement `ξ_k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One reservoir mode with its `σ_z` coupling `g` and displacement amplitude `xi`.
///
/// All quantities are angular frequencies in one consistent unit (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMode {
    pub omega: f64,
    pub g: Complex64,
    pub xi: Complex64,
}

impl DiscreteMode {
    pub fn new(omega: f64, g: Complex64, xi: Complex64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
        }
        if !(g.re.is_finite() && g.im.is_finite() && xi.re.is_finite() && xi.im.is_finite()) {
            return Err(Error::invalid("coupling", "g and xi must be finite"));
        }
        Ok(Self { omega, g, xi })
    }

    pub fn real(omega: f64, g: f64, xi: f64) -> Result<Self> {
        Self::new(omega, Complex64::new(g, 0.0), Complex64::new(xi, 0.0))
    }

    /// Build from the level-resolved couplings `g_{k0}` (probe in |0⟩) and `g_{k1}` (probe in |1⟩).
    pub fn from_level_couplings(omega: f64, g0: Complex64, g1: Complex64) -> Result<Self> {
        Self::new(omega, (g1 - g0) * 0.5, (g1 + g0) * 0.5)
    }

    /// `g_{k0} = ξ_k − g_k`.
    pub fn lower_level_coupling(&self) -> Complex64 {
        self.xi - self.g
    }

    /// `g_{k1} = ξ_k + g_k`.
    pub fn upper_level_coupling(&self) -> Complex64 {
        self.xi + self.g
    }

    /// True when `g_{k0} = −g_{k1}`, i.e. no displacement term.
    pub fn is_antisymmetric(&self) -> bool {
        self.xi == Complex64::new(0.0, 0.0)
    }
}

/// Reservoir modes plus the inverse temperature of their initial thermal state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteReservoir {
    modes: Vec<DiscreteMode>,
    /// `+∞` encodes zero temperature.
    beta: f64,
}

impl DiscreteReservoir {
    pub fn zero_temperature(modes: Vec<DiscreteMode>) -> Result<Self> {
        Self::thermal(modes, f64::INFINITY)
    }

    pub fn thermal(modes: Vec<DiscreteMode>, beta: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("modes", "reservoir needs at least one mode"));
        }
        if !(beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be > 0 or +inf, got {beta}")));
        }
        Ok(Self { modes, beta })
    }

    pub fn modes(&self) -> &[DiscreteMode] {
        &self.modes
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }

    /// Thermal enhancement `coth(βω/2)`, written as `1 + 2/(e^{βω} − 1)`.
    pub fn thermal_factor(&self, omega: f64) -> f64 {
        if self.is_zero_temperature() {
            1.0
        } else {
            1.0 + 2.0 / (self.beta * omega).exp_m1()
        }
    }
}
