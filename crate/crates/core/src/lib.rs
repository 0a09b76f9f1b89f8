//! Dephasing-qubit probes of bosonic reservoirs, with a Bose-Einstein
//! condensate as the worked continuum case.
//!
//! The crate evaluates the decay and phase factors `Γ(t)`, `Φ(t)` of a qubit
//! coupled through `σ_z` to a reservoir (discrete modes in closed form, the
//! condensate by oscillatory quadrature over Bogoliubov modes), the quantum
//! and classical Fisher information for estimating a reservoir parameter, and
//! independent oracles used to check all of the above.

pub mod bec;
pub mod config;
pub mod constants;
pub mod derivative;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod metrology;
pub mod oracle;
pub mod quadrature;
pub mod reservoir;
pub mod special;

pub use bec::{bogoliubov_dispersion, build_bec_model, BecParameters, BecReservoirModel, DerivedBecQuantities};
pub use derivative::{derivative_wrt_param, DerivativeMethod, Functional};
pub use dynamics::{
    evolve_state, gamma_bec, gamma_bec_stationary, gamma_discrete, phase_secular_coefficient, phi_bec,
    phi_discrete, EncodingTrajectory, Frame, QubitState,
};
pub use error::{Error, Result};
pub use estimation::{
    encoding_derivatives, eta_plateau, eta_star, eta_star_asymptotic, sweep, EtaPlateau, EtaStar, PlateauOptions,
    SensingPoint,
};
pub use metrology::{
    eta, fisher_of_measurement, optimal_angle, qfi_dephasing, qfi_from_bloch, qsnr, relative_error,
    EncodingDerivatives, EstimationReport, QfiDecomposition,
};
pub use quadrature::{integrate_adaptive, integrate_oscillatory, QuadratureOptions, QuadratureResult};
pub use reservoir::{DiscreteMode, DiscreteReservoir};

/// Library version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use num_complex::Complex64;
