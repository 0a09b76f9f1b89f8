//! Independent reference computations: exact truncated-Fock evolution and
//! Fisher information evaluated numerically from density matrices.

pub mod fisher;
pub mod fock;
pub mod suite;

pub use fisher::{classical_fisher_outcomes, outcome_probability, qfi_numeric};
pub use fock::{fock_evolve, fock_trajectory, FockConfig, FockRun, Propagator};
pub use suite::{run_suite, OracleReport, SuiteOptions};
