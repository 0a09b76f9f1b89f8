use thiserror::Error;

/// Errors produced by the model, quadrature, metrology and oracle layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("diluteness violated: sqrt(n a_B^3) = {value:.4} exceeds bound {bound} (a_B = {a_b:e} m)")]
    Diluteness { value: f64, bound: f64, a_b: f64 },

    #[error("probe decoupled: a1 == a0 gives vanishing coupling g_k")]
    ProbeDecoupled,

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {evaluations} evaluations: \
         estimate {estimate:e}, error bound {error:e}"
    )]
    QuadratureLimit {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("plateau not reached: last relative variation {variation:.3e} at t_end = {t_end:e} s")]
    PlateauNotReached { variation: f64, t_end: f64 },

    #[error("finite-difference step underflow at a_B = {0:e}")]
    StepUnderflow(f64),

    #[error("Hilbert space dimension {dim} exceeds cap {cap}")]
    DimensionExceeded { dim: usize, cap: usize },

    #[error("truncated evolution not converged at n_max = {n_max}: change {change:e}")]
    NotConverged { n_max: usize, change: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
