use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("charge cutoff n_max = {0} is too small (need n_max >= 1)")]
    CutoffTooSmall(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error("parity label required for excited level n = {0}")]
    ParityMissing(usize),

    #[error("chain has no junctions")]
    EmptyChain,

    #[error("monotone interval {index} [{lo}, {hi}] is invalid: {reason}")]
    Decomposition {
        index: usize,
        lo: f64,
        hi: f64,
        reason: String,
    },

    #[error("quadrature did not converge: error estimate {achieved:e} vs requested {requested:e} after {subdivisions} subdivisions")]
    Quadrature {
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    #[error("principal-value pole {pole} lies on or outside the interval [{a}, {b}]")]
    PoleOnBoundary { pole: f64, a: f64, b: f64 },

    #[error("ODE step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("truncated distribution has negligible mass above the bound (mass {0:e})")]
    Truncation(f64),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Quadrature { .. } | Error::StepUnderflow { .. } | Error::Io(_)
        )
    }
}
