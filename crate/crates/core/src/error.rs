use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Ways the sign conditions on `𝓛u − ru` can fail.
#[derive(Debug, Clone, PartialEq)]
pub enum AssumptionFailure {
    /// `𝓛⁺u − ru` never changes sign on the searched interval.
    NoThreshold {
        search_hi: f64,
    },
    /// More than one sign change was seen on the scan grid.
    NonMonotoneSign {
        crossings: Vec<f64>,
    },
    /// The single sign change goes from `−` to `+`.
    WrongDirection {
        near: f64,
    },
    Other(String),
}

impl std::fmt::Display for AssumptionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AssumptionFailure::NoThreshold { search_hi } => {
                write!(f, "no sign change of L+u - ru below {search_hi} (no threshold A)")
            }
            AssumptionFailure::NonMonotoneSign { crossings } => {
                write!(f, "L+u - ru changes sign {} times (near {:?})", crossings.len(), crossings)
            }
            AssumptionFailure::WrongDirection { near } => {
                write!(f, "L+u - ru changes sign from - to + near {near}")
            }
            AssumptionFailure::Other(msg) => f.write_str(msg),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("x = {x} is outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("volatility is not strictly positive at x = {x} (sigma = {sigma})")]
    Ellipticity { x: f64, sigma: f64 },

    #[error("assumption violated: {0}")]
    Assumption(AssumptionFailure),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("far-field truncation at x_max = {x_max} is too small: {reason}")]
    TruncationTooSmall { x_max: f64, reason: String },

    /// A residual never changed sign over the searched range. `samples` holds
    /// the `(candidate, residual)` pairs that were tried.
    #[error("no bracket for {what} on [{lo}, {hi}]")]
    NoBracket { what: &'static str, lo: f64, hi: f64, samples: Vec<(f64, f64)> },

    #[error("solution has invalid shape: {0}")]
    InvalidShape(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("simulation failure: {0}")]
    Simulation(String),

    #[error("cannot plot: {0}")]
    Plot(String),
}
