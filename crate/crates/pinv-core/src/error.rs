use core::fmt;

/// Errors reported by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix with zero rows or columns where data is required.
    EmptyMatrix,
    /// Non-finite entry (NaN or infinity) encountered on construction.
    NotFinite,
    /// Operand shapes do not conform.
    ShapeMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Input expected to be symmetric is not, beyond tolerance.
    NotSymmetric,
    /// An operation that requires a nonzero matrix received the zero matrix.
    ZeroMatrix,
    /// Sketch size out of range for the ambient dimension.
    TauOutOfRange { tau: usize, ambient: usize },
    /// A per-coordinate probability is zero or negative.
    ZeroProbability,
    /// Probabilities malformed (negative, or do not sum to one).
    BadDistribution,
    /// All sketch directions carry zero trace weight.
    DegenerateDistribution,
    /// Problem dimension exceeds the analysis cap.
    AnalysisCap { dim: usize, cap: usize },
    /// Solver configuration rejected at validation.
    InvalidConfig(&'static str),
    /// Newton-Schulz phase of the hybrid method diverged.
    Diverged { iteration: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyMatrix => write!(f, "empty matrix"),
            Error::NotFinite => write!(f, "non-finite entry"),
            Error::ShapeMismatch {
                context,
                left,
                right,
            } => write!(
                f,
                "shape mismatch in {context}: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::NotSymmetric => write!(f, "not symmetric"),
            Error::ZeroMatrix => write!(f, "zero matrix"),
            Error::TauOutOfRange { tau, ambient } => {
                write!(f, "tau exceeds dimension: tau={tau}, ambient={ambient}")
            }
            Error::ZeroProbability => write!(f, "probability entries must be strictly positive"),
            Error::BadDistribution => write!(f, "probabilities must be non-negative and sum to 1"),
            Error::DegenerateDistribution => write!(f, "distribution degenerate"),
            Error::AnalysisCap { dim, cap } => {
                write!(f, "analysis cap: dimension {dim} exceeds cap {cap}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Diverged { iteration } => {
                write!(
                    f,
                    "residual increased for 5 consecutive Newton-Schulz steps (iteration {iteration})"
                )
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
