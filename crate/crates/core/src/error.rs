use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input vector has norm below `1e-14`.
    ZeroVector,
    /// Amplitudes were expected to be normalized but are not.
    NotNormalized { norm: f64 },
    EmptySet,
    DimensionMismatch { expected: usize, found: usize },
    /// The copy count must be at least 2.
    InvalidCopies(usize),
    /// Efficiency outside `[0, 1]` or not finite.
    InvalidEfficiency(f64),
    /// The Gram matrix `X^(1)` is not positive-definite.
    DependentSet { min_eigenvalue: f64 },
    /// `X^(1) − η X^(m)` has a negative eigenvalue.
    Infeasible { eta: f64, min_eigenvalue: f64 },
    /// Gram-Schmidt residual norm at (1-based) step `step` fell below tolerance.
    NearDependent { step: usize, residual: f64 },
    /// Transport targets do not reproduce the inner products of the originals.
    GramMismatch { residual: f64 },
    NotOrthonormal { residual: f64 },
    IndexOutOfRange { index: usize, len: usize },
    /// Parts passed to a constructor have inconsistent shapes.
    Malformed(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroVector => write!(f, "state vector has zero norm"),
            Error::NotNormalized { norm } => write!(f, "state vector is not normalized (norm {norm:e})"),
            Error::EmptySet => write!(f, "state set is empty"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidCopies(m) => write!(f, "copy count must be at least 2, got {m}"),
            Error::InvalidEfficiency(eta) => write!(f, "efficiency must lie in [0, 1], got {eta}"),
            Error::DependentSet { min_eigenvalue } => write!(
                f,
                "states are linearly dependent (minimum Gram eigenvalue {min_eigenvalue:e})"
            ),
            Error::Infeasible { eta, min_eigenvalue } => write!(
                f,
                "efficiency {eta} is infeasible (minimum eigenvalue of X1 - eta*Xm is {min_eigenvalue:e})"
            ),
            Error::NearDependent { step, residual } => {
                write!(f, "vector {step} is numerically dependent on its predecessors (residual {residual:e})")
            }
            Error::GramMismatch { residual } => {
                write!(f, "target inner products do not match the originals (residual {residual:e})")
            }
            Error::NotOrthonormal { residual } => {
                write!(f, "family is not orthonormal (residual {residual:e})")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for {len} states")
            }
            Error::Malformed(what) => write!(f, "malformed input: {what}"),
        }
    }
}

impl core::error::Error for Error {}
