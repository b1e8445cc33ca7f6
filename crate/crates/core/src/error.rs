use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be positive")]
    EmptyMatrix,

    #[error("expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: |a[{row}][{col}] - conj(a[{col}][{row}])| = {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("point {point} is outside the domain (gamma = {gamma}, {gamma}..inf)")]
    OutOfDomain { point: f64, gamma: f64 },

    #[error("eigenvalue {eigenvalue} lies outside the domain ({gamma}, inf)")]
    SpectrumOutOfDomain { eigenvalue: f64, gamma: f64 },

    #[error("function is not admissible: {0}")]
    AdmissibilityViolation(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("invalid function specifier `{spec}`: {reason}")]
    InvalidFunctionSpec { spec: String, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("x and y coincide ({0}); a witness needs two distinct spectral points")]
    DegeneratePair(f64),

    #[error("matrix has no negative eigenvalue (smallest is {0:e})")]
    NoNegativeDirection(f64),

    #[error("no step t0 on the search grid gives a positive margin for (x, y) = ({x}, {y})")]
    WitnessSearchFailed { x: f64, y: f64 },

    #[error("matrix is numerically scalar (spectral width {width:e} <= {tolerance:e})")]
    NumericallyScalar { width: f64, tolerance: f64 },

    #[error("matrices do not commute (||AB - BA||_F = {0:e})")]
    NotCommuting(f64),

    #[error("matrices are not ordered (smallest eigenvalue of B - A is {0:e})")]
    NotOrdered(f64),

    #[error("constructed certificate failed re-verification: {0}")]
    CertificateRejected(String),
}

impl Error {
    /// True for errors caused by floating point breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NoNegativeDirection(_)
                | Error::WitnessSearchFailed { .. }
                | Error::CertificateRejected(_)
        )
    }
}
