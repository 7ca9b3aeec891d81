//! Error type shared across the crate.

/// Error type for matrix, algebra-map, Lip-norm, and state-distance operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Data length does not match the declared dimensions.
    LengthMismatch { expected: usize, got: usize },
    /// A matrix entry is NaN or infinite.
    NonFiniteEntry { row: usize, col: usize },
    /// Dimensions do not match for the operation.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// Matrix must be square for this operation.
    NotSquare { n_rows: usize, n_cols: usize },
    /// Matrix deviates from its conjugate transpose beyond tolerance.
    NotHermitian { deviation: f64, tolerance: f64 },
    /// Matrix fails the unitarity test beyond tolerance.
    NotUnitary { deviation: f64, tolerance: f64 },
    /// 1-based index outside `1..=n`.
    IndexOutOfRange { index: usize, n: usize },
    /// `k` does not divide `n` (or is outside `1..=n`).
    NotADivisor { k: usize, n: usize },
    /// Parameters fail the `k | n`, `1 < k < n` requirement.
    InvalidDivisorVariant { k: usize, n: usize },
    /// Seminorm parameters are out of range (e.g. `n < 2`).
    InvalidLipSpec { n: usize, reason: &'static str },
    /// Eigensolver did not reach the off-diagonal threshold within its sweep budget.
    EighNoConvergence { sweeps: usize, off_diagonal: f64 },
    /// Candidate density matrix has an eigenvalue below the admission floor.
    NotPositiveSemidefinite { min_eigenvalue: f64, tolerance: f64 },
    /// Candidate density matrix has trace away from one.
    TraceNotOne { trace: f64, tolerance: f64 },
    /// Diagonal-oracle input must sum to zero.
    NonZeroSumDelta { sum: f64, tolerance: f64 },
    /// Matrix file could not be parsed.
    FileFormat { message: String },
    /// Underlying I/O failure.
    Io { message: String },
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::LengthMismatch { expected, got } => {
                write!(f, "entry length mismatch: expected {expected}, got {got}")
            }
            Error::NonFiniteEntry { row, col } => {
                write!(f, "non-finite entry at row {row}, column {col}")
            }
            Error::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::NotSquare { n_rows, n_cols } => {
                write!(f, "matrix must be square, got {n_rows}x{n_cols}")
            }
            Error::NotHermitian {
                deviation,
                tolerance,
            } => write!(
                f,
                "matrix is not Hermitian: max |a - a*| entry = {deviation:.3e} exceeds {tolerance:.3e}"
            ),
            Error::NotUnitary {
                deviation,
                tolerance,
            } => write!(
                f,
                "matrix is not unitary: max |U*U - I| entry = {deviation:.3e} exceeds {tolerance:.3e}"
            ),
            Error::IndexOutOfRange { index, n } => {
                write!(f, "index {index} outside 1..={n}")
            }
            Error::NotADivisor { k, n } => write!(f, "k = {k} must divide n = {n}"),
            Error::InvalidDivisorVariant { k, n } => write!(
                f,
                "divisor variant requires k | n with 1 < k < n, got k = {k}, n = {n}"
            ),
            Error::InvalidLipSpec { n, reason } => {
                write!(f, "invalid Lip-norm parameters at n = {n}: {reason}")
            }
            Error::EighNoConvergence {
                sweeps,
                off_diagonal,
            } => write!(
                f,
                "eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:.3e})"
            ),
            Error::NotPositiveSemidefinite {
                min_eigenvalue,
                tolerance,
            } => write!(
                f,
                "density matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} below -{tolerance:.3e}"
            ),
            Error::TraceNotOne { trace, tolerance } => write!(
                f,
                "density matrix trace {trace:.12} differs from 1 beyond {tolerance:.3e}"
            ),
            Error::NonZeroSumDelta { sum, tolerance } => write!(
                f,
                "oracle input must sum to zero: got {sum:.3e} (tolerance {tolerance:.3e})"
            ),
            Error::FileFormat { message } => write!(f, "matrix file format: {message}"),
            Error::Io { message } => write!(f, "i/o: {message}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io {
            message: e.to_string(),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
