use thiserror::Error;

/// Failure modes of the dense kernels.
///
/// Numeric payloads are reported as `f64` regardless of the scalar type the
/// kernel ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must have dimension at least 1")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric (max |m - m^T| = {asymmetry:e}, allowed {allowed:e})")]
    NotSymmetric { asymmetry: f64, allowed: f64 },
    #[error("matrix is not positive definite (eigenvalue {eigenvalue:e}, largest {largest:e})")]
    NotPositiveDefinite { eigenvalue: f64, largest: f64 },
    #[error("spectrum is not strictly positive (eigenvalue {re:e} + {im:e}i)")]
    NonPositiveSpectrum { re: f64, im: f64 },
    #[error("iteration did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("spectra of a and -b are not separated (min |lambda + mu| = {separation:e}, required {required:e})")]
    SpectraOverlap { separation: f64, required: f64 },
    #[error("matrix is singular to working precision")]
    SingularMatrix,
}
