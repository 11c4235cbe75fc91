//! Derivation of truncated transparent boundary operators.

mod coefficients;
mod derive;
mod hyperbolicity;

pub use coefficients::{tangential_derivative_of_root, SystemCoefficients};
pub use derive::{
    derive_operator, derive_operator_with, derive_p, derive_p1, derive_q, evaluate_symbol,
    to_resolved_form, TtbcOperator,
};
pub use hyperbolicity::{validate_hyperbolicity, validate_hyperbolicity_with, HyperbolicityReport};

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeriveError {
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("system is not hyperbolic: {message}")]
    NotHyperbolic {
        message: String,
        eigenvalues: Vec<f64>,
        degenerate_indices: Vec<usize>,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
