//! Truncated transparent boundary conditions (TTBCs) for second-order
//! hyperbolic systems
//!
//! ```text
//! -J u_tt + A u_nn + (B . grad_tau) u_n + C u_n + ... = 0
//! ```
//!
//! A TTBC is the local part of the exact transparent condition at a boundary
//! point, `P1 u_t - u_n + (p + q . grad_tau) u = 0`. [`derive_operator`] computes
//! `P1`, `p` and `q` from the coefficient matrices; [`models`] builds those
//! matrices for the scalar wave equation, cylindrically orthotropic elasticity
//! and isotropic Biot poroelasticity; [`harness`] closes scalar-wave
//! finite-difference domains with a derived operator and measures what comes
//! back.
//!
//! The linear algebra and the derivation are generic over [`Real`]; the
//! aliases below fix the scalar to `f64` or `f32`.

// `!(x > 0)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod linalg;
pub mod models;
pub mod operator;
mod scalar;

pub use linalg::{LinalgError, Matrix, ToleranceConfig};
pub use models::{
    build_biot, build_ortho_cyl, build_scalar_wave, closed_form_ortho_operator, reduce_degenerate,
    BiotCartesian, Geometry, ModelError, ModelSpec, OrthoCylElastic, ScalarWave,
};
pub use operator::{
    derive_operator, derive_operator_with, derive_p, derive_p1, derive_q, evaluate_symbol,
    to_resolved_form, validate_hyperbolicity, DeriveError, HyperbolicityReport, SystemCoefficients,
    TtbcOperator,
};
pub use scalar::Real;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type SystemCoefficients64 = SystemCoefficients<f64>;
pub type SystemCoefficients32 = SystemCoefficients<f32>;
pub type TtbcOperator64 = TtbcOperator<f64>;
pub type TtbcOperator32 = TtbcOperator<f32>;
pub type ModelSpec64 = ModelSpec<f64>;
pub type HyperbolicityReport64 = HyperbolicityReport<f64>;
pub type ToleranceConfig64 = ToleranceConfig<f64>;
