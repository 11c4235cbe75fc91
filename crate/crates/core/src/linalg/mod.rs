//! Dense kernels for small systems: symmetric eigen-decomposition, real Schur
//! form, matrix square roots and Sylvester solvers.

mod eigen;
mod error;
mod matrix;
mod schur;
mod sqrt;
mod sylvester;
mod tolerance;

pub use eigen::{eig_sym, eig_sym_with, SpectralDecomposition};
pub use error::LinalgError;
pub use matrix::{Lu, Matrix};
pub use schur::{eigenvalues, real_schur, RealSchur};
pub use sqrt::{
    j_weighted_sqrt, positive_sqrt, spd_inv_sqrt, spd_inv_sqrt_with, spd_sqrt, spd_sqrt_with,
    WeightedRoot,
};
pub use sylvester::{
    solve_sylvester_general, solve_sylvester_general_with, solve_sylvester_sym,
    solve_sylvester_sym_with, sylvester_residual,
};
pub use tolerance::ToleranceConfig;
