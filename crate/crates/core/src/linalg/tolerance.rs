use serde::{Deserialize, Serialize};

use crate::Real;

/// Relative tolerances shared by every kernel and by the derivation pipeline.
///
/// All values are relative to the norms of the inputs they are applied to.
/// The defaults are clamped from below by a small multiple of machine epsilon
/// so that single precision stays usable; in `f64` the clamp never binds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    default,
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct ToleranceConfig<T> {
    /// Allowed `max |m - m^T|` relative to `max |m|`.
    pub symmetry: T,
    /// A symmetric matrix counts as positive definite when `lambda_min > definiteness * lambda_max`.
    pub definiteness: T,
    /// Relative residual bound checked by verification routines.
    pub residual: T,
    /// Minimum `|lambda_i + mu_j|` relative to `|a|_F + |b|_F` for the general Sylvester solver.
    pub separation: T,
    /// Rows/columns of `a` below `degenerate * max|a|` count as absent.
    pub degenerate: T,
}

impl<T: Real> ToleranceConfig<T> {
    fn clamp(value: f64) -> T {
        let floor = T::epsilon() * T::lit(64.0);
        T::lit(value).max(floor)
    }

    /// Multiplies every tolerance by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            symmetry: self.symmetry * factor,
            definiteness: self.definiteness * factor,
            residual: self.residual * factor,
            separation: self.separation * factor,
            degenerate: self.degenerate * factor,
        }
    }
}

impl<T: Real> Default for ToleranceConfig<T> {
    fn default() -> Self {
        Self {
            symmetry: Self::clamp(1e-10),
            definiteness: Self::clamp(1e-12),
            residual: Self::clamp(1e-10),
            separation: Self::clamp(1e-10),
            degenerate: Self::clamp(1e-12),
        }
    }
}
