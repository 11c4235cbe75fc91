use serde::{Deserialize, Serialize};

use super::DeriveError;
use crate::linalg::{positive_sqrt, LinalgError, Matrix, ToleranceConfig, WeightedRoot};
use crate::Real;

/// Coefficients of one boundary point of
/// `-J u_tt + A u_nn + (B . grad_tau) u_n + C u_n + ... = 0`.
///
/// Terms without a normal derivative do not enter the truncated operator and
/// are not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemCoefficients<T: Real> {
    a: Matrix<T>,
    b: Vec<Matrix<T>>,
    c0: Matrix<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<Matrix<T>>,
    d_tau: Vec<Matrix<T>>,
}

impl<T: Real> SystemCoefficients<T> {
    /// Uniform coefficients with identity mass matrix. `b` holds one matrix per
    /// tangential coordinate (1 or 2).
    pub fn new(a: Matrix<T>, b: Vec<Matrix<T>>, c0: Matrix<T>) -> Result<Self, DeriveError> {
        Self::with_parts(a, b, c0, None, None, &ToleranceConfig::default())
    }

    /// Full constructor.
    ///
    /// `d_tau[i]` is the derivative along tangential coordinate `i` of the
    /// matrix `L` whose negative is `P1` (`A^{-1/2}`, or `(J^{-1} A)^{-1/2}`
    /// with a mass matrix). Missing derivatives are zero.
    pub fn with_parts(
        a: Matrix<T>,
        b: Vec<Matrix<T>>,
        c0: Matrix<T>,
        j: Option<Matrix<T>>,
        d_tau: Option<Vec<Matrix<T>>>,
        tol: &ToleranceConfig<T>,
    ) -> Result<Self, DeriveError> {
        let n = a.dim();
        let dims = b.len();
        if !(1..=2).contains(&dims) {
            return Err(DeriveError::InvalidCoefficients(format!(
                "expected 1 or 2 tangential coefficient matrices, got {dims}"
            )));
        }
        let d_tau = d_tau.unwrap_or_else(|| vec![Matrix::zeros(n); dims]);
        if d_tau.len() != dims {
            return Err(DeriveError::InvalidCoefficients(format!(
                "expected {dims} tangential derivative matrices, got {}",
                d_tau.len()
            )));
        }
        let all = std::iter::once(&a)
            .chain(&b)
            .chain(std::iter::once(&c0))
            .chain(&d_tau)
            .chain(j.as_ref());
        for m in all {
            if m.dim() != n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                }
                .into());
            }
            if !m.is_finite() {
                return Err(DeriveError::InvalidCoefficients(
                    "non-finite coefficient entry".into(),
                ));
            }
        }
        if let Some(j) = &j {
            j.check_symmetric(tol.symmetry)?;
        }
        let standard = j.is_none() && a.check_symmetric(tol.symmetry).is_ok();
        if standard {
            for (i, d) in d_tau.iter().enumerate() {
                if d.check_symmetric(tol.symmetry).is_err() {
                    return Err(DeriveError::InvalidCoefficients(format!(
                        "tangential derivative {i} of A^(-1/2) must be symmetric"
                    )));
                }
            }
        }
        Ok(Self { a, b, c0, j, d_tau })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn tangential_dims(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[Matrix<T>] {
        &self.b
    }

    pub fn c0(&self) -> &Matrix<T> {
        &self.c0
    }

    pub fn mass(&self) -> Option<&Matrix<T>> {
        self.j.as_ref()
    }

    pub fn d_tau(&self) -> &[Matrix<T>] {
        &self.d_tau
    }

    /// Restriction to the components in `keep` (sorted, distinct).
    pub fn restrict(&self, keep: &[usize]) -> Self {
        Self {
            a: self.a.submatrix(keep),
            b: self.b.iter().map(|m| m.submatrix(keep)).collect(),
            c0: self.c0.submatrix(keep),
            j: self.j.as_ref().map(|m| m.submatrix(keep)),
            d_tau: self.d_tau.iter().map(|m| m.submatrix(keep)).collect(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
struct RawCoefficients<T: Real> {
    a: Matrix<T>,
    b: Vec<Matrix<T>>,
    c0: Matrix<T>,
    #[serde(default)]
    j: Option<Matrix<T>>,
    #[serde(default)]
    d_tau: Option<Vec<Matrix<T>>>,
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for SystemCoefficients<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawCoefficients::<T>::deserialize(deserializer)?;
        Self::with_parts(
            raw.a,
            raw.b,
            raw.c0,
            raw.j,
            raw.d_tau,
            &ToleranceConfig::default(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Central-difference estimate of the tangential derivative of `L`
/// (`A^{-1/2}`, or `(J^{-1} A)^{-1/2}` when `j` is given) from coefficient
/// samples at `tau - delta` and `tau + delta`.
pub fn tangential_derivative_of_root<T: Real>(
    a_minus: &Matrix<T>,
    a_plus: &Matrix<T>,
    delta: T,
    j: Option<&Matrix<T>>,
    tol: &ToleranceConfig<T>,
) -> Result<Matrix<T>, DeriveError> {
    if !(delta > T::zero()) {
        return Err(DeriveError::InvalidCoefficients(
            "finite-difference step must be positive".into(),
        ));
    }
    let lm = inverse_root(a_minus, j, tol)?;
    let lp = inverse_root(a_plus, j, tol)?;
    Ok((&lp - &lm).scale(T::one() / (delta + delta)))
}

/// `A^{-1/2}`, or `(J^{-1} A)^{-1/2}` with a mass matrix; non-symmetric `A`
/// goes through the Schur square root.
pub(crate) fn inverse_root<T: Real>(
    a: &Matrix<T>,
    j: Option<&Matrix<T>>,
    tol: &ToleranceConfig<T>,
) -> Result<Matrix<T>, DeriveError> {
    let symmetric = a.check_symmetric(tol.symmetry).is_ok();
    match (j, symmetric) {
        (None, true) => Ok(crate::linalg::spd_inv_sqrt_with(a, tol)?),
        (Some(j), true) => Ok(WeightedRoot::new(j, a, tol)?.inv_sqrt()),
        (j, false) => {
            let target = match j {
                Some(j) => &j.inverse()? * a,
                None => a.clone(),
            };
            Ok(positive_sqrt(&target, tol)?.inverse()?)
        }
    }
}
