use serde::{Deserialize, Serialize};

use super::coefficients::inverse_root;
use super::hyperbolicity::validate_hyperbolicity_with;
use super::{DeriveError, SystemCoefficients};
use crate::linalg::{
    solve_sylvester_general_with, solve_sylvester_sym_with, LinalgError, Matrix, ToleranceConfig,
};
use crate::Real;

/// Truncated transparent boundary operator at one boundary point:
///
/// ```text
/// P1 u_t - u_n + (p + sum_i q_i d/dtau_i) u = 0
/// ```
///
/// together with the form resolved for the time derivative,
/// `u_t - p1 u_n + (p0 + sum_i q0_i d/dtau_i) u = 0` with `p1 = P1^{-1}`,
/// `p0 = P1^{-1} p`, `q0_i = P1^{-1} q_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TtbcOperator<T: Real> {
    p1: Matrix<T>,
    p_alg: Matrix<T>,
    q: Vec<Matrix<T>>,
    resolved_p1: Matrix<T>,
    resolved_p_alg: Matrix<T>,
    resolved_q: Vec<Matrix<T>>,
}

impl<T: Real> TtbcOperator<T> {
    /// Builds the operator and fills the resolved form from `p1`.
    pub fn from_parts(
        p1: Matrix<T>,
        p_alg: Matrix<T>,
        q: Vec<Matrix<T>>,
    ) -> Result<Self, DeriveError> {
        let n = p1.dim();
        check_shapes(n, &p_alg, &q)?;
        let inv = p1.inverse()?;
        let resolved_p_alg = &inv * &p_alg;
        let resolved_q = q.iter().map(|qi| &inv * qi).collect();
        Ok(Self {
            p1,
            p_alg,
            q,
            resolved_p1: inv,
            resolved_p_alg,
            resolved_q,
        })
    }

    /// Builds an operator whose resolved form is supplied independently, e.g.
    /// from closed-form expressions.
    pub fn from_all_parts(
        p1: Matrix<T>,
        p_alg: Matrix<T>,
        q: Vec<Matrix<T>>,
        resolved_p1: Matrix<T>,
        resolved_p_alg: Matrix<T>,
        resolved_q: Vec<Matrix<T>>,
    ) -> Result<Self, DeriveError> {
        let n = p1.dim();
        check_shapes(n, &p_alg, &q)?;
        check_shapes(n, &resolved_p1, &resolved_q)?;
        check_shapes(n, &resolved_p_alg, &[])?;
        if resolved_q.len() != q.len() {
            return Err(DeriveError::InvalidCoefficients(
                "resolved q has the wrong number of directions".into(),
            ));
        }
        Ok(Self {
            p1,
            p_alg,
            q,
            resolved_p1,
            resolved_p_alg,
            resolved_q,
        })
    }

    pub fn dim(&self) -> usize {
        self.p1.dim()
    }

    /// Coefficient of `u_t`.
    pub fn p1(&self) -> &Matrix<T> {
        &self.p1
    }

    /// Algebraic part `p` of `P0`.
    pub fn p_alg(&self) -> &Matrix<T> {
        &self.p_alg
    }

    /// Tangential-derivative parts `q_i` of `P0`.
    pub fn q(&self) -> &[Matrix<T>] {
        &self.q
    }

    pub fn resolved_p1(&self) -> &Matrix<T> {
        &self.resolved_p1
    }

    pub fn resolved_p_alg(&self) -> &Matrix<T> {
        &self.resolved_p_alg
    }

    pub fn resolved_q(&self) -> &[Matrix<T>] {
        &self.resolved_q
    }

    /// Largest entrywise difference over every stored matrix.
    pub fn max_abs_difference(&self, other: &Self) -> T {
        let mut worst = T::zero();
        let mut diff = |a: &Matrix<T>, b: &Matrix<T>| {
            if a.dim() != b.dim() {
                worst = T::infinity();
            } else {
                worst = worst.max((a - b).max_abs());
            }
        };
        diff(&self.p1, &other.p1);
        diff(&self.p_alg, &other.p_alg);
        diff(&self.resolved_p1, &other.resolved_p1);
        diff(&self.resolved_p_alg, &other.resolved_p_alg);
        if self.q.len() != other.q.len() || self.resolved_q.len() != other.resolved_q.len() {
            return T::infinity();
        }
        for (a, b) in self
            .q
            .iter()
            .zip(&other.q)
            .chain(self.resolved_q.iter().zip(&other.resolved_q))
        {
            diff(a, b);
        }
        worst
    }
}

fn check_shapes<T: Real>(n: usize, m: &Matrix<T>, q: &[Matrix<T>]) -> Result<(), DeriveError> {
    for x in std::iter::once(m).chain(q) {
        if x.dim() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: x.dim(),
            }
            .into());
        }
    }
    if q.len() > 2 {
        return Err(DeriveError::InvalidCoefficients(
            "at most two tangential directions".into(),
        ));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
struct RawOperator<T: Real> {
    p1: Matrix<T>,
    p_alg: Matrix<T>,
    q: Vec<Matrix<T>>,
    resolved_p1: Matrix<T>,
    resolved_p_alg: Matrix<T>,
    resolved_q: Vec<Matrix<T>>,
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for TtbcOperator<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = RawOperator::<T>::deserialize(deserializer)?;
        Self::from_all_parts(
            r.p1,
            r.p_alg,
            r.q,
            r.resolved_p1,
            r.resolved_p_alg,
            r.resolved_q,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// `L = -P1` and `A^{-1}` with the Sylvester solver matching the structure of `L`.
struct Prepared<T: Real> {
    l: Matrix<T>,
    a_inv: Matrix<T>,
    symmetric: bool,
}

impl<T: Real> Prepared<T> {
    fn new(coeffs: &SystemCoefficients<T>, tol: &ToleranceConfig<T>) -> Result<Self, DeriveError> {
        let report = validate_hyperbolicity_with(coeffs, tol);
        if !report.ok {
            return Err(DeriveError::NotHyperbolic {
                message: report.message,
                eigenvalues: report
                    .eigenvalues
                    .iter()
                    .map(|x| x.to_f64_lossy())
                    .collect(),
                degenerate_indices: report.degenerate_indices,
            });
        }
        let a = coeffs.a();
        let symmetric = coeffs.mass().is_none() && a.check_symmetric(tol.symmetry).is_ok();
        let l = inverse_root(a, coeffs.mass(), tol)?;
        let a_inv = a.inverse()?;
        Ok(Self {
            l,
            a_inv,
            symmetric,
        })
    }

    /// Solves `L x + x L = rhs`.
    fn sylvester(
        &self,
        rhs: &Matrix<T>,
        tol: &ToleranceConfig<T>,
    ) -> Result<Matrix<T>, LinalgError> {
        if self.symmetric {
            solve_sylvester_sym_with(&self.l, rhs, tol)
        } else {
            solve_sylvester_general_with(&self.l, &self.l, rhs, tol)
        }
    }

    fn q(
        &self,
        coeffs: &SystemCoefficients<T>,
        tol: &ToleranceConfig<T>,
    ) -> Result<Vec<Matrix<T>>, DeriveError> {
        coeffs
            .b()
            .iter()
            .map(|bi| {
                let rhs = -&(&(&self.a_inv * bi) * &self.l);
                Ok(self.sylvester(&rhs, tol)?)
            })
            .collect()
    }

    fn p(
        &self,
        coeffs: &SystemCoefficients<T>,
        q: &[Matrix<T>],
        tol: &ToleranceConfig<T>,
    ) -> Result<Matrix<T>, DeriveError> {
        if q.len() != coeffs.tangential_dims() {
            return Err(DeriveError::InvalidCoefficients(format!(
                "expected {} tangential q matrices, got {}",
                coeffs.tangential_dims(),
                q.len()
            )));
        }
        let n = coeffs.dim();
        // B . grad_tau(L) and q . grad_tau(L)
        let mut b_grad = Matrix::zeros(n);
        let mut q_grad = Matrix::zeros(n);
        for ((bi, di), qi) in coeffs.b().iter().zip(coeffs.d_tau()).zip(q) {
            b_grad = &b_grad + &(bi * di);
            q_grad = &q_grad + &(qi * di);
        }
        let c_term = &(&self.a_inv * coeffs.c0()) * &self.l;
        let b_term = &self.a_inv * &b_grad;
        let rhs = -&(&(&c_term + &b_term) + &q_grad);
        Ok(self.sylvester(&rhs, tol)?)
    }
}

/// `P1 = -A^{-1/2}`, or `-(J^{-1} A)^{-1/2}` with a mass matrix.
pub fn derive_p1<T: Real>(coeffs: &SystemCoefficients<T>) -> Result<Matrix<T>, DeriveError> {
    let prepared = Prepared::new(coeffs, &ToleranceConfig::default())?;
    Ok(-&prepared.l)
}

/// Tangential parts of `P0`: `L q_i + q_i L = -A^{-1} B_i L` with `L = -P1`.
pub fn derive_q<T: Real>(coeffs: &SystemCoefficients<T>) -> Result<Vec<Matrix<T>>, DeriveError> {
    let tol = ToleranceConfig::default();
    Prepared::new(coeffs, &tol)?.q(coeffs, &tol)
}

/// Algebraic part of `P0`:
/// `L p + p L = -A^{-1} C0 L - A^{-1} sum_i B_i D_i - sum_i q_i D_i`,
/// where `D_i` is the tangential derivative of `L`.
pub fn derive_p<T: Real>(
    coeffs: &SystemCoefficients<T>,
    q: &[Matrix<T>],
) -> Result<Matrix<T>, DeriveError> {
    let tol = ToleranceConfig::default();
    Prepared::new(coeffs, &tol)?.p(coeffs, q, &tol)
}

/// Runs the full pipeline: `P1`, then `q`, then `p`, then the resolved form.
pub fn derive_operator<T: Real>(
    coeffs: &SystemCoefficients<T>,
) -> Result<TtbcOperator<T>, DeriveError> {
    derive_operator_with(coeffs, &ToleranceConfig::default())
}

pub fn derive_operator_with<T: Real>(
    coeffs: &SystemCoefficients<T>,
    tol: &ToleranceConfig<T>,
) -> Result<TtbcOperator<T>, DeriveError> {
    let prepared = Prepared::new(coeffs, tol)?;
    let q = prepared.q(coeffs, tol)?;
    let p = prepared.p(coeffs, &q, tol)?;
    TtbcOperator::from_parts(-&prepared.l, p, q)
}

/// Recomputes the resolved form of `op` from its `P1`, `p` and `q`.
pub fn to_resolved_form<T: Real>(op: &TtbcOperator<T>) -> Result<TtbcOperator<T>, DeriveError> {
    TtbcOperator::from_parts(op.p1.clone(), op.p_alg.clone(), op.q.clone())
}

/// `s P1 + p + sum_i xi_i q_i`: the boundary operator applied to a mode with
/// Laplace frequency `s` and tangential wavenumbers `xi` (real, applied linearly).
pub fn evaluate_symbol<T: Real>(op: &TtbcOperator<T>, s: T, xi: &[T]) -> Matrix<T> {
    let mut out = &op.p1.scale(s) + &op.p_alg;
    for (qi, &x) in op.q.iter().zip(xi) {
        out = &out + &qi.scale(x);
    }
    out
}
