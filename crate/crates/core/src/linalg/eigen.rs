use super::{LinalgError, Matrix, ToleranceConfig};
use crate::Real;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `m = V diag(lambda) V^T` of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Orthogonal; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    /// `V diag(f(lambda)) V^T`.
    pub fn map(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let v = &self.eigenvectors;
        let n = v.dim();
        let fl: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let s: T = (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.map(|l| l)
    }

    pub fn min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> T {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
pub fn eig_sym<T: Real>(m: &Matrix<T>) -> Result<SpectralDecomposition<T>, LinalgError> {
    eig_sym_with(m, &ToleranceConfig::default())
}

pub fn eig_sym_with<T: Real>(
    m: &Matrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<SpectralDecomposition<T>, LinalgError> {
    m.check_symmetric(tol.symmetry)?;
    let n = m.dim();
    let mut a = m.symmetric_part();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    let floor = eps * eps * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let scale = (a[(p, p)] * a[(q, q)]).abs().sqrt();
                if apq.abs() <= eps * scale || apq.abs() <= floor {
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::ConvergenceFailure {
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .partial_cmp(&a[(j, j)])
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&k| a[(k, k)]).collect();
    let eigenvectors = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `a <- G^T a G`, `v <- v G` for the plane rotation in `(p, q)`.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    let n = a.dim();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = T::zero();
    a[(q, p)] = T::zero();
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
