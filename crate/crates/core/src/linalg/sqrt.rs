use super::eigen::{eig_sym_with, SpectralDecomposition};
use super::schur::real_schur;
use super::{LinalgError, Matrix, ToleranceConfig};
use crate::Real;

/// Eigen-decomposition of a symmetric matrix, rejected unless
/// `lambda_min > definiteness * lambda_max`.
pub(crate) fn spd_decomposition<T: Real>(
    m: &Matrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<SpectralDecomposition<T>, LinalgError> {
    let d = eig_sym_with(m, tol)?;
    let (lo, hi) = (d.min(), d.max());
    if !(hi > T::zero()) || !(lo > tol.definiteness * hi) {
        return Err(LinalgError::NotPositiveDefinite {
            eigenvalue: lo.to_f64_lossy(),
            largest: hi.to_f64_lossy(),
        });
    }
    Ok(d)
}

/// Principal (symmetric positive definite) square root.
pub fn spd_sqrt<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    spd_sqrt_with(m, &ToleranceConfig::default())
}

pub fn spd_sqrt_with<T: Real>(
    m: &Matrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Matrix<T>, LinalgError> {
    Ok(spd_decomposition(m, tol)?.map(|l| l.sqrt()))
}

/// Inverse of the principal square root, `m^{-1/2}`.
pub fn spd_inv_sqrt<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    spd_inv_sqrt_with(m, &ToleranceConfig::default())
}

pub fn spd_inv_sqrt_with<T: Real>(
    m: &Matrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Matrix<T>, LinalgError> {
    Ok(spd_decomposition(m, tol)?.map(|l| T::one() / l.sqrt()))
}

/// Square root of `j^{-1} s` for symmetric positive definite `j` and symmetric `s`.
pub fn j_weighted_sqrt<T: Real>(j: &Matrix<T>, s: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    Ok(WeightedRoot::new(j, s, &ToleranceConfig::default())?.sqrt())
}

/// Congruence factorization of `j^{-1} s`.
///
/// With `j = g g^T` and `h = g^{-1} s g^{-T}` (symmetric), `j^{-1} s = g^{-T} h g^T`,
/// so every primary function of `j^{-1} s` is `g^{-T} f(h) g^T`.
#[derive(Debug, Clone)]
pub struct WeightedRoot<T> {
    g_inv_t: Matrix<T>,
    g_t: Matrix<T>,
    spectrum: SpectralDecomposition<T>,
}

impl<T: Real> WeightedRoot<T> {
    pub fn new(
        j: &Matrix<T>,
        s: &Matrix<T>,
        tol: &ToleranceConfig<T>,
    ) -> Result<Self, LinalgError> {
        if j.dim() != s.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: j.dim(),
                found: s.dim(),
            });
        }
        spd_decomposition(j, tol)?;
        s.check_symmetric(tol.symmetry)?;
        let g = j.symmetric_part().cholesky()?;
        let g_inv = g.inverse()?;
        let h = (&(&g_inv * &s.symmetric_part()) * &g_inv.transpose()).symmetric_part();
        let spectrum = eig_sym_with(&h, tol)?;
        let (lo, hi) = (spectrum.min(), spectrum.max());
        if !(hi > T::zero()) || !(lo > tol.definiteness * hi) {
            return Err(LinalgError::NonPositiveSpectrum {
                re: lo.to_f64_lossy(),
                im: 0.0,
            });
        }
        Ok(Self {
            g_inv_t: g_inv.transpose(),
            g_t: g.transpose(),
            spectrum,
        })
    }

    /// Eigenvalues of `j^{-1} s`, ascending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.spectrum.eigenvalues
    }

    fn apply(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        &(&self.g_inv_t * &self.spectrum.map(f)) * &self.g_t
    }

    /// `(j^{-1} s)^{1/2}`.
    pub fn sqrt(&self) -> Matrix<T> {
        self.apply(|l| l.sqrt())
    }

    /// `(j^{-1} s)^{-1/2}`.
    pub fn inv_sqrt(&self) -> Matrix<T> {
        self.apply(|l| T::one() / l.sqrt())
    }
}

/// Principal square root of a general matrix whose spectrum is real and
/// strictly positive, through the triangular Schur form.
pub fn positive_sqrt<T: Real>(
    m: &Matrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Matrix<T>, LinalgError> {
    let schur = real_schur(m)?;
    let ev = schur.eigenvalues();
    let largest = ev.iter().fold(T::zero(), |acc, c| acc.max(c.norm()));
    for c in &ev {
        let complex = c.im.abs() > T::zero();
        if complex || !(largest > T::zero()) || !(c.re > tol.definiteness * largest) {
            return Err(LinalgError::NonPositiveSpectrum {
                re: c.re.to_f64_lossy(),
                im: c.im.to_f64_lossy(),
            });
        }
    }
    let t = &schur.t;
    let n = t.dim();
    // Upper triangular R with R R = T, column by column.
    let mut r = Matrix::zeros(n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in (i + 1)..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    Ok(&(&schur.z * &r) * &schur.z.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[[f64; 2]]) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        assert_eq!(
            spd_sqrt(&Matrix::<f64>::identity(3)).unwrap(),
            Matrix::identity(3)
        );
        let s = spd_sqrt(&Matrix::from_diag(&[4.0, 9.0])).unwrap();
        assert!(s.relative_distance(&Matrix::from_diag(&[2.0, 3.0]), 1.0) < 1e-15);
    }

    #[test]
    fn sqrt_of_five_four_matrix() {
        // [[2,1],[1,2]]^2 = [[5,4],[4,5]]
        let s = spd_sqrt(&mat(&[[5.0, 4.0], [4.0, 5.0]])).unwrap();
        assert!(s.relative_distance(&mat(&[[2.0, 1.0], [1.0, 2.0]]), 1.0) < 1e-14);
    }

    #[test]
    fn inv_sqrt_examples() {
        let s = spd_inv_sqrt(&Matrix::from_diag(&[4.0])).unwrap();
        assert_eq!(s[(0, 0)], 0.5);
        let m = mat(&[[5.0, 4.0], [4.0, 5.0]]);
        let s = spd_inv_sqrt(&m).unwrap();
        let expected = mat(&[[2.0, -1.0], [-1.0, 2.0]]).scale(1.0 / 3.0);
        assert!(s.relative_distance(&expected, 1.0) < 1e-14);
        let should_be_identity = &(&s * &s) * &m;
        assert!(should_be_identity.relative_distance(&Matrix::identity(2), 1.0) < 1e-14);
    }

    #[test]
    fn rejects_indefinite_and_semidefinite() {
        let err = spd_sqrt(&mat(&[[1.0, 2.0], [2.0, 1.0]])).unwrap_err();
        match err {
            LinalgError::NotPositiveDefinite { eigenvalue, .. } => {
                assert!((eigenvalue + 1.0).abs() < 1e-14)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(spd_sqrt(&Matrix::from_diag(&[1.0, 0.0])).is_err());
        assert!(spd_sqrt(&Matrix::from_diag(&[1.0, 1e-13])).is_err());
        assert!(spd_sqrt(&Matrix::from_diag(&[1.0, 1e-11])).is_ok());
    }

    #[test]
    fn weighted_sqrt_examples() {
        let r = j_weighted_sqrt(
            &Matrix::from_diag(&[1.0, 4.0]),
            &Matrix::from_diag(&[4.0, 4.0]),
        )
        .unwrap();
        assert!(r.relative_distance(&Matrix::from_diag(&[2.0, 1.0]), 1.0) < 1e-15);

        let m = mat(&[[5.0, 4.0], [4.0, 5.0]]);
        let r = j_weighted_sqrt(&Matrix::identity(2), &m).unwrap();
        assert!(r.relative_distance(&spd_sqrt(&m).unwrap(), 1.0) < 1e-14);
    }

    #[test]
    fn weighted_sqrt_rejects_bad_inputs() {
        let s = Matrix::from_diag(&[1.0, 1.0]);
        assert!(matches!(
            j_weighted_sqrt(&mat(&[[1.0, 2.0], [2.0, 1.0]]), &s),
            Err(LinalgError::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            j_weighted_sqrt(&Matrix::identity(2), &Matrix::from_diag(&[1.0, -1.0])),
            Err(LinalgError::NonPositiveSpectrum { .. })
        ));
    }

    #[test]
    fn weighted_sqrt_nontrivial_mass() {
        let j = mat(&[[1.0, 0.5], [0.5, 2.0]]);
        let s = mat(&[[4.0, -1.0], [-1.0, 1.0]]);
        let root = WeightedRoot::new(&j, &s, &ToleranceConfig::default()).unwrap();
        let target = &j.inverse().unwrap() * &s;
        let r = root.sqrt();
        assert!((&r * &r).relative_distance(&target, 1.0) < 1e-14);
        let ri = root.inv_sqrt();
        assert!((&ri * &r).relative_distance(&Matrix::identity(2), 1.0) < 1e-14);
    }

    #[test]
    fn general_positive_sqrt() {
        let m = mat(&[[1.0, 2.0], [-1.0, 4.0]]);
        let r = positive_sqrt(&m, &ToleranceConfig::default()).unwrap();
        assert!((&r * &r).relative_distance(&m, 1.0) < 1e-14);
        let rot = mat(&[[0.0, -1.0], [1.0, 0.0]]);
        assert!(matches!(
            positive_sqrt(&rot, &ToleranceConfig::default()),
            Err(LinalgError::NonPositiveSpectrum { .. })
        ));
    }
}
