use serde::{Deserialize, Serialize};

use super::SystemCoefficients;
use crate::linalg::{eig_sym_with, eigenvalues, Matrix, ToleranceConfig};
use crate::Real;

/// Diagnosis of whether the normal-derivative coefficient admits a TTBC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport<T> {
    pub ok: bool,
    /// Spectrum of `A` (or of `J^{-1} A`), ascending. Real parts only when the
    /// spectrum is complex.
    pub eigenvalues: Vec<T>,
    pub message: String,
    /// Components whose whole row and column of `A` are negligible.
    pub degenerate_indices: Vec<usize>,
}

/// Checks that `A` (or `J^{-1} A`) has a strictly positive spectrum.
pub fn validate_hyperbolicity<T: Real>(coeffs: &SystemCoefficients<T>) -> HyperbolicityReport<T> {
    validate_hyperbolicity_with(coeffs, &ToleranceConfig::default())
}

pub fn validate_hyperbolicity_with<T: Real>(
    coeffs: &SystemCoefficients<T>,
    tol: &ToleranceConfig<T>,
) -> HyperbolicityReport<T> {
    let a = coeffs.a();
    let degenerate_indices = degenerate_components(a, tol.degenerate);
    let fail = |eigenvalues: Vec<T>, message: String| HyperbolicityReport {
        ok: false,
        eigenvalues,
        message,
        degenerate_indices: degenerate_indices.clone(),
    };

    let spectrum = match spectrum(a, coeffs.mass(), tol) {
        Ok(s) => s,
        Err(message) => return fail(Vec::new(), message),
    };
    let (mut values, complex) = spectrum;
    values.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    let what = if coeffs.mass().is_some() {
        "J^-1 A"
    } else {
        "A"
    };
    if complex {
        return fail(
            values,
            format!("{what} has complex eigenvalues; the system is not hyperbolic"),
        );
    }
    let largest = values.last().copied().unwrap_or_else(T::zero);
    let smallest = values.first().copied().unwrap_or_else(T::zero);
    if !(largest > T::zero()) || !(smallest > tol.definiteness * largest) {
        let mut message = format!(
            "{what} is not positive definite: smallest eigenvalue {smallest:e}, largest {largest:e}"
        );
        if !degenerate_indices.is_empty() {
            message.push_str(&format!(
                "; components {degenerate_indices:?} carry no normal second derivative"
            ));
        }
        return fail(values, message);
    }
    HyperbolicityReport {
        ok: true,
        eigenvalues: values,
        message: format!("{what} has strictly positive spectrum in [{smallest:e}, {largest:e}]"),
        degenerate_indices,
    }
}

/// Spectrum of `a` or `j^{-1} a` and whether any eigenvalue was complex.
fn spectrum<T: Real>(
    a: &Matrix<T>,
    j: Option<&Matrix<T>>,
    tol: &ToleranceConfig<T>,
) -> Result<(Vec<T>, bool), String> {
    let symmetric = a.check_symmetric(tol.symmetry).is_ok();
    match (j, symmetric) {
        (None, true) => {
            let d = eig_sym_with(a, tol).map_err(|e| e.to_string())?;
            Ok((d.eigenvalues, false))
        }
        (Some(j), true) => {
            let jd = eig_sym_with(j, tol).map_err(|e| format!("mass matrix: {e}"))?;
            if !(jd.min() > tol.definiteness * jd.max()) {
                return Err(format!(
                    "mass matrix J is not positive definite (eigenvalue {:e})",
                    jd.min()
                ));
            }
            let g = j
                .symmetric_part()
                .cholesky()
                .map_err(|e| format!("mass matrix: {e}"))?;
            let g_inv = g.inverse().map_err(|e| format!("mass matrix: {e}"))?;
            let h = (&(&g_inv * a) * &g_inv.transpose()).symmetric_part();
            let d = eig_sym_with(&h, tol).map_err(|e| e.to_string())?;
            Ok((d.eigenvalues, false))
        }
        (j, false) => {
            let target = match j {
                Some(j) => &j.inverse().map_err(|e| format!("mass matrix: {e}"))? * a,
                None => a.clone(),
            };
            let ev = eigenvalues(&target).map_err(|e| e.to_string())?;
            let complex = ev.iter().any(|c| !c.im.is_zero());
            Ok((ev.into_iter().map(|c| c.re).collect(), complex))
        }
    }
}

fn degenerate_components<T: Real>(a: &Matrix<T>, rel: T) -> Vec<usize> {
    let threshold = rel * a.max_abs();
    (0..a.dim())
        .filter(|&i| {
            (0..a.dim()).all(|k| a[(i, k)].abs() <= threshold && a[(k, i)].abs() <= threshold)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(a: Matrix<f64>) -> SystemCoefficients<f64> {
        let n = a.dim();
        SystemCoefficients::new(a, vec![Matrix::zeros(n)], Matrix::zeros(n)).unwrap()
    }

    #[test]
    fn identity_is_hyperbolic() {
        let r = validate_hyperbolicity(&coeffs(Matrix::identity(3)));
        assert!(r.ok);
        assert_eq!(r.eigenvalues, vec![1.0; 3]);
        assert!(r.degenerate_indices.is_empty());
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let r = validate_hyperbolicity(&coeffs(Matrix::from_diag(&[4.0, 1.0, 1.0])));
        assert!(r.ok);
        assert_eq!(r.eigenvalues, vec![1.0, 1.0, 4.0]);
    }

    #[test]
    fn zero_row_is_flagged() {
        let r = validate_hyperbolicity(&coeffs(Matrix::from_diag(&[1.0, 0.0, 1.0])));
        assert!(!r.ok);
        assert_eq!(r.degenerate_indices, vec![1]);
        assert!(r.message.contains("[1]"));
    }

    #[test]
    fn indefinite_is_rejected() {
        let r = validate_hyperbolicity(&coeffs(Matrix::from_diag(&[1.0, -2.0])));
        assert!(!r.ok);
        assert!(r.degenerate_indices.is_empty());
    }

    #[test]
    fn complex_spectrum_is_rejected() {
        let a = Matrix::from_rows(&[[1.0, -2.0], [2.0, 1.0]]).unwrap();
        let r = validate_hyperbolicity(&coeffs(a));
        assert!(!r.ok);
        assert!(r.message.contains("complex"));
    }

    #[test]
    fn mass_matrix_spectrum() {
        let tol = ToleranceConfig::default();
        let c = SystemCoefficients::<f64>::with_parts(
            Matrix::from_diag(&[4.0, 4.0]),
            vec![Matrix::zeros(2)],
            Matrix::zeros(2),
            Some(Matrix::from_diag(&[1.0, 4.0])),
            None,
            &tol,
        )
        .unwrap();
        let r = validate_hyperbolicity(&c);
        assert!(r.ok);
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-15 && (r.eigenvalues[1] - 4.0).abs() < 1e-15);
    }
}
