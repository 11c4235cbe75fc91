use super::matrix::Lu;
use super::schur::{real_schur, RealSchur};
use super::sqrt::spd_decomposition;
use super::{LinalgError, Matrix, ToleranceConfig};
use crate::Real;

/// Solves `l x + x l = r` for symmetric positive definite `l`.
///
/// In the eigenbasis of `l` the equation decouples entrywise,
/// `x~_ij = r~_ij / (lambda_i + lambda_j)`.
pub fn solve_sylvester_sym<T: Real>(
    l: &Matrix<T>,
    r: &Matrix<T>,
) -> Result<Matrix<T>, LinalgError> {
    solve_sylvester_sym_with(l, r, &ToleranceConfig::default())
}

pub fn solve_sylvester_sym_with<T: Real>(
    l: &Matrix<T>,
    r: &Matrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Matrix<T>, LinalgError> {
    if l.dim() != r.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: l.dim(),
            found: r.dim(),
        });
    }
    let d = spd_decomposition(l, tol)?;
    let v = &d.eigenvectors;
    let mut x = &(&v.transpose() * r) * v;
    let n = l.dim();
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] /= d.eigenvalues[i] + d.eigenvalues[j];
        }
    }
    Ok(&(v * &x) * &v.transpose())
}

/// Solves `a x + x b = c` by the Bartels-Stewart method.
///
/// Requires the spectra of `a` and `-b` to be separated by more than
/// `separation * (|a|_F + |b|_F)`.
pub fn solve_sylvester_general<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    c: &Matrix<T>,
) -> Result<Matrix<T>, LinalgError> {
    solve_sylvester_general_with(a, b, c, &ToleranceConfig::default())
}

pub fn solve_sylvester_general_with<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    c: &Matrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Matrix<T>, LinalgError> {
    let n = a.dim();
    for m in [b, c] {
        if m.dim() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: m.dim(),
            });
        }
    }
    let sa = real_schur(a)?;
    let sb = real_schur(b)?;
    check_separation(&sa, &sb, a.frobenius_norm() + b.frobenius_norm(), tol)?;

    let f = &(&sa.z.transpose() * c) * &sb.z;
    let y = solve_quasi_triangular(&sa.t, &sb, &f)?;
    Ok(&(&sa.z * &y) * &sb.z.transpose())
}

fn check_separation<T: Real>(
    sa: &RealSchur<T>,
    sb: &RealSchur<T>,
    scale: T,
    tol: &ToleranceConfig<T>,
) -> Result<(), LinalgError> {
    let required = tol.separation * scale;
    let mut separation = T::infinity();
    for lambda in sa.eigenvalues() {
        for mu in sb.eigenvalues() {
            separation = separation.min((lambda + mu).norm());
        }
    }
    if !(separation > required) {
        return Err(LinalgError::SpectraOverlap {
            separation: separation.to_f64_lossy(),
            required: required.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Solves `ta y + y tb = f` with `ta`, `tb` upper quasi-triangular, sweeping
/// the diagonal blocks of `tb` left to right.
fn solve_quasi_triangular<T: Real>(
    ta: &Matrix<T>,
    sb: &RealSchur<T>,
    f: &Matrix<T>,
) -> Result<Matrix<T>, LinalgError> {
    let n = ta.dim();
    let tb = &sb.t;
    let mut y = Matrix::zeros(n);
    let scale = ta.max_abs() + tb.max_abs();

    for (j, size) in sb.blocks() {
        // rhs_k = f_k - sum_{i<j} tb[i][k] y_i for the block columns k.
        let rhs_col = |k: usize, y: &Matrix<T>| -> Vec<T> {
            (0..n)
                .map(|r| {
                    let mut s = f[(r, k)];
                    for i in 0..j {
                        s -= tb[(i, k)] * y[(r, i)];
                    }
                    s
                })
                .collect()
        };
        if size == 1 {
            let mut sys = ta.as_slice().to_vec();
            for d in 0..n {
                sys[d * n + d] += tb[(j, j)];
            }
            let lu = Lu::factor_raw(n, sys, scale).map_err(|_| overlap())?;
            let col = lu.solve(&rhs_col(j, &y));
            for r in 0..n {
                y[(r, j)] = col[r];
            }
        } else {
            // [ta + t00 I, t10 I; t01 I, ta + t11 I] [y_j; y_j+1] = [rhs_j; rhs_j+1]
            let m = 2 * n;
            let mut sys = vec![T::zero(); m * m];
            for r in 0..n {
                for c in 0..n {
                    sys[r * m + c] = ta[(r, c)];
                    sys[(n + r) * m + n + c] = ta[(r, c)];
                }
                sys[r * m + r] += tb[(j, j)];
                sys[(n + r) * m + n + r] += tb[(j + 1, j + 1)];
                sys[r * m + n + r] = tb[(j + 1, j)];
                sys[(n + r) * m + r] = tb[(j, j + 1)];
            }
            let lu = Lu::factor_raw(m, sys, scale).map_err(|_| overlap())?;
            let mut rhs = rhs_col(j, &y);
            rhs.extend(rhs_col(j + 1, &y));
            let sol = lu.solve(&rhs);
            for r in 0..n {
                y[(r, j)] = sol[r];
                y[(r, j + 1)] = sol[n + r];
            }
        }
    }
    if !y.is_finite() {
        return Err(overlap());
    }
    Ok(y)
}

fn overlap() -> LinalgError {
    LinalgError::SpectraOverlap {
        separation: 0.0,
        required: 0.0,
    }
}

/// `|l x + x r - c|_F / (|l|_F |x|_F + |r|_F |x|_F + |c|_F)`.
pub fn sylvester_residual<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    c: &Matrix<T>,
    x: &Matrix<T>,
) -> T {
    let res = &(&(a * x) + &(x * b)) - c;
    let denom = (a.frobenius_norm() + b.frobenius_norm()) * x.frobenius_norm() + c.frobenius_norm();
    if denom.is_zero() {
        res.frobenius_norm()
    } else {
        res.frobenius_norm() / denom
    }
}
