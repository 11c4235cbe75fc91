//! Real Schur decomposition `m = Z T Z^T` of a general square matrix.
//!
//! Householder reduction to Hessenberg form followed by Francis double-shift
//! QR sweeps. Diagonal 2x2 blocks with real eigenvalues are split afterwards,
//! so every remaining 2x2 block carries a complex-conjugate pair.

use num_complex::Complex;

use super::{LinalgError, Matrix};
use crate::Real;

const MAX_ITERATIONS_PER_EIGENVALUE: usize = 40;

#[derive(Debug, Clone)]
pub struct RealSchur<T> {
    /// Upper quasi-triangular factor.
    pub t: Matrix<T>,
    /// Orthogonal factor.
    pub z: Matrix<T>,
}

impl<T: Real> RealSchur<T> {
    /// Start index and size (1 or 2) of every diagonal block of `t`.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let n = self.t.dim();
        let mut out = Vec::new();
        let mut i = 0;
        while i < n {
            if i + 1 < n && !self.t[(i + 1, i)].is_zero() {
                out.push((i, 2));
                i += 2;
            } else {
                out.push((i, 1));
                i += 1;
            }
        }
        out
    }

    /// Eigenvalues read off the diagonal blocks, in block order.
    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        let t = &self.t;
        let mut out = Vec::with_capacity(t.dim());
        for (i, size) in self.blocks() {
            if size == 1 {
                out.push(Complex::new(t[(i, i)], T::zero()));
            } else {
                let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
                let half = T::lit(0.5);
                let mean = (a + d) * half;
                let p = (a - d) * half;
                let disc = p * p + b * c;
                let im = (-disc).max(T::zero()).sqrt();
                out.push(Complex::new(mean, im));
                out.push(Complex::new(mean, -im));
            }
        }
        out
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.blocks().iter().all(|&(_, s)| s == 1)
    }
}

pub fn real_schur<T: Real>(m: &Matrix<T>) -> Result<RealSchur<T>, LinalgError> {
    let n = m.dim();
    let (mut h, mut z) = hessenberg(m);
    if n > 2 || (n == 2 && !h[(1, 0)].is_zero()) {
        francis_qr(&mut h, &mut z)?;
    }
    split_real_blocks(&mut h, &mut z);
    Ok(RealSchur { t: h, z })
}

/// General (possibly complex) eigenvalues of `m`.
pub fn eigenvalues<T: Real>(m: &Matrix<T>) -> Result<Vec<Complex<T>>, LinalgError> {
    Ok(real_schur(m)?.eigenvalues())
}

/// Householder vector `v` with `(I - 2 v v^T / v^T v) x = alpha e_1`.
/// Returns `None` when `x` is already zero below its first entry.
fn householder<T: Real>(x: &[T]) -> Option<Vec<T>> {
    let tail: T = x[1..].iter().map(|&v| v * v).sum();
    if tail.is_zero() {
        return None;
    }
    let norm = (x[0] * x[0] + tail).sqrt();
    let alpha = if x[0] >= T::zero() { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    Some(v)
}

/// `h[rows, cols] <- P h[rows, cols]` for the reflector `v` acting on `rows`.
fn reflect_rows<T: Real>(h: &mut Matrix<T>, v: &[T], row0: usize, cols: std::ops::Range<usize>) {
    let vv: T = v.iter().map(|&x| x * x).sum();
    let two = T::lit(2.0);
    for j in cols {
        let s: T = v
            .iter()
            .enumerate()
            .map(|(k, &vk)| vk * h[(row0 + k, j)])
            .sum();
        let f = two * s / vv;
        for (k, &vk) in v.iter().enumerate() {
            h[(row0 + k, j)] -= f * vk;
        }
    }
}

/// `h[rows, cols] <- h[rows, cols] P` for the reflector `v` acting on `cols`.
fn reflect_cols<T: Real>(h: &mut Matrix<T>, v: &[T], col0: usize, rows: std::ops::Range<usize>) {
    let vv: T = v.iter().map(|&x| x * x).sum();
    let two = T::lit(2.0);
    for i in rows {
        let s: T = v
            .iter()
            .enumerate()
            .map(|(k, &vk)| h[(i, col0 + k)] * vk)
            .sum();
        let f = two * s / vv;
        for (k, &vk) in v.iter().enumerate() {
            h[(i, col0 + k)] -= f * vk;
        }
    }
}

fn hessenberg<T: Real>(m: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = m.dim();
    let mut h = m.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<T> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let Some(v) = householder(&x) else { continue };
        reflect_rows(&mut h, &v, k + 1, 0..n);
        reflect_cols(&mut h, &v, k + 1, 0..n);
        reflect_cols(&mut q, &v, k + 1, 0..n);
        for i in (k + 2)..n {
            h[(i, k)] = T::zero();
        }
    }
    (h, q)
}

fn francis_qr<T: Real>(h: &mut Matrix<T>, z: &mut Matrix<T>) -> Result<(), LinalgError> {
    let n = h.dim();
    let eps = T::epsilon();
    let norm = h.frobenius_norm();
    let budget = MAX_ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut iter_here = 0usize;

    loop {
        // Deflate negligible subdiagonal entries in the active part.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].abs() + h[(lo, lo)].abs();
            let s = if s.is_zero() { norm } else { s };
            if h[(lo, lo - 1)].abs() <= eps * s {
                h[(lo, lo - 1)] = T::zero();
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            if hi == 0 {
                return Ok(());
            }
            hi -= 1;
            iter_here = 0;
            continue;
        }
        if lo + 1 == hi {
            if hi < 2 {
                return Ok(());
            }
            hi -= 2;
            iter_here = 0;
            continue;
        }

        total += 1;
        iter_here += 1;
        if total > budget {
            return Err(LinalgError::ConvergenceFailure { iterations: total });
        }

        let m = hi;
        let (shift_sum, shift_prod) = if iter_here % 11 == 10 {
            let s0 = h[(m, m - 1)].abs() + h[(m - 1, m - 2)].abs();
            (T::lit(1.5) * s0, s0 * s0)
        } else {
            (
                h[(m - 1, m - 1)] + h[(m, m)],
                h[(m - 1, m - 1)] * h[(m, m)] - h[(m - 1, m)] * h[(m, m - 1)],
            )
        };

        let l = lo;
        let mut x = h[(l, l)] * h[(l, l)] + h[(l, l + 1)] * h[(l + 1, l)] - shift_sum * h[(l, l)]
            + shift_prod;
        let mut y = h[(l + 1, l)] * (h[(l, l)] + h[(l + 1, l + 1)] - shift_sum);
        let mut w = h[(l + 1, l)] * h[(l + 2, l + 1)];

        for k in l..=(m - 2) {
            if let Some(v) = householder(&[x, y, w]) {
                let col_start = if k > l { k - 1 } else { l };
                reflect_rows(h, &v, k, col_start..n);
                let row_end = (k + 3).min(m) + 1;
                reflect_cols(h, &v, k, 0..row_end);
                reflect_cols(z, &v, k, 0..n);
            }
            if k > l {
                h[(k + 1, k - 1)] = T::zero();
                h[(k + 2, k - 1)] = T::zero();
            }
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
            if k + 3 <= m {
                w = h[(k + 3, k)];
            }
        }
        if let Some(v) = householder(&[x, y]) {
            reflect_rows(h, &v, m - 1, (m - 2)..n);
            reflect_cols(h, &v, m - 1, 0..(m + 1));
            reflect_cols(z, &v, m - 1, 0..n);
        }
        h[(m, m - 2)] = T::zero();
    }
}

/// Rotates every 2x2 diagonal block that has real eigenvalues into upper
/// triangular form.
fn split_real_blocks<T: Real>(h: &mut Matrix<T>, z: &mut Matrix<T>) {
    let n = h.dim();
    let mut i = 0;
    while i + 1 < n {
        if h[(i + 1, i)].is_zero() {
            i += 1;
            continue;
        }
        let (a, b, c, d) = (h[(i, i)], h[(i, i + 1)], h[(i + 1, i)], h[(i + 1, i + 1)]);
        let half = T::lit(0.5);
        let p = (a - d) * half;
        let disc = p * p + b * c;
        if disc < T::zero() {
            i += 2;
            continue;
        }
        let root = disc.sqrt();
        // Larger-magnitude root of the shifted quadratic keeps the eigenvector well defined.
        let lambda = (a + d) * half + if p >= T::zero() { root } else { -root };
        let (v1, v2) = {
            let (x1, x2) = (b, lambda - a);
            let (y1, y2) = (lambda - d, c);
            if x1.abs() + x2.abs() >= y1.abs() + y2.abs() {
                (x1, x2)
            } else {
                (y1, y2)
            }
        };
        let r = v1.hypot(v2);
        if r.is_zero() {
            i += 2;
            continue;
        }
        let (cs, sn) = (v1 / r, v2 / r);
        // G = [[cs, -sn], [sn, cs]]; h <- G^T h G, z <- z G.
        for j in 0..n {
            let (hi0, hi1) = (h[(i, j)], h[(i + 1, j)]);
            h[(i, j)] = cs * hi0 + sn * hi1;
            h[(i + 1, j)] = -sn * hi0 + cs * hi1;
        }
        for k in 0..n {
            let (h0, h1) = (h[(k, i)], h[(k, i + 1)]);
            h[(k, i)] = cs * h0 + sn * h1;
            h[(k, i + 1)] = -sn * h0 + cs * h1;
            let (z0, z1) = (z[(k, i)], z[(k, i + 1)]);
            z[(k, i)] = cs * z0 + sn * z1;
            z[(k, i + 1)] = -sn * z0 + cs * z1;
        }
        h[(i + 1, i)] = T::zero();
        i += 2;
    }
}
