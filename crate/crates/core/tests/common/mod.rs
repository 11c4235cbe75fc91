//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use ttbc_core::Matrix64;

/// Orthogonal matrix by modified Gram-Schmidt on a random matrix.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Matrix64 {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for c in &cols {
            let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    Matrix64::from_fn(n, |i, j| cols[j][i])
}

/// SPD matrix with spectrum log-uniform in `[scale, scale * cond]`, both ends
/// attained when `n > 1`.
pub fn random_spd(rng: &mut impl Rng, n: usize, cond: f64, scale: f64) -> Matrix64 {
    let q = random_orthogonal(rng, n);
    let eig: Vec<f64> = (0..n)
        .map(|k| {
            let t = match (n, k) {
                (1, _) => rng.gen_range(0.0..1.0),
                (_, 0) => 0.0,
                (_, 1) => 1.0,
                _ => rng.gen_range(0.0..1.0),
            };
            scale * cond.powf(t)
        })
        .collect();
    let d = Matrix64::from_diag(&eig);
    (&(&q * &d) * &q.transpose()).symmetric_part()
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> Matrix64 {
    Matrix64::from_fn(n, |_, _| scale * rng.gen_range(-1.0..1.0))
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> Matrix64 {
    random_matrix(rng, n, scale).symmetric_part()
}

/// Solves `a x + x b = c` through the Kronecker form
/// `(I (x) a + b^T (x) I) vec(x) = vec(c)` with Gaussian elimination.
pub fn kron_sylvester(a: &Matrix64, b: &Matrix64, c: &Matrix64) -> Matrix64 {
    let n = a.dim();
    let m = n * n;
    // column-major vec: index (i, j) -> i + n j
    let mut k = vec![vec![0.0; m + 1]; m];
    for j in 0..n {
        for i in 0..n {
            let row = i + n * j;
            for p in 0..n {
                k[row][p + n * j] += a[(i, p)];
                k[row][i + n * p] += b[(p, j)];
            }
            k[row][m] = c[(i, j)];
        }
    }
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&x, &y| k[x][col].abs().total_cmp(&k[y][col].abs()))
            .unwrap();
        k.swap(col, piv);
        for r in col + 1..m {
            let f = k[r][col] / k[col][col];
            if f != 0.0 {
                for cc in col..=m {
                    k[r][cc] -= f * k[col][cc];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|cc| k[r][cc] * x[cc]).sum();
        x[r] = (k[r][m] - s) / k[r][r];
    }
    Matrix64::from_fn(n, |i, j| x[i + n * j])
}

pub fn rel(a: &Matrix64, b: &Matrix64) -> f64 {
    a.relative_distance(b, 1e-300)
}

/// `max |a_ij - b_ij|`.
pub fn max_abs_diff(a: &Matrix64, b: &Matrix64) -> f64 {
    (a - b).max_abs()
}
