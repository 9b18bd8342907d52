//! Small dense linear algebra for the regression baselines.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Solves `a x = b` for a row-major `n x n` matrix by Gaussian elimination
/// with partial pivoting.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: n * n,
        });
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col].abs() < 1e-300 {
            return Err(Error::domain("singular matrix"));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Ok(x)
}

/// Ridge regression with an unpenalized intercept. Returns `[w..., b]`.
pub fn ridge(rows: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if rows.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: y.len(),
        });
    }
    if rows.is_empty() {
        return Err(Error::NoInstances("regression"));
    }
    let d = rows[0].len();
    let p = d + 1;
    let mut ata = vec![0.0; p * p];
    let mut aty = vec![0.0; p];
    let mut z = vec![0.0; p];
    for (r, &t) in rows.iter().zip(y) {
        if r.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
        z[..d].copy_from_slice(r);
        z[d] = 1.0;
        for i in 0..p {
            aty[i] += z[i] * t;
            for j in 0..p {
                ata[i * p + j] += z[i] * z[j];
            }
        }
    }
    for i in 0..d {
        ata[i * p + i] += lambda;
    }
    solve(ata, aty)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let x = solve(vec![0.0, 2.0, 1.0, 1.0], vec![4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
        assert!(solve(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn ridge_recovers_line() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![f64::from(i)]).collect();
        let y: Vec<f64> = (0..10).map(|i| 3.0 * f64::from(i) - 1.0).collect();
        let w = ridge(&rows, &y, 0.0).unwrap();
        assert!((w[0] - 3.0).abs() < 1e-9 && (w[1] + 1.0).abs() < 1e-9);
    }
}
