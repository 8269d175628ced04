//! Small dense linear-algebra helpers.

use nalgebra::SymmetricEigen;

use crate::CMatrix;

/// Induced 1-norm: maximum absolute column sum.
pub fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// LU factorization with partial pivoting of a dense, row-major real matrix.
#[derive(Clone, Debug)]
pub struct RealLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    /// Smallest pivot modulus encountered, relative to the largest matrix entry.
    pub relative_min_pivot: f64,
}

impl RealLu {
    /// Factor `a` (row-major, `n x n`). Never fails; a singular matrix shows
    /// up as a zero (or tiny) `relative_min_pivot`.
    pub fn factor(mut a: Vec<f64>, n: usize) -> Self {
        assert_eq!(a.len(), n * n, "matrix must be n x n");
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].abs());
            for r in k + 1..n {
                let v = a[r * n + k].abs();
                if v > best {
                    p = r;
                    best = v;
                }
            }
            min_pivot = min_pivot.min(best);
            if best == 0.0 {
                continue;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let (upper, lower) = a.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n..(k + 1) * n];
            let pivot = pivot_row[k];
            for row in lower.chunks_exact_mut(n) {
                let f = row[k] / pivot;
                if f == 0.0 {
                    continue;
                }
                row[k] = f;
                for (x, &y) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *x -= f * y;
                }
            }
        }

        let relative_min_pivot = if scale > 0.0 { min_pivot / scale } else { 0.0 };
        Self { n, lu: a, perm, relative_min_pivot }
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }
}
