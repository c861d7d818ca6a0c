//! Small real dense matrices for the latent-variable bookkeeping of the
//! seminorm compiler and the barrier solver's Newton systems.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct RMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl RMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<f64>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "real mul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "real mul_vec shape");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn tmul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "real tmul_vec shape");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            for j in 0..self.cols {
                out[j] += vi * self.get(i, j);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    fn as_cmatrix(&self) -> CMatrix {
        CMatrix::from_real_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    /// Symmetric eigendecomposition, ascending: `(values, vectors as columns)`.
    pub fn sym_eigh(&self) -> (Vec<f64>, RMat) {
        let d = self.as_cmatrix().re_part().hermitian_eigh();
        let v = &d.eigenvectors;
        // eigenvectors of a real symmetric matrix can be chosen real; rotate
        // each column so its largest entry is real before dropping phases
        let n = self.rows;
        let mut vecs = RMat::zeros(n, n);
        for k in 0..n {
            let mut best = 0;
            for i in 0..n {
                if v[(i, k)].norm() > v[(best, k)].norm() {
                    best = i;
                }
            }
            let phase = v[(best, k)].conj() / v[(best, k)].norm().max(f64::MIN_POSITIVE);
            let col: Vec<f64> = (0..n).map(|i| (v[(i, k)] * phase).re).collect();
            let nrm = col
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt()
                .max(f64::MIN_POSITIVE);
            for i in 0..n {
                vecs.set(i, k, col[i] / nrm);
            }
        }
        (d.eigenvalues, vecs)
    }

    /// Orthonormal basis (as columns) of the row space, i.e. the orthogonal
    /// complement of the kernel. Directions with singular value below
    /// `rel_tol * sigma_max` count as kernel.
    pub fn row_space_basis(&self, rel_tol: f64) -> RMat {
        let gram = self.transpose().mul(self);
        let (vals, vecs) = gram.sym_eigh();
        let top = vals.last().copied().unwrap_or(0.0).max(0.0);
        let keep: Vec<usize> = (0..vals.len())
            .filter(|&k| top > 0.0 && vals[k] > gram_cut(rel_tol) * top)
            .collect();
        RMat::from_fn(self.cols, keep.len(), |i, j| vecs.get(i, keep[j]))
    }

    /// Orthonormal basis (as columns) of the kernel.
    pub fn kernel_basis(&self, rel_tol: f64) -> RMat {
        let gram = self.transpose().mul(self);
        let (vals, vecs) = gram.sym_eigh();
        let top = vals.last().copied().unwrap_or(0.0).max(0.0);
        let keep: Vec<usize> = (0..vals.len())
            .filter(|&k| top == 0.0 || vals[k] <= gram_cut(rel_tol) * top)
            .collect();
        RMat::from_fn(self.cols, keep.len(), |i, j| vecs.get(i, keep[j]))
    }

    /// Numerical rank with the same cut as `row_space_basis`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        self.row_space_basis(rel_tol).cols
    }

    /// Minimum-norm least squares solution of `self * x = b` and the residual
    /// norm.
    pub fn least_squares(&self, b: &[f64], rel_tol: f64) -> (Vec<f64>, f64) {
        let q = self.row_space_basis(rel_tol);
        // x = Q y with (A Q)^T (A Q) y = (A Q)^T b
        let aq = self.mul(&q);
        let normal = aq.transpose().mul(&aq);
        let rhs = aq.tmul_vec(b);
        let y = solve_spd(&normal, &rhs, 0.0).unwrap_or_else(|_| vec![0.0; q.cols]);
        let x = q.mul_vec(&y);
        let ax = self.mul_vec(&x);
        let res = ax
            .iter()
            .zip(b)
            .map(|(p, r)| (p - r).powi(2))
            .sum::<f64>()
            .sqrt();
        (x, res)
    }
}

/// Relative eigenvalue cut on a Gram matrix; eigenvalues below a few ulps of
/// the top one are roundoff.
fn gram_cut(rel_tol: f64) -> f64 {
    (rel_tol * rel_tol).max(64.0 * f64::EPSILON)
}

/// Solves `A x = b` for symmetric positive (semi)definite `A` via Cholesky,
/// adding `ridge * (1 + max diag)` to the diagonal.
pub fn solve_spd(a: &RMat, b: &[f64], ridge: f64) -> Result<Vec<f64>> {
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let maxdiag = (0..n).map(|i| a.get(i, i).abs()).fold(0.0, f64::max);
    let shift = ridge * (1.0 + maxdiag);
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a.get(j, j) + shift;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Numerical(
                "Newton system not positive definite".into(),
            ));
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    Ok(y)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_row_space_are_complementary() {
        let a = RMat::from_fn(2, 3, |i, j| [[1.0, 1.0, 0.0], [0.0, 0.0, 2.0]][i][j]);
        assert_eq!(a.rank(1e-10), 2);
        let k = a.kernel_basis(1e-10);
        assert_eq!(k.cols, 1);
        let kv = a.mul_vec(&k.column(0));
        assert!(norm2(&kv) < 1e-12);
    }

    #[test]
    fn least_squares_min_norm() {
        let a = RMat::from_fn(1, 2, |_, _| 1.0);
        let (x, res) = a.least_squares(&[2.0], 1e-12);
        assert!(res < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spd_solve() {
        let a = RMat::from_fn(2, 2, |i, j| if i == j { 2.0 } else { 1.0 });
        let x = solve_spd(&a, &[3.0, 3.0], 0.0).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }
}
