use num_complex::Complex;
use num_traits::Zero;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// `A = V diag(eigenvalues) V*`, eigenvalues ascending, eigenvectors as
/// columns of `V`.
#[derive(Clone, Debug)]
pub struct HermitianDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> HermitianDecomposition<T> {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        let v = &self.eigenvectors;
        (0..v.rows()).map(|i| v[(i, k)]).collect()
    }

    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let vals: Vec<T> = self.eigenvalues.iter().map(|l| f(*l)).collect();
        let v = &self.eigenvectors;
        let mut out = Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + v[(i, k)] * vals[k] * v[(j, k)].conj()
            })
        });
        // symmetrize away rounding so downstream Hermitian checks stay exact
        out = out.re_part();
        out
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.map_spectrum(|l| l)
    }
}

/// Cyclic complex Jacobi. Each step conjugates by `U = D R` where
/// `D = diag(1, e^{-i phi})` makes the pivot real and `R` is the real
/// rotation that annihilates it.
pub(super) fn jacobi_eigh<T: Real>(input: &Matrix<T>) -> HermitianDecomposition<T> {
    let n = input.rows();
    let mut a = input.clone();
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
    }
    let mut v = Matrix::<T>::identity(n);
    let total = a.frobenius_norm();
    let tiny = T::jacobi_eps() * total;

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tiny || total.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= tiny * T::lit(1e-3) {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (theta * theta + T::one()).sqrt())
                } else {
                    -T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let ph = phase.conj();
                let upp = Complex::new(c, T::zero());
                let upq = Complex::new(s, T::zero());
                let uqp = ph * (-s);
                let uqq = ph * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Lower-triangular `L` with `A = L L*` for positive definite `A`.
pub fn cholesky<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::Dimension("cholesky requires a square matrix".into()));
    }
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d = d - l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::Numerical("matrix is not positive definite".into()));
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex::new(djj, T::zero());
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}
