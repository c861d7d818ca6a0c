//! Dense complex matrices over a generic real scalar.
//!
//! Storage is row-major. Everything here is sized for desk-scale problems
//! (ambient dimension at most a few dozen), so all algorithms are dense and
//! direct.

mod eigen;
mod serde_impl;

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use eigen::{cholesky, HermitianDecomposition};

/// Relative tolerance for the uniform positivity test: `A >= 0` iff
/// `lambda_min(A) >= -PSD_TOL * (1 + ||A||)`.
pub const PSD_TOL: f64 = 1e-9;

/// Tolerance for accepting a matrix as Hermitian in `eigh`.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrices must be non-empty".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::one()
            } else {
                Complex::zero()
            }
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_fn(rows, cols, |i, j| Complex::new(f(i, j), T::zero()))
    }

    pub fn diag_real(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(values[i], T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    pub fn diag(values: &[Complex<T>]) -> Self {
        let n = values.len();
        Self::from_fn(
            n,
            n,
            |i, j| if i == j { values[i] } else { Complex::zero() },
        )
    }

    /// Matrix unit `e_ij` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = Complex::one();
        m
    }

    /// Column vector from entries.
    pub fn column(v: &[Complex<T>]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Rank-one operator `|u><v|`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        for (idx, z) in self.data.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite {
                    row: idx / self.cols,
                    col: idx % self.cols,
                });
            }
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: Complex<T>, other: &Self) {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "axpy shape"
        );
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b * s;
        }
    }

    /// `self += s * other` for real `s`.
    pub fn axpy_real(&mut self, s: T, other: &Self) {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "axpy shape"
        );
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b * s;
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Hilbert-Schmidt inner product `tr(A* B)`, conjugate-linear in `self`.
    pub fn hs_inner(&self, other: &Self) -> Complex<T> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Kronecker product with entry `(i*p + k, j*q + l) = A(i,j) * B(k,l)`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |r, c| {
            self[(r / p, c / q)] * other[(r % p, c % q)]
        })
    }

    /// `(A + A*) / 2`.
    pub fn re_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * half
        })
    }

    /// `(A - A*) / (2i)`.
    pub fn im_part(&self) -> Self {
        let factor = Complex::new(T::zero(), -T::lit(0.5));
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] - self[(j, i)].conj()) * factor
        })
    }

    /// Frobenius norm of `A - A*`.
    pub fn hermitian_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut acc = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc = acc + (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.hermitian_defect() <= tol
    }

    /// Top-left `r x c` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, r: usize, c: usize) -> Self {
        Self::from_fn(r, c, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Block-diagonal direct sum `A ⊕ B`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    /// Hermitian dilation `[[0, A], [A*, 0]]`; its spectrum is `±` the singular
    /// values of `A`.
    pub fn dilation(&self) -> Self {
        let mut m = Self::zeros(self.rows + self.cols, self.rows + self.cols);
        m.set_block(0, self.rows, self);
        m.set_block(self.rows, 0, &self.adjoint());
        m
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.cols, "mul_vec shape");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// `<v, A v>`.
    pub fn quadratic_form(&self, v: &[Complex<T>]) -> Complex<T> {
        let av = self.mul_vec(v);
        v.iter()
            .zip(&av)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<T> {
        self.check_finite()?;
        Ok(self.operator_norm_unchecked())
    }

    pub(crate) fn operator_norm_unchecked(&self) -> T {
        if self.rows == 1 || self.cols == 1 {
            return self.frobenius_norm();
        }
        if self.is_hermitian(T::lit(HERMITIAN_TOL) * (T::one() + self.max_abs())) {
            let d = self.hermitian_eigh();
            let lo = d.eigenvalues[0].abs();
            let hi = d.eigenvalues[d.eigenvalues.len() - 1].abs();
            return lo.max(hi);
        }
        let gram = if self.rows <= self.cols {
            self * &self.adjoint()
        } else {
            &self.adjoint() * self
        };
        let d = gram.re_part().hermitian_eigh();
        d.eigenvalues[d.eigenvalues.len() - 1].max(T::zero()).sqrt()
    }

    /// Eigendecomposition of a Hermitian matrix, ascending eigenvalues.
    pub fn eigh(&self) -> Result<HermitianDecomposition<T>> {
        self.check_finite()?;
        if !self.is_square() {
            return Err(Error::Dimension("eigh requires a square matrix".into()));
        }
        let defect = self.hermitian_defect();
        if defect > T::lit(HERMITIAN_TOL) * (T::one() + self.max_abs()) {
            return Err(Error::NotHermitian(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(self.re_part().hermitian_eigh())
    }

    /// Jacobi eigensolver on the (assumed exactly) Hermitian matrix.
    pub(crate) fn hermitian_eigh(&self) -> HermitianDecomposition<T> {
        eigen::jacobi_eigh(self)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigh()?.eigenvalues[0])
    }

    /// Uniform positivity test shared by every module.
    pub fn is_psd(&self) -> Result<bool> {
        let d = self.eigh()?;
        let norm = d
            .eigenvalues
            .iter()
            .fold(T::zero(), |acc, l| acc.max(l.abs()));
        Ok(d.eigenvalues[0] >= -T::lit(PSD_TOL) * (T::one() + norm))
    }

    /// Applies `f` to the spectrum of a Hermitian matrix.
    pub fn hermitian_map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Ok(self.eigh()?.map_spectrum(f))
    }

    /// Projection onto the positive semidefinite cone (Frobenius metric).
    pub fn psd_projection(&self) -> Self {
        self.re_part()
            .hermitian_eigh()
            .map_spectrum(|l| l.max(T::zero()))
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return Err(Error::Dimension(
                "solve needs square A and matching b".into(),
            ));
        }
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let scale = self.max_abs().max(T::min_positive_value());
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].norm() > a[piv * n + col].norm() {
                    piv = r;
                }
            }
            if a[piv * n + col].norm() <= T::lit(1e-14) * scale {
                return Err(Error::Numerical("singular system".into()));
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                x.swap(piv, col);
            }
            let inv: Complex<T> = Complex::<T>::one() / a[col * n + col];
            for r in col + 1..n {
                let f: Complex<T> = a[r * n + col] * inv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[col * n + c];
                    a[r * n + c] = a[r * n + c] - f * v;
                }
                let xc = x[col];
                x[r] = x[r] - f * xc;
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col];
            for c in col + 1..n {
                acc = acc - a[col * n + c] * x[c];
            }
            x[col] = acc / a[col * n + col];
        }
        Ok(x)
    }

    /// Power of a square matrix by repeated squaring (`k >= 0`).
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// `exp(-i t H)` for Hermitian `H`.
    pub fn unitary_exp(&self, t: T) -> Result<Self> {
        let d = self.eigh()?;
        let n = self.rows;
        let phases: Vec<Complex<T>> = d
            .eigenvalues
            .iter()
            .map(|l| Complex::new(T::zero(), -t * *l).exp())
            .collect();
        let v = &d.eigenvectors;
        Ok(Self::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + v[(i, k)] * phases[k] * v[(j, k)].conj()
            })
        }))
    }

    /// Stacks real and imaginary parts, row-major, into a real vector.
    pub fn to_real_vec(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(2 * self.data.len());
        out.extend(self.data.iter().map(|z| z.re));
        out.extend(self.data.iter().map(|z| z.im));
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.scale_real(-T::one())
    }
}

impl<T: Real> AddAssign<&Matrix<T>> for Matrix<T> {
    fn add_assign(&mut self, rhs: &Matrix<T>) {
        self.axpy_real(T::one(), rhs);
    }
}

impl<T: Real> SubAssign<&Matrix<T>> for Matrix<T> {
    fn sub_assign(&mut self, rhs: &Matrix<T>) {
        self.axpy_real(-T::one(), rhs);
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "mul shape");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut data = vec![Complex::zero(); n * p];
        for i in 0..n {
            for k in 0..m {
                let a = self.data[i * m + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * p..(k + 1) * p];
                let out = &mut data[i * p..(i + 1) * p];
                for (o, b) in out.iter_mut().zip(row) {
                    *o = *o + a * *b;
                }
            }
        }
        Matrix {
            rows: n,
            cols: p,
            data,
        }
    }
}

/// Double precision complex matrix used throughout the library.
pub type CMatrix = Matrix<f64>;

/// Real-linear combination `sum_j c_j M_j`.
pub fn real_combination(coeffs: &[f64], mats: &[CMatrix]) -> CMatrix {
    assert_eq!(coeffs.len(), mats.len(), "combination length");
    let mut out = CMatrix::zeros(mats[0].rows(), mats[0].cols());
    for (c, m) in coeffs.iter().zip(mats) {
        if *c != 0.0 {
            out.axpy_real(*c, m);
        }
    }
    out
}

/// Complex-linear combination `sum_j c_j M_j`.
pub fn complex_combination(coeffs: &[Complex<f64>], mats: &[CMatrix]) -> CMatrix {
    assert_eq!(coeffs.len(), mats.len(), "combination length");
    let mut out = CMatrix::zeros(mats[0].rows(), mats[0].cols());
    for (c, m) in coeffs.iter().zip(mats) {
        if !c.is_zero() {
            out.axpy(*c, m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random(rng: &mut ChaCha8Rng, r: usize, cl: usize) -> CMatrix {
        CMatrix::from_fn(r, cl, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    /// Power iteration on `A* A`, independent of the Jacobi path.
    fn power_iteration_norm(a: &CMatrix) -> f64 {
        let g = &a.adjoint() * a;
        let mut v: Vec<Complex<f64>> = (0..g.cols())
            .map(|i| c(1.0 + i as f64 * 0.1, 0.3))
            .collect();
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let w = g.mul_vec(&v);
            let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v = w.iter().map(|z| z / n).collect();
            lambda = n;
        }
        lambda.sqrt()
    }

    #[test]
    fn identity_norm_is_one() {
        assert!((CMatrix::identity(3).operator_norm().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_norm() {
        let d = CMatrix::diag_real(&[2.0, -5.0]);
        assert!((d.operator_norm().unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn norm_matches_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a = random(&mut rng, 4, 3);
            let ours = a.operator_norm().unwrap();
            let oracle = power_iteration_norm(&a);
            assert!(
                (ours - oracle).abs() < 1e-8 * (1.0 + oracle),
                "{ours} vs {oracle}"
            );
        }
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = CMatrix::identity(2);
        a[(1, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(
            a.operator_norm(),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn eigh_diag_and_pauli_x() {
        let d = CMatrix::diag_real(&[1.0, 2.0]).eigh().unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0]);
        assert!((&d.eigenvectors - &CMatrix::identity(2)).max_abs() < 1e-14);

        // characteristic polynomial of [[0,1],[1,0]] is l^2 - 1
        let x = CMatrix::from_real_fn(2, 2, |i, j| if i != j { 1.0 } else { 0.0 });
        let d = x.eigh().unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_random_reconstructs_and_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 5, 9] {
            let b = random(&mut rng, n, n);
            let a = &b + &b.adjoint();
            let d = a.eigh().unwrap();
            let tr: f64 = d.eigenvalues.iter().sum();
            assert!((tr - a.trace().re).abs() < 1e-10);
            let rec = d.reconstruct();
            assert!((&rec - &a).max_abs() <= 1e-10 * (1.0 + a.operator_norm().unwrap()));
            let u = &d.eigenvectors;
            assert!((&(&u.adjoint() * u) - &CMatrix::identity(n)).max_abs() < 1e-10);
            assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let a = CMatrix::unit(2, 0, 1);
        assert!(matches!(a.eigh(), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn kron_conventions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(&mut rng, 2, 2);
        let k = CMatrix::identity(2).kron(&a);
        assert_eq!(k, a.direct_sum(&a));

        let e = CMatrix::unit(2, 0, 0).kron(&CMatrix::unit(2, 0, 0));
        assert_eq!(e[(0, 0)], c(1.0, 0.0));
        assert!((e.frobenius_norm() - 1.0).abs() < 1e-15);

        for _ in 0..10 {
            let a = random(&mut rng, 2, 3);
            let b = random(&mut rng, 3, 2);
            let lhs = a.kron(&b).operator_norm().unwrap();
            let rhs = a.operator_norm().unwrap() * b.operator_norm().unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn real_and_imaginary_parts_recombine() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random(&mut rng, 3, 3);
        let mut sum = a.re_part();
        sum.axpy(c(0.0, 1.0), &a.im_part());
        assert!((&sum - &a).max_abs() < 1e-15);
        assert!(a.re_part().is_hermitian(0.0));
        assert!(a.im_part().hermitian_defect() < 1e-15);
    }

    #[test]
    fn psd_tolerance_is_relative() {
        let a = CMatrix::diag_real(&[1e3, -1e-7]);
        assert!(a.is_psd().unwrap());
        let b = CMatrix::diag_real(&[1.0, -1e-6]);
        assert!(!b.is_psd().unwrap());
    }

    #[test]
    fn solve_recovers_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random(&mut rng, 4, 4);
        let x: Vec<_> = (0..4).map(|i| c(i as f64, 1.0)).collect();
        let b = a.mul_vec(&x);
        let y = a.solve(&b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn generic_over_f32() {
        let a = Matrix::<f32>::diag_real(&[3.0, -4.0]);
        assert!((a.operator_norm().unwrap() - 4.0).abs() < 1e-5);
        let d = a.eigh().unwrap();
        assert!((d.eigenvalues[0] + 4.0).abs() < 1e-5);
    }

    #[test]
    fn unitary_exp_is_unitary() {
        let x = CMatrix::from_real_fn(2, 2, |i, j| if i != j { 0.5 } else { 0.0 });
        let u = x.unitary_exp(0.7).unwrap();
        assert!((&(&u * &u.adjoint()) - &CMatrix::identity(2)).max_abs() < 1e-13);
    }

    #[test]
    fn dilation_spectrum_is_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random(&mut rng, 2, 3);
        let d = a.dilation().eigh().unwrap();
        let top = d.eigenvalues[d.eigenvalues.len() - 1];
        assert!((top - a.operator_norm().unwrap()).abs() < 1e-12);
        assert!((d.eigenvalues[0] + top).abs() < 1e-12);
    }
}
