//! Every supported seminorm is reduced to one normal form:
//!
//! `L(c) = inf { max_t ||T_t(w)|| : proj(w) = c }`
//!
//! where `c` are Hermitian coordinates on the system, `w` ranges over a real
//! latent space, each `T_t` is real-linear into a fixed matrix shape, and
//! `proj` is a real matrix. Action and functional seminorms have `proj = I`;
//! quotients compose `proj` with the quotient map; direct sums stack latent
//! spaces and add the bridge as one more term.

use num_complex::Complex;

use crate::convex::{min_max_norm, AffineMatrix, SolverOptions};
use crate::error::{input, Result};
use crate::matrix::{complex_combination, real_combination, CMatrix};
use crate::real::{solve_spd, RMat};
use crate::C64;

#[derive(Clone, Debug)]
pub struct Compiled {
    pub dim: usize,
    pub latent: usize,
    /// `terms[t][j] = T_t(e_j)`.
    pub terms: Vec<Vec<CMatrix>>,
    pub proj: RMat,
    pinv: RMat,
    kernel: RMat,
}

/// Result of one normal-form evaluation.
#[derive(Clone, Debug)]
pub struct LatentEval {
    pub value: f64,
    /// Upper bound on `value - L(c)`; zero when the fiber is a single point.
    pub gap: f64,
    pub exact: bool,
    pub w_re: Vec<f64>,
    pub w_im: Vec<f64>,
}

impl Compiled {
    pub fn new(dim: usize, terms: Vec<Vec<CMatrix>>, proj: RMat) -> Self {
        let latent = proj.cols;
        debug_assert_eq!(proj.rows, dim);
        for t in &terms {
            debug_assert_eq!(t.len(), latent);
        }
        let q = proj.row_space_basis(1e-11);
        let aq = proj.mul(&q);
        let normal = aq.transpose().mul(&aq);
        let aqt = aq.transpose();
        let mut m = RMat::zeros(q.cols, dim);
        for i in 0..dim {
            let col = aqt.column(i);
            let y = solve_spd(&normal, &col, 0.0).unwrap_or_else(|_| vec![0.0; q.cols]);
            for (r, v) in y.into_iter().enumerate() {
                m.set(r, i, v);
            }
        }
        let pinv = q.mul(&m);
        let kernel = proj.kernel_basis(1e-11);
        let kernel = if q.cols == latent {
            RMat::zeros(latent, 0)
        } else {
            kernel
        };
        Self {
            dim,
            latent,
            terms,
            proj,
            pinv,
            kernel,
        }
    }

    /// Identity projection: the seminorm is `max_t ||T_t(c)||`.
    pub fn direct(dim: usize, terms: Vec<Vec<CMatrix>>) -> Self {
        Self::new(dim, terms, RMat::identity(dim))
    }

    pub fn fiber_dim(&self) -> usize {
        self.kernel.cols
    }

    pub fn kernel(&self) -> &RMat {
        &self.kernel
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            for m in t.iter_mut() {
                *m = m.scale_real(s);
            }
        }
        out
    }

    pub fn with_proj(&self, proj: RMat) -> Self {
        Self::new(proj.rows, self.terms.clone(), proj)
    }

    /// `max_t ||T_t(w)||` at a latent point.
    pub fn latent_value(&self, w: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| real_combination(w, t).operator_norm_unchecked())
            .fold(0.0, f64::max)
    }

    pub fn latent_value_complex(&self, w_re: &[f64], w_im: &[f64]) -> f64 {
        let w: Vec<C64> = w_re
            .iter()
            .zip(w_im)
            .map(|(a, b)| Complex::new(*a, *b))
            .collect();
        self.terms
            .iter()
            .map(|t| complex_combination(&w, t).operator_norm_unchecked())
            .fold(0.0, f64::max)
    }

    /// Term images as linear affine maps on the latent space.
    pub fn ball_terms(&self) -> Vec<AffineMatrix> {
        self.terms
            .iter()
            .map(|t| AffineMatrix::linear(t.clone()))
            .collect()
    }

    fn particular(&self, c: &[f64]) -> Result<Vec<f64>> {
        let w = self.pinv.mul_vec(c);
        let back = self.proj.mul_vec(&w);
        let res = back
            .iter()
            .zip(c)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if res > 1e-8 * (1.0 + scale) {
            return input(format!(
                "element has no preimage under the quotient map (residual {res:.2e})"
            ));
        }
        Ok(w)
    }

    /// Evaluates at complex coordinates `c_re + i c_im`.
    pub fn eval(&self, c_re: &[f64], c_im: &[f64], opts: SolverOptions) -> Result<LatentEval> {
        let w_re = self.particular(c_re)?;
        let w_im = self.particular(c_im)?;
        let is_real = c_im.iter().all(|v| *v == 0.0);
        let kdim = self.kernel.cols;
        if kdim == 0 {
            let value = if is_real {
                self.latent_value(&w_re)
            } else {
                self.latent_value_complex(&w_re, &w_im)
            };
            return Ok(LatentEval {
                value,
                gap: 0.0,
                exact: true,
                w_re,
                w_im,
            });
        }
        let kcols: Vec<Vec<f64>> = (0..kdim).map(|j| self.kernel.column(j)).collect();
        let i = Complex::new(0.0, 1.0);
        let mut affine = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut constant = real_combination(&w_re, t);
            if !is_real {
                constant.axpy(i, &real_combination(&w_im, t));
            }
            let mut coeffs: Vec<CMatrix> = kcols.iter().map(|k| real_combination(k, t)).collect();
            if !is_real {
                let extra: Vec<CMatrix> = coeffs.iter().map(|m| m.scale(i)).collect();
                coeffs.extend(extra);
            }
            affine.push(AffineMatrix { constant, coeffs });
        }
        let nvar = if is_real { kdim } else { 2 * kdim };
        let sol = min_max_norm(&affine, nvar, opts)?;
        let shift = |w0: &[f64], z: &[f64]| -> Vec<f64> {
            let kz = self.kernel.mul_vec(z);
            w0.iter().zip(kz).map(|(a, b)| a + b).collect()
        };
        let w_re = shift(&w_re, &sol.w[..kdim]);
        let w_im = if is_real {
            w_im
        } else {
            shift(&w_im, &sol.w[kdim..])
        };
        Ok(LatentEval {
            value: sol.value,
            gap: sol.gap,
            exact: false,
            w_re,
            w_im,
        })
    }

    /// Stacked real matrix of all terms (rows: real and imaginary entries).
    pub fn stacked(&self) -> RMat {
        let rows: usize = self
            .terms
            .iter()
            .map(|t| 2 * t[0].rows() * t[0].cols())
            .sum();
        let mut s = RMat::zeros(rows, self.latent);
        let mut r0 = 0;
        for t in &self.terms {
            let len = 2 * t[0].rows() * t[0].cols();
            for (j, m) in t.iter().enumerate() {
                for (r, v) in m.to_real_vec().into_iter().enumerate() {
                    s.set(r0 + r, j, v);
                }
            }
            r0 += len;
        }
        s
    }
}
