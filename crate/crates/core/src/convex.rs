//! Primal log-barrier solver for small linear matrix inequality problems.
//!
//! Two shapes are exposed:
//!
//! * [`min_max_norm`]: `inf_w max_t ||M_t(w)||` for affine matrix maps `M_t`.
//! * [`max_linear_over_ball`]: `sup { c.w : ||M_t(w)|| <= 1 for all t }` for
//!   linear `M_t`.
//!
//! Both are rewritten as `min c.x` subject to Hermitian `F_i(x) >= 0` and
//! solved by Newton centering along the barrier path. The returned point is
//! strictly feasible, so the reported objective is attained (an upper bound
//! for the inf, a lower bound for the sup) and `gap` bounds its distance to
//! the optimum.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{cholesky, CMatrix};
use crate::real::{dot, norm2, solve_spd, RMat};

/// `M(w) = constant + sum_j w_j coeffs[j]`.
#[derive(Clone, Debug)]
pub struct AffineMatrix {
    pub constant: CMatrix,
    pub coeffs: Vec<CMatrix>,
}

impl AffineMatrix {
    pub fn linear(coeffs: Vec<CMatrix>) -> Self {
        let constant = CMatrix::zeros(coeffs[0].rows(), coeffs[0].cols());
        Self { constant, coeffs }
    }

    pub fn eval(&self, w: &[f64]) -> CMatrix {
        let mut out = self.constant.clone();
        for (c, m) in w.iter().zip(&self.coeffs) {
            if *c != 0.0 {
                out.axpy_real(*c, m);
            }
        }
        out
    }

    fn is_hermitian(&self) -> bool {
        let tol = 1e-13;
        self.constant
            .is_hermitian(tol * (1.0 + self.constant.max_abs()))
            && self
                .coeffs
                .iter()
                .all(|m| m.is_hermitian(tol * (1.0 + m.max_abs())))
    }

    /// Substitutes `w = q z`.
    fn reparametrize(&self, q: &RMat) -> Self {
        let coeffs = (0..q.cols)
            .map(|j| {
                let mut m = CMatrix::zeros(self.constant.rows(), self.constant.cols());
                for (i, c) in self.coeffs.iter().enumerate() {
                    let s = q.get(i, j);
                    if s != 0.0 {
                        m.axpy_real(s, c);
                    }
                }
                m
            })
            .collect();
        Self {
            constant: self.constant.clone(),
            coeffs,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Stop once the barrier duality gap bound falls below
    /// `gap_tol * (1 + |objective|)`.
    pub gap_tol: f64,
    pub max_newton: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-9,
            max_newton: 2000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub w: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    pub newton_steps: usize,
}

/// Hermitian `F(x) = a0 + sum_j x_j a[j]`.
struct Lmi {
    a0: CMatrix,
    a: Vec<CMatrix>,
}

impl Lmi {
    fn eval(&self, x: &[f64]) -> CMatrix {
        let mut f = self.a0.clone();
        for (c, m) in x.iter().zip(&self.a) {
            if *c != 0.0 {
                f.axpy_real(*c, m);
            }
        }
        f
    }
}

fn stacked_real(terms: &[AffineMatrix], dim: usize) -> RMat {
    let rows: usize = terms
        .iter()
        .map(|t| 2 * t.constant.rows() * t.constant.cols())
        .sum();
    let mut s = RMat::zeros(rows, dim);
    let mut r0 = 0;
    for t in terms {
        let len = 2 * t.constant.rows() * t.constant.cols();
        for (j, c) in t.coeffs.iter().enumerate() {
            for (i, v) in c.to_real_vec().into_iter().enumerate() {
                s.set(r0 + i, j, v);
            }
        }
        r0 += len;
    }
    s
}

/// `||M|| <= t` as one or two Hermitian LMIs in `(z, t)`.
fn norm_lmis(term: &AffineMatrix, t_coeff: f64, t_const: f64, out: &mut Vec<Lmi>) {
    let nz = term.coeffs.len();
    if term.is_hermitian() {
        let n = term.constant.rows();
        let id = CMatrix::identity(n);
        for sign in [1.0, -1.0] {
            let mut a0 = id.scale_real(t_const);
            a0.axpy_real(-sign, &term.constant);
            let mut a: Vec<CMatrix> = term.coeffs.iter().map(|m| m.scale_real(-sign)).collect();
            a.push(id.scale_real(t_coeff));
            debug_assert_eq!(a.len(), nz + 1);
            out.push(Lmi {
                a0: a0.re_part(),
                a: a.iter().map(|m| m.re_part()).collect(),
            });
        }
    } else {
        let d0 = term.constant.dilation();
        let n = d0.rows();
        let id = CMatrix::identity(n);
        let mut a0 = id.scale_real(t_const);
        a0.axpy_real(-1.0, &d0);
        let mut a: Vec<CMatrix> = term
            .coeffs
            .iter()
            .map(|m| m.dilation().scale_real(-1.0))
            .collect();
        a.push(id.scale_real(t_coeff));
        out.push(Lmi { a0, a });
    }
}

fn lower_triangular_inverse(l: &CMatrix) -> CMatrix {
    let n = l.rows();
    let mut inv = CMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = Complex::new(1.0, 0.0) / l[(j, j)];
        for i in j + 1..n {
            let mut s = Complex::new(0.0, 0.0);
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

fn log_det_barrier(lmis: &[Lmi], x: &[f64]) -> Option<f64> {
    let mut acc = 0.0;
    for lmi in lmis {
        let l = cholesky(&lmi.eval(x)).ok()?;
        for i in 0..l.rows() {
            acc -= 2.0 * l[(i, i)].re.ln();
        }
    }
    Some(acc)
}

/// Minimizes `c.x` over `{x : F_i(x) > 0}` from the strictly feasible `x0`.
fn barrier_minimize(
    c: &[f64],
    lmis: &[Lmi],
    x0: Vec<f64>,
    opts: SolverOptions,
) -> Result<Solution> {
    let dim = c.len();
    let m_total: f64 = lmis.iter().map(|l| l.a0.rows() as f64).sum();
    let mut x = x0;
    if log_det_barrier(lmis, &x).is_none() {
        return Err(Error::Numerical(
            "barrier start is not strictly feasible".into(),
        ));
    }
    let mut s = 1.0;
    let mut steps = 0usize;
    loop {
        // centering
        for _ in 0..200 {
            if steps >= opts.max_newton {
                break;
            }
            steps += 1;
            let mut grad: Vec<f64> = c.iter().map(|ci| s * ci).collect();
            let mut hess = RMat::zeros(dim, dim);
            for lmi in lmis {
                let l = cholesky(&lmi.eval(&x))?;
                let li = lower_triangular_inverse(&l);
                let lia = li.adjoint();
                let bs: Vec<CMatrix> = lmi.a.iter().map(|a| &(&li * a) * &lia).collect();
                for j in 0..dim {
                    grad[j] -= bs[j].trace().re;
                    for k in j..dim {
                        let h = bs[j].hs_inner(&bs[k]).re;
                        hess.data[j * dim + k] += h;
                        if k != j {
                            hess.data[k * dim + j] += h;
                        }
                    }
                }
            }
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = solve_spd(&hess, &neg, 1e-14).or_else(|_| solve_spd(&hess, &neg, 1e-9))?;
            let decrement = -dot(&grad, &step);
            if decrement / 2.0 <= 1e-10 {
                break;
            }
            let phi0 = s * dot(c, &x) + log_det_barrier(lmis, &x).expect("current point feasible");
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + alpha * b).collect();
                if let Some(bar) = log_det_barrier(lmis, &trial) {
                    let phi = s * dot(c, &trial) + bar;
                    if phi <= phi0 - 0.25 * alpha * decrement {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let value = dot(c, &x);
        let gap = m_total / s;
        if gap <= opts.gap_tol * (1.0 + value.abs()) || steps >= opts.max_newton {
            return Ok(Solution {
                w: x,
                value,
                gap,
                newton_steps: steps,
            });
        }
        s *= 8.0;
    }
}

fn max_norm(terms: &[AffineMatrix], w: &[f64]) -> f64 {
    terms
        .iter()
        .map(|t| t.eval(w).operator_norm_unchecked())
        .fold(0.0, f64::max)
}

/// `inf_w max_t ||M_t(w)||` over `w` in `R^dim`.
///
/// Directions that leave every `M_t` unchanged are projected out, so the
/// returned minimizer is the one of smallest Euclidean norm along them.
pub fn min_max_norm(terms: &[AffineMatrix], dim: usize, opts: SolverOptions) -> Result<Solution> {
    if terms.is_empty() {
        return Ok(Solution {
            w: vec![0.0; dim],
            value: 0.0,
            gap: 0.0,
            newton_steps: 0,
        });
    }
    for t in terms {
        if t.coeffs.len() != dim {
            return Err(Error::Dimension("affine term arity mismatch".into()));
        }
    }
    let q = stacked_real(terms, dim).row_space_basis(1e-11);
    if q.cols == 0 {
        let w = vec![0.0; dim];
        let value = max_norm(terms, &w);
        return Ok(Solution {
            w,
            value,
            gap: 0.0,
            newton_steps: 0,
        });
    }
    let reduced: Vec<AffineMatrix> = terms.iter().map(|t| t.reparametrize(&q)).collect();
    let nz = q.cols;
    let mut lmis = Vec::new();
    for t in &reduced {
        norm_lmis(t, 1.0, 0.0, &mut lmis);
    }
    let start_norm = max_norm(terms, &vec![0.0; dim]);
    let mut x0 = vec![0.0; nz + 1];
    x0[nz] = 1.5 * start_norm + 1.0;
    let mut c = vec![0.0; nz + 1];
    c[nz] = 1.0;
    let sol = barrier_minimize(&c, &lmis, x0, opts)?;
    let w = q.mul_vec(&sol.w[..nz]);
    let value = max_norm(terms, &w);
    Ok(Solution {
        gap: sol.gap,
        w,
        value,
        newton_steps: sol.newton_steps,
    })
}

/// `sup { c.w : ||M_t(w)|| <= 1 for all t }` for linear maps `M_t`.
///
/// Fails when `c` has a component along a direction that all `M_t` ignore
/// (the supremum is then infinite).
pub fn max_linear_over_ball(
    terms: &[AffineMatrix],
    c: &[f64],
    opts: SolverOptions,
) -> Result<Solution> {
    let dim = c.len();
    for t in terms {
        if t.coeffs.len() != dim {
            return Err(Error::Dimension("linear term arity mismatch".into()));
        }
    }
    let q = if terms.is_empty() {
        RMat::zeros(dim, 0)
    } else {
        stacked_real(terms, dim).row_space_basis(1e-11)
    };
    let cz = q.tmul_vec(c);
    let proj = q.mul_vec(&cz);
    let outside: Vec<f64> = c.iter().zip(&proj).map(|(a, b)| a - b).collect();
    if norm2(&outside) > 1e-9 * (1.0 + norm2(c)) {
        return Err(Error::Numerical(
            "objective is unbounded on the seminorm ball".into(),
        ));
    }
    if q.cols == 0 || norm2(&cz) == 0.0 {
        return Ok(Solution {
            w: vec![0.0; dim],
            value: 0.0,
            gap: 0.0,
            newton_steps: 0,
        });
    }
    let nz = q.cols;
    let mut lmis = Vec::new();
    for t in terms {
        let r = AffineMatrix::linear(t.coeffs.clone()).reparametrize(&q);
        // ||M(z)|| <= 1: the "t" slot is absent, so drop the trailing coefficient
        let mut tmp = Vec::new();
        norm_lmis(&r, 0.0, 1.0, &mut tmp);
        for mut l in tmp {
            l.a.pop();
            lmis.push(l);
        }
    }
    let neg: Vec<f64> = cz.iter().map(|v| -v).collect();
    let sol = barrier_minimize(&neg, &lmis, vec![0.0; nz], opts)?;
    let w = q.mul_vec(&sol.w);
    Ok(Solution {
        value: dot(c, &w),
        w,
        gap: sol.gap,
        newton_steps: sol.newton_steps,
    })
}

/// `sup_w lambda_min(A(w))` for a Hermitian affine family `A`.
///
/// The family must keep `lambda_min` bounded above (for instance by a fixed
/// trace); otherwise the search stops at the Newton step cap.
pub fn max_min_eigenvalue(family: &AffineMatrix, opts: SolverOptions) -> Result<Solution> {
    let dim = family.coeffs.len();
    let base = family.constant.eigh()?.eigenvalues[0];
    let q = if dim == 0 {
        RMat::zeros(0, 0)
    } else {
        stacked_real(std::slice::from_ref(family), dim).row_space_basis(1e-11)
    };
    if q.cols == 0 {
        return Ok(Solution {
            w: vec![0.0; dim],
            value: base,
            gap: 0.0,
            newton_steps: 0,
        });
    }
    let r = family.reparametrize(&q);
    let nz = q.cols;
    let id = CMatrix::identity(r.constant.rows());
    let mut a: Vec<CMatrix> = r.coeffs.iter().map(|m| m.re_part()).collect();
    a.push(id.scale_real(-1.0));
    let lmis = [Lmi {
        a0: r.constant.re_part(),
        a,
    }];
    let mut x0 = vec![0.0; nz + 1];
    x0[nz] = base - 1.0;
    let mut c = vec![0.0; nz + 1];
    c[nz] = -1.0;
    let sol = barrier_minimize(&c, &lmis, x0, opts)?;
    let w = q.mul_vec(&sol.w[..nz]);
    let value = family.eval(&w).re_part().hermitian_eigh().eigenvalues[0];
    Ok(Solution {
        w,
        value,
        gap: sol.gap,
        newton_steps: sol.newton_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> CMatrix {
        CMatrix::diag_real(v)
    }

    #[test]
    fn minimax_of_two_absolute_values() {
        // max(|1 - w|, |w|) is minimized at w = 1/2
        let t = AffineMatrix {
            constant: d(&[1.0, 0.0]),
            coeffs: vec![d(&[-1.0, 1.0])],
        };
        let s = min_max_norm(&[t], 1, SolverOptions::default()).unwrap();
        assert!((s.value - 0.5).abs() < 1e-8, "{}", s.value);
        assert!((s.w[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn minimax_non_hermitian_uses_dilation() {
        let t = AffineMatrix {
            constant: CMatrix::identity(2),
            coeffs: vec![CMatrix::unit(2, 0, 1)],
        };
        let s = min_max_norm(&[t], 1, SolverOptions::default()).unwrap();
        assert!((s.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn linear_over_box_is_l1() {
        let t = AffineMatrix::linear(vec![d(&[1.0, 0.0]), d(&[0.0, 1.0])]);
        let s = max_linear_over_ball(&[t], &[2.0, -3.0], SolverOptions::default()).unwrap();
        assert!((s.value - 5.0).abs() < 1e-7, "{}", s.value);
    }

    #[test]
    fn unbounded_direction_rejected() {
        let t = AffineMatrix::linear(vec![d(&[1.0, 1.0]), d(&[0.0, 0.0])]);
        assert!(max_linear_over_ball(&[t], &[0.0, 1.0], SolverOptions::default()).is_err());
    }

    #[test]
    fn ignored_direction_projected_out() {
        let t = AffineMatrix {
            constant: d(&[2.0]),
            coeffs: vec![d(&[1.0]), d(&[0.0])],
        };
        let s = min_max_norm(&[t], 2, SolverOptions::default()).unwrap();
        assert!(s.value < 1e-7);
        assert!(s.w[1].abs() < 1e-12);
    }
    #[test]
    fn max_min_eigenvalue_with_fixed_trace() {
        // diag(1 + w, -w) has fixed trace 1; best lambda_min is 1/2 at w = -1/2
        let fam = AffineMatrix {
            constant: d(&[1.0, 0.0]),
            coeffs: vec![d(&[1.0, -1.0])],
        };
        let s = max_min_eigenvalue(&fam, SolverOptions::default()).unwrap();
        assert!((s.value - 0.5).abs() < 1e-8, "{}", s.value);
    }
}
