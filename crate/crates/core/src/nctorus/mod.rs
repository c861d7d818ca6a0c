//! Rational noncommutative tori realized by clock and shift matrices, their
//! gauge action, Fourier and Cesàro machinery, and finite-rank
//! approximation certificates.

mod approx;
mod fourier;
mod lip;

pub use approx::{
    afn_upper, lattice_bound, lip_net, net_defect, rcp_upper, total_boundedness, uniformity_probe,
    AfnResult, ProbeRow, RcpCertificate, RcpOptions, TotalBoundedness, UniformityProbe,
};
pub use fourier::{
    fejer_bound, fejer_kernel, fejer_kernel_sum, fejer_multiplier, FejerQuadrature,
    FourierPolynomial,
};
pub use lip::{check_length, torus_lip, LengthCheck, LengthFn, TorusLipOptions};

use std::f64::consts::TAU;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::matrix::CMatrix;
use crate::opsys::{CpMap, OperatorSystem, UcpMap};
use crate::C64;

/// Parameters of a rational torus: `rho_ij = exp(2 pi i p_ij / q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusParams {
    pub d: usize,
    pub q: usize,
    pub p: Vec<Vec<i64>>,
}

impl TorusParams {
    /// The two-torus with `rho_12 = exp(2 pi i p / q)`.
    pub fn two(q: usize, p: i64) -> Self {
        Self {
            d: 2,
            q,
            p: vec![vec![0, p], vec![-p, 0]],
        }
    }

    /// Rationalizes real angles `theta_ij` (`rho_ij = exp(2 pi i theta_ij)`)
    /// with a common denominator at most `max_q`.
    pub fn from_angles(theta: &[Vec<f64>], max_q: usize) -> Result<Self> {
        let d = theta.len();
        for q in 1..=max_q.max(1) {
            let mut p = vec![vec![0i64; d]; d];
            let mut ok = true;
            for i in 0..d {
                for j in 0..d {
                    let v = theta[i][j] * q as f64;
                    let r = v.round();
                    if (v - r).abs() > 1e-9 {
                        ok = false;
                    }
                    p[i][j] = r as i64;
                }
            }
            if ok {
                return Ok(Self { d, q, p });
            }
        }
        input(format!(
            "angles are not rational with denominator <= {max_q}; approximate them by fractions p/q first"
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// One clock and one shift on `C^q` (`d <= 2`, coprime phase).
    Pair,
    /// Weyl operators on `(C^q)^{⊗d}`.
    Weyl,
}

/// A clock-shift model of a rational noncommutative torus together with the
/// operator system spanned by its monomials.
#[derive(Clone, Debug)]
pub struct TorusSpec {
    params: TorusParams,
    layout: Layout,
    generators: Vec<CMatrix>,
    /// Residues of `Z_q^d`, represented in `(-q/2, q/2]`; zero first.
    residues: Vec<Vec<i64>>,
    monomials: Vec<CMatrix>,
    system: OperatorSystem,
}

fn clock(q: usize, power: i64) -> CMatrix {
    let w = TAU / q as f64;
    CMatrix::diag(
        &(0..q)
            .map(|k| Complex::from_polar(1.0, w * (power * k as i64).rem_euclid(q as i64) as f64))
            .collect::<Vec<_>>(),
    )
}

/// `e_k -> e_{k + power}`.
fn shift(q: usize, power: i64) -> CMatrix {
    CMatrix::from_fn(q, q, |a, b| {
        if (b as i64 + power).rem_euclid(q as i64) == a as i64 {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kron(f))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn mod_inverse(a: i64, q: i64) -> Option<i64> {
    (0..q).find(|x| (a * x).rem_euclid(q) == 1 % q)
}

/// Representative of `r mod q` in `(-q/2, q/2]`.
pub fn representative(r: i64, q: usize) -> i64 {
    let q = q as i64;
    let m = r.rem_euclid(q);
    if 2 * m > q {
        m - q
    } else {
        m
    }
}

fn power(u: &CMatrix, e: i64) -> CMatrix {
    if e >= 0 {
        u.pow(e as u32)
    } else {
        u.adjoint().pow((-e) as u32)
    }
}

fn residue_list(d: usize, q: usize) -> Vec<Vec<i64>> {
    let total = q.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut k = vec![0i64; d];
        let mut rest = idx;
        for slot in k.iter_mut() {
            *slot = representative((rest % q) as i64, q);
            rest /= q;
        }
        out.push(k);
    }
    // index 0 is the zero residue
    out
}

impl TorusSpec {
    pub fn new(params: TorusParams) -> Result<Self> {
        let TorusParams { d, q, ref p } = params;
        if d == 0 || q == 0 {
            return input("torus needs d >= 1 and q >= 1");
        }
        if p.len() != d || p.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension("phase matrix must be d x d".into()));
        }
        let qi = q as i64;
        for i in 0..d {
            if p[i][i].rem_euclid(qi) != 0 {
                return input("diagonal phases must be trivial");
            }
            for j in 0..d {
                if (p[i][j] + p[j][i]).rem_euclid(qi) != 0 {
                    return input("phase matrix must be antisymmetric modulo q");
                }
            }
        }
        let pair = d == 1 || (d == 2 && gcd(p[0][1], qi) == 1);
        let (layout, generators) = if pair {
            let gens = if d == 1 {
                vec![clock(q, 1)]
            } else {
                vec![clock(q, p[0][1]), shift(q, -1)]
            };
            (Layout::Pair, gens)
        } else {
            let mut gens = Vec::with_capacity(d);
            for i in 0..d {
                let factors: Vec<CMatrix> = (0..d)
                    .map(|k| {
                        if k == i {
                            shift(q, 1)
                        } else if k < i {
                            clock(q, p[k][i])
                        } else {
                            CMatrix::identity(q)
                        }
                    })
                    .collect();
                gens.push(kron_all(&factors));
            }
            (Layout::Weyl, gens)
        };
        let residues = residue_list(d, q);
        let monomials: Vec<CMatrix> = residues
            .iter()
            .map(|k| {
                let dim = generators[0].rows();
                k.iter()
                    .zip(&generators)
                    .fold(CMatrix::identity(dim), |acc, (&e, u)| &acc * &power(u, e))
            })
            .collect();
        let system = OperatorSystem::new(monomials.clone())?;
        Ok(Self {
            params,
            layout,
            generators,
            residues,
            monomials,
            system,
        })
    }

    /// Clock-shift model with `rho_ij = exp(2 pi i p_ij / q)`.
    pub fn clock_shift_algebra(d: usize, q: usize, p: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(TorusParams { d, q, p })
    }

    pub fn params(&self) -> &TorusParams {
        &self.params
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn q(&self) -> usize {
        self.params.q
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn system(&self) -> &OperatorSystem {
        &self.system
    }

    pub fn ambient_dim(&self) -> usize {
        self.system.ambient_dim()
    }

    pub fn residues(&self) -> &[Vec<i64>] {
        &self.residues
    }

    /// Basis of the system, in the order of [`residues`](Self::residues).
    pub fn monomials(&self) -> &[CMatrix] {
        &self.monomials
    }

    /// Largest degree whose monomials are pairwise non-aliased products.
    pub fn degree_cap(&self) -> usize {
        (self.q() - 1) / 2
    }

    pub fn rho(&self, i: usize, j: usize) -> C64 {
        Complex::from_polar(1.0, TAU * self.params.p[i][j] as f64 / self.q() as f64)
    }

    /// `max(||u_j u_i - rho_ij u_i u_j||, ||u_i* u_i - 1||)` over all pairs.
    pub fn relation_defect(&self) -> f64 {
        let d = self.d();
        let id = CMatrix::identity(self.ambient_dim());
        let mut worst: f64 = 0.0;
        for i in 0..d {
            let u = &self.generators[i];
            worst = worst.max((&(&u.adjoint() * u) - &id).max_abs());
            for j in 0..d {
                let v = &self.generators[j];
                let lhs = v * u;
                let rhs = (u * v).scale(self.rho(i, j));
                worst = worst.max((&lhs - &rhs).max_abs());
            }
        }
        worst
    }

    fn check_degree(&self, k: &[i64]) -> Result<()> {
        if k.len() != self.d() {
            return Err(Error::Dimension("multi-index length differs from d".into()));
        }
        if k.iter().any(|&e| e.unsigned_abs() as usize >= self.q()) {
            return input(format!(
                "degree {k:?} aliases on the q = {} model",
                self.q()
            ));
        }
        Ok(())
    }

    /// `u_1^{k_1} ... u_d^{k_d}` for `|k_i| < q`.
    pub fn monomial(&self, k: &[i64]) -> Result<CMatrix> {
        self.check_degree(k)?;
        let dim = self.ambient_dim();
        Ok(k.iter()
            .zip(&self.generators)
            .fold(CMatrix::identity(dim), |acc, (&e, u)| &acc * &power(u, e)))
    }

    /// Normalized trace.
    pub fn tau(&self, x: &CMatrix) -> C64 {
        x.trace() / self.ambient_dim() as f64
    }

    /// `tau(x (u^k)*)`.
    pub fn fourier_coeff(&self, x: &CMatrix, k: &[i64]) -> Result<C64> {
        let m = self.monomial(k)?;
        Ok(self.tau(&(x * &m.adjoint())))
    }

    fn coeffs_by_residue(&self, x: &CMatrix) -> Vec<C64> {
        self.monomials
            .iter()
            .map(|m| self.tau(&(x * &m.adjoint())))
            .collect()
    }

    /// Expansion of a model element over residue representatives.
    pub fn coefficients(&self, x: &CMatrix) -> Result<FourierPolynomial> {
        if x.rows() != self.ambient_dim() || x.cols() != self.ambient_dim() {
            return Err(Error::Dimension(
                "element does not live on the model".into(),
            ));
        }
        let mut poly = FourierPolynomial::zero(self.d());
        for (k, c) in self.residues.iter().zip(self.coeffs_by_residue(x)) {
            if c.norm() > 1e-14 {
                poly.add_term(k.clone(), c);
            }
        }
        Ok(poly)
    }

    pub fn to_matrix(&self, poly: &FourierPolynomial) -> Result<CMatrix> {
        if poly.d() != self.d() {
            return Err(Error::Dimension(
                "polynomial has the wrong number of variables".into(),
            ));
        }
        let dim = self.ambient_dim();
        let mut out = CMatrix::zeros(dim, dim);
        for (k, c) in poly.terms() {
            out.axpy(*c, &self.monomial(k)?);
        }
        Ok(out)
    }

    /// Unitary `W` with `W u_j W* = exp(2 pi i m_j / q) u_j`.
    pub fn lattice_unitary(&self, m: &[i64]) -> Result<CMatrix> {
        if m.len() != self.d() {
            return Err(Error::Dimension(
                "lattice point has the wrong length".into(),
            ));
        }
        let q = self.q();
        let qi = q as i64;
        Ok(match self.layout {
            Layout::Pair if self.d() == 1 => shift(q, -m[0]),
            Layout::Pair => {
                let inv =
                    mod_inverse(self.params.p[0][1].rem_euclid(qi), qi).expect("coprime phase");
                let a = (m[0] * inv).rem_euclid(qi);
                &shift(q, -a) * &clock(q, -m[1])
            }
            Layout::Weyl => {
                let factors: Vec<CMatrix> = m.iter().map(|&e| clock(q, e)).collect();
                kron_all(&factors)
            }
        })
    }

    /// Gauge action at the lattice point `t = m / q`, by conjugation.
    pub fn gauge_lattice(&self, m: &[i64], x: &CMatrix) -> Result<CMatrix> {
        Ok(x.conjugate_by(&self.lattice_unitary(m)?))
    }

    /// Factor applied to the residue `k` by the coefficient action at `t`;
    /// components at `q/2` use `cos(pi q t_i)` so adjoints are preserved.
    pub fn gauge_factor(&self, k: &[i64], t: &[f64]) -> C64 {
        let q = self.q() as i64;
        let mut f = Complex::new(1.0, 0.0);
        for (&e, &ti) in k.iter().zip(t) {
            if 2 * e == q {
                f *= (std::f64::consts::PI * q as f64 * ti).cos();
            } else {
                f *= Complex::from_polar(1.0, TAU * e as f64 * ti);
            }
        }
        f
    }

    /// `c_k -> exp(2 pi i k.t) c_k` on residue representatives. This is the
    /// gauge automorphism at lattice points and a linear extension of it
    /// elsewhere.
    pub fn gauge_coeff(&self, t: &[f64], x: &CMatrix) -> Result<CMatrix> {
        if t.len() != self.d() {
            return Err(Error::Dimension("torus point has the wrong length".into()));
        }
        let coeffs = self.coeffs_by_residue(x);
        let dim = self.ambient_dim();
        let mut out = CMatrix::zeros(dim, dim);
        for ((k, m), c) in self.residues.iter().zip(&self.monomials).zip(coeffs) {
            if c.norm() > 0.0 {
                out.axpy(c * self.gauge_factor(k, t), m);
            }
        }
        Ok(out)
    }

    /// Multiplier of the matrix-level Cesàro mean on residue `k`: the Fejér
    /// multiplier summed over the residue class. It equals the plain Fejér
    /// multiplier when `2n + 1 <= q`.
    pub fn cesaro_multiplier(&self, n: usize, k: &[i64]) -> f64 {
        let q = self.q() as i64;
        k.iter()
            .map(|&e| {
                let r = e.rem_euclid(q);
                (-(n as i64)..=n as i64)
                    .filter(|m| m.rem_euclid(q) == r)
                    .map(|m| fejer_multiplier(n, m))
                    .sum::<f64>()
            })
            .product()
    }

    /// `sigma_n` on the model, the lattice average
    /// `q^{-d} sum_t prod_j K_n(t_j) gamma_t`; requires `n < q`.
    pub fn cesaro_matrix(&self, x: &CMatrix, n: usize) -> Result<CMatrix> {
        if n >= self.q() {
            return input(format!(
                "Cesàro mean of order {n} aliases on the q = {} model",
                self.q()
            ));
        }
        let coeffs = self.coeffs_by_residue(x);
        let dim = self.ambient_dim();
        let mut out = CMatrix::zeros(dim, dim);
        for ((k, m), c) in self.residues.iter().zip(&self.monomials).zip(coeffs) {
            let w = self.cesaro_multiplier(n, k);
            if w != 0.0 && c.norm() > 0.0 {
                out.axpy(c * w, m);
            }
        }
        Ok(out)
    }

    /// `sigma_n` as a u.c.p. map from the system to the model.
    pub fn cesaro_map(&self, n: usize) -> Result<UcpMap> {
        if n >= self.q() {
            return input(format!(
                "Cesàro mean of order {n} aliases on the q = {} model",
                self.q()
            ));
        }
        let images = self
            .residues
            .iter()
            .zip(&self.monomials)
            .map(|(k, m)| m.scale_real(self.cesaro_multiplier(n, k)))
            .collect();
        UcpMap::new(CpMap::from_basis_images(
            &self.system,
            self.ambient_dim(),
            images,
        )?)
    }

    /// Residues whose monomial is central.
    pub fn central_residues(&self) -> Vec<Vec<i64>> {
        let q = self.q() as i64;
        let p = &self.params.p;
        self.residues
            .iter()
            .filter(|r| {
                (0..self.d()).all(|j| {
                    r.iter()
                        .enumerate()
                        .map(|(i, &e)| p[i][j] * e)
                        .sum::<i64>()
                        .rem_euclid(q)
                        == 0
                })
            })
            .cloned()
            .collect()
    }

    /// C*-algebra rank of the model: the sum of the block sizes, read off
    /// from the number of central monomials.
    pub fn rank(&self) -> usize {
        let c = self.central_residues().len();
        let s = ((self.residues.len() / c) as f64).sqrt().round() as usize;
        c * s
    }
}
