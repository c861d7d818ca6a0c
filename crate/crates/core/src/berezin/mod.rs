//! Berezin quantization of the sphere: spin-`j` matrix algebras, coherent
//! states, covariant and contravariant symbols, rotation-action Lip-norms
//! and bridge-constant sweeps in `j`.

mod bridge;
mod grid;
#[cfg(test)]
mod tests;

pub use bridge::{
    berezin_sweep, bridge_gamma_estimate, default_rotations, sample_polynomial, sphere_lip_norms,
    FunctionLip, GammaOptions, SphereLength, SphereLipNorms, SphereLipOptions, SweepOptions,
    SweepRow,
};
pub use grid::{gauss_legendre, real_harmonics, BandLimited, Rotation, SphereGrid};

use num_complex::Complex;

use crate::error::{input, Result};
use crate::matrix::CMatrix;
use crate::C64;

/// Irreducible spin-`j` representation on `C^{2j+1}`, basis ordered by
/// decreasing weight `m = j, j-1, ..., -j`.
#[derive(Clone, Debug)]
pub struct SpinRep {
    two_j: usize,
    jx: CMatrix,
    jy: CMatrix,
    jz: CMatrix,
    /// Eigen-decomposition of `J_y`, reused for coherent states.
    jy_vecs: CMatrix,
    jy_vals: Vec<f64>,
}

impl SpinRep {
    pub fn new(two_j: usize) -> Result<Self> {
        if two_j == 0 {
            return input("spin must be a positive half-integer");
        }
        let dim = two_j + 1;
        let j = two_j as f64 / 2.0;
        let m = |a: usize| j - a as f64;
        // J_+ e_{a} = sqrt(j(j+1) - m(m+1)) e_{a-1}
        let mut jp = CMatrix::zeros(dim, dim);
        for a in 1..dim {
            let ma = m(a);
            jp[(a - 1, a)] = Complex::new((j * (j + 1.0) - ma * (ma + 1.0)).sqrt(), 0.0);
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm).scale_real(0.5);
        let jy = (&jp - &jm).scale(Complex::new(0.0, -0.5));
        let jz = CMatrix::diag_real(&(0..dim).map(m).collect::<Vec<_>>());
        let dec = jy.eigh()?;
        Ok(Self {
            two_j,
            jx,
            jy,
            jz,
            jy_vecs: dec.eigenvectors,
            jy_vals: dec.eigenvalues,
        })
    }

    /// From `j` given as a float; must be a positive multiple of `1/2`.
    pub fn from_j(j: f64) -> Result<Self> {
        let t = 2.0 * j;
        if !(t >= 1.0) || (t - t.round()).abs() > 1e-9 {
            return input(format!("spin must be a positive half-integer, got {j}"));
        }
        Self::new(t.round() as usize)
    }

    pub fn two_j(&self) -> usize {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j + 1
    }

    pub fn jx(&self) -> &CMatrix {
        &self.jx
    }

    pub fn jy(&self) -> &CMatrix {
        &self.jy
    }

    pub fn jz(&self) -> &CMatrix {
        &self.jz
    }

    /// Largest deviation in `[J_x, J_y] = i J_z` and its cyclic versions.
    pub fn commutation_defect(&self) -> f64 {
        let i = Complex::new(0.0, 1.0);
        [
            (&self.jx, &self.jy, &self.jz),
            (&self.jy, &self.jz, &self.jx),
            (&self.jz, &self.jx, &self.jy),
        ]
        .iter()
        .map(|(a, b, c)| (&a.commutator(b) - &c.scale(i)).max_abs())
        .fold(0.0, f64::max)
    }

    /// `max |J^2 - j(j+1) I|`.
    pub fn casimir_defect(&self) -> f64 {
        let j = self.j();
        let mut c = &(&self.jx * &self.jx) + &(&self.jy * &self.jy);
        c += &(&self.jz * &self.jz);
        (&c - &CMatrix::identity(self.dim()).scale_real(j * (j + 1.0))).max_abs()
    }

    /// `n . J` for a unit vector `n`.
    pub fn generator(&self, n: [f64; 3]) -> CMatrix {
        let mut g = self.jx.scale_real(n[0]);
        g.axpy_real(n[1], &self.jy);
        g.axpy_real(n[2], &self.jz);
        g
    }

    /// `exp(-i angle n.J)`, covering the rotation of `R^3` by `angle`
    /// about `n`.
    pub fn rotation(&self, rot: &Rotation) -> Result<CMatrix> {
        self.generator(rot.axis).unitary_exp(rot.angle)
    }

    /// `exp(-i alpha J_z) exp(-i beta J_y) exp(-i gamma J_z)`.
    pub fn euler(&self, alpha: f64, beta: f64, gamma: f64) -> CMatrix {
        let dz = |t: f64| -> Vec<C64> {
            (0..self.dim())
                .map(|a| Complex::from_polar(1.0, -t * (self.j() - a as f64)))
                .collect()
        };
        let v = &self.jy_vecs;
        let ph: Vec<C64> = self
            .jy_vals
            .iter()
            .map(|l| Complex::from_polar(1.0, -beta * l))
            .collect();
        let n = self.dim();
        let ey = CMatrix::from_fn(n, n, |r, c| {
            (0..n).fold(Complex::new(0.0, 0.0), |acc, k| {
                acc + v[(r, k)] * ph[k] * v[(c, k)].conj()
            })
        });
        let (a, g) = (dz(alpha), dz(gamma));
        CMatrix::from_fn(n, n, |r, c| a[r] * ey[(r, c)] * g[c])
    }

    /// Highest-weight vector `|j, j>`.
    pub fn highest_weight(&self) -> Vec<C64> {
        let mut v = vec![Complex::new(0.0, 0.0); self.dim()];
        v[0] = Complex::new(1.0, 0.0);
        v
    }

    /// `exp(-i phi J_z) exp(-i theta J_y) |j, j>`, the coherent state at
    /// the point with polar angles `(theta, phi)`.
    pub fn coherent_state(&self, theta: f64, phi: f64) -> Vec<C64> {
        let n = self.dim();
        let v = &self.jy_vecs;
        let c: Vec<C64> = (0..n)
            .map(|k| v[(0, k)].conj() * Complex::from_polar(1.0, -theta * self.jy_vals[k]))
            .collect();
        (0..n)
            .map(|r| {
                let s = (0..n).fold(Complex::new(0.0, 0.0), |acc, k| acc + v[(r, k)] * c[k]);
                s * Complex::from_polar(1.0, -phi * (self.j() - r as f64))
            })
            .collect()
    }
}

/// Rank-one projection onto the highest-weight vector.
#[derive(Clone, Debug)]
pub struct CoherentProjection {
    pub p: CMatrix,
}

impl CoherentProjection {
    pub fn new(rep: &SpinRep) -> Self {
        let v = rep.highest_weight();
        Self {
            p: CMatrix::outer(&v, &v),
        }
    }

    /// `max(|P^2 - P|, |P* - P|, |tr P - 1|)`.
    pub fn defect(&self) -> f64 {
        let sq = (&(&self.p * &self.p) - &self.p).max_abs();
        let adj = self.p.hermitian_defect();
        sq.max(adj)
            .max((self.p.trace() - Complex::new(1.0, 0.0)).norm())
    }

    /// Distance of `U P U*` from `P` for `U = exp(-i t J_z)`; zero up to
    /// roundoff because the stabilizer acts on the highest weight by phase.
    pub fn z_stabilizer_defect(&self, rep: &SpinRep, t: f64) -> Result<f64> {
        let u = rep.jz().unitary_exp(t)?;
        Ok((&self.p.conjugate_by(&u) - &self.p).max_abs())
    }
}

/// Coherent states at every grid point, shared by the symbol maps.
#[derive(Clone, Debug)]
pub struct CoherentFrame {
    rep: SpinRep,
    grid: SphereGrid,
    states: Vec<Vec<C64>>,
}

impl CoherentFrame {
    pub fn new(rep: &SpinRep, grid: &SphereGrid) -> Self {
        let states = grid
            .points
            .iter()
            .map(|&(t, p)| rep.coherent_state(t, p))
            .collect();
        Self {
            rep: rep.clone(),
            grid: grid.clone(),
            states,
        }
    }

    pub fn rep(&self) -> &SpinRep {
        &self.rep
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn states(&self) -> &[Vec<C64>] {
        &self.states
    }

    /// `sigma_T(x_i) = <psi_i, T psi_i>`.
    pub fn covariant(&self, t: &CMatrix) -> Result<Vec<C64>> {
        let n = self.rep.dim();
        if t.rows() != n || t.cols() != n {
            return Err(crate::Error::Dimension(format!(
                "symbol needs a {n} x {n} matrix"
            )));
        }
        Ok(self
            .states
            .iter()
            .map(|psi| t.quadratic_form(psi))
            .collect())
    }

    /// Real part of the covariant symbol, for Hermitian `T`.
    pub fn covariant_real(&self, t: &CMatrix) -> Result<Vec<f64>> {
        Ok(self.covariant(t)?.iter().map(|z| z.re).collect())
    }

    /// `(2j+1) sum_i w_i f(x_i) |psi_i><psi_i|`.
    pub fn contravariant(&self, f: &[C64]) -> Result<CMatrix> {
        if f.len() != self.grid.len() {
            return input("function length does not match the grid");
        }
        let n = self.rep.dim();
        let mut out = CMatrix::zeros(n, n);
        let scale = n as f64;
        for ((psi, w), fv) in self.states.iter().zip(&self.grid.weights).zip(f) {
            let c = *fv * (w * scale);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for a in 0..n {
                let ca = c * psi[a];
                for b in 0..n {
                    out[(a, b)] += ca * psi[b].conj();
                }
            }
        }
        Ok(out)
    }

    pub fn contravariant_real(&self, f: &[f64]) -> Result<CMatrix> {
        let fc: Vec<C64> = f.iter().map(|v| Complex::new(*v, 0.0)).collect();
        self.contravariant(&fc)
    }

    /// `|| sigma_breve(sigma_T) - T ||`.
    pub fn residual(&self, t: &CMatrix) -> Result<f64> {
        let back = self.contravariant(&self.covariant(t)?)?;
        (&back - t).operator_norm()
    }
}

pub fn covariant_symbol(t: &CMatrix, rep: &SpinRep, grid: &SphereGrid) -> Result<Vec<C64>> {
    CoherentFrame::new(rep, grid).covariant(t)
}

pub fn contravariant_symbol(f: &[C64], rep: &SpinRep, grid: &SphereGrid) -> Result<CMatrix> {
    CoherentFrame::new(rep, grid).contravariant(f)
}

pub fn berezin_residual(t: &CMatrix, rep: &SpinRep, grid: &SphereGrid) -> Result<f64> {
    CoherentFrame::new(rep, grid).residual(t)
}
