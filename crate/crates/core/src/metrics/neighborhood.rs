use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{AdmissibleLip, Side};
use crate::error::{input, Result};
use crate::lipnorms::{eval_lip_n, LipNorm};
use crate::matrix::CMatrix;
use crate::opsys::OperatorSystem;
use crate::C64;

/// Sampled points of `N^lambda(x) = { z : L^n(x, z) <= lambda }` on the
/// target side of an admissible pair, all certified members.
#[derive(Clone, Debug)]
pub struct NeighborhoodSet {
    pub anchor: CMatrix,
    pub lambda: f64,
    pub target: Side,
    pub n: usize,
    pub samples: Vec<CMatrix>,
}

fn systems(la: &AdmissibleLip, target: Side) -> (&OperatorSystem, &OperatorSystem) {
    match target {
        Side::Y => (la.x_system(), la.y_system()),
        Side::X => (la.y_system(), la.x_system()),
    }
}

/// `(x, z)` as an element of `M_n ⊗ (X ⊕ Y)`.
fn pair(la: &AdmissibleLip, target: Side, n: usize, x: &CMatrix, z: &CMatrix) -> Result<CMatrix> {
    let (src, tgt) = systems(la, target);
    let xb = src.blocks(n, x)?;
    let zb = tgt.blocks(n, z)?;
    let blocks: Vec<CMatrix> = xb
        .iter()
        .zip(&zb)
        .map(|(a, b)| match target {
            Side::Y => a.direct_sum(b),
            Side::X => b.direct_sum(a),
        })
        .collect();
    Ok(la.lip().system().assemble(n, &blocks))
}

fn is_self_adjoint(m: &CMatrix) -> bool {
    m.hermitian_defect() <= 1e-12 * (1.0 + m.max_abs())
}

/// Target element minimizing `L(a, b)` for self-adjoint `a` on the source.
fn partner(la: &AdmissibleLip, induced: &LipNorm, target: Side, a: &CMatrix) -> Result<CMatrix> {
    let (src, tgt) = systems(la, target);
    let c = src.coords(a)?;
    let lat = induced.eval_latent(&c, Default::default())?;
    let sum = la.lip().system();
    let full = la.lip().compiled().proj.mul_vec(&lat.w_re);
    let m = sum.from_herm_coords(&full);
    let kx = la.x_system().ambient_dim();
    let ky = la.y_system().ambient_dim();
    let (b, a_block) = match target {
        Side::Y => (m.block(kx, kx, ky, ky), m.block(0, 0, kx, kx)),
        Side::X => (m.block(0, 0, kx, kx), m.block(kx, kx, ky, ky)),
    };
    // the evaluator drops the scalar part of `a`; shifting both sides by a
    // scalar leaves L unchanged
    let shift = a - &a_block;
    let s = shift.trace() / shift.rows() as f64;
    let mut b = b;
    b.axpy(s, &CMatrix::identity(tgt.ambient_dim()));
    Ok(b)
}

impl NeighborhoodSet {
    pub fn contains(&self, la: &AdmissibleLip, z: &CMatrix) -> Result<bool> {
        member(la, self.target, self.n, &self.anchor, z, self.lambda)
    }

    /// Largest pairwise norm distance among the samples.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.samples.iter().enumerate() {
            for b in &self.samples[i + 1..] {
                d = d.max((a - b).operator_norm_unchecked());
            }
        }
        d
    }

    /// Boundary points along random directions from a central witness built
    /// from coordinatewise quotient minimizers.
    pub fn sample(
        la: &AdmissibleLip,
        n: usize,
        anchor: &CMatrix,
        lambda: f64,
        target: Side,
        directions: usize,
        seed: u64,
    ) -> Result<Self> {
        let (_, tgt) = systems(la, target);
        let induced = la.induced(target == Side::Y)?;
        let (src, _) = systems(la, target);
        let ab = src.blocks(n, anchor)?;
        let mut zb = vec![CMatrix::zeros(tgt.ambient_dim(), tgt.ambient_dim()); n * n];
        let i_unit = Complex::new(0.0, 1.0);
        for i in 0..n {
            for j in i..n {
                let x = &ab[i * n + j];
                let re = partner(la, &induced, target, &x.re_part())?;
                let im = partner(la, &induced, target, &x.im_part())?;
                let mut z = re;
                z.axpy(i_unit, &im);
                if i != j {
                    let xt = &ab[j * n + i];
                    let re2 = partner(la, &induced, target, &xt.re_part())?;
                    let im2 = partner(la, &induced, target, &xt.im_part())?;
                    let mut z2 = re2;
                    z2.axpy(i_unit, &im2);
                    zb[j * n + i] = z2;
                }
                zb[i * n + j] = z;
            }
        }
        let z0 = tgt.assemble(n, &zb);
        let mut out = Self {
            anchor: anchor.clone(),
            lambda,
            target,
            n,
            samples: Vec::new(),
        };
        if !out.contains(la, &z0)? {
            return Ok(out);
        }
        let sa = is_self_adjoint(anchor);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = tgt.dim();
        out.samples.push(z0.clone());
        for _ in 0..directions {
            let mut blocks = vec![CMatrix::zeros(tgt.ambient_dim(), tgt.ambient_dim()); n * n];
            for i in 0..n {
                for j in 0..n {
                    if sa && j < i {
                        continue;
                    }
                    let c: Vec<C64> = (0..d)
                        .map(|_| {
                            let re = rng.sample::<f64, _>(StandardNormal);
                            let im = if sa && i == j {
                                0.0
                            } else {
                                rng.sample::<f64, _>(StandardNormal)
                            };
                            Complex::new(re, im)
                        })
                        .collect();
                    let m = if sa && i == j {
                        let h: Vec<f64> = c.iter().map(|v| v.re).collect();
                        tgt.from_herm_coords(&h)
                    } else {
                        tgt.from_coords(&c)
                    };
                    if sa && i != j {
                        blocks[j * n + i] = m.adjoint();
                    }
                    blocks[i * n + j] = m;
                }
            }
            let dir = tgt.assemble(n, &blocks);
            let nrm = dir.operator_norm_unchecked();
            if nrm == 0.0 {
                continue;
            }
            let dir = dir.scale_real(1.0 / nrm);
            for sign in [1.0, -1.0] {
                let dir = dir.scale_real(sign);
                let at = |t: f64| {
                    let mut z = z0.clone();
                    z.axpy_real(t, &dir);
                    z
                };
                let (mut lo, mut hi) = (0.0, 1.0);
                while hi < 1e6 && out.contains(la, &at(hi))? {
                    lo = hi;
                    hi *= 2.0;
                }
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    if out.contains(la, &at(mid))? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if lo > 0.0 {
                    out.samples.push(at(lo));
                }
            }
        }
        Ok(out)
    }
}

fn member(
    la: &AdmissibleLip,
    target: Side,
    n: usize,
    x: &CMatrix,
    z: &CMatrix,
    lambda: f64,
) -> Result<bool> {
    let w = pair(la, target, n, x, z)?;
    Ok(eval_lip_n(la.lip(), n, &w)?.upper <= lambda)
}

#[derive(Clone, Copy, Debug)]
pub struct DiamboundOptions {
    /// Random directions per neighborhood set (two boundary points each).
    pub directions: usize,
    /// Side on which the neighborhood sets live.
    pub target: Side,
    /// Relative size of the second anchor's perturbation for item (iv).
    pub perturbation: f64,
    pub seed: u64,
}

impl Default for DiamboundOptions {
    fn default() -> Self {
        Self {
            directions: 8,
            target: Side::Y,
            perturbation: 0.05,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiamboundReport {
    pub n: usize,
    pub lambda: f64,
    pub r: f64,
    pub anchor_lip: f64,
    pub witnesses: usize,
    /// Item (ii).
    pub norm_bound: f64,
    pub max_norm: f64,
    pub norm_ok: bool,
    /// Item (iii).
    pub diameter_bound: f64,
    pub diameter: f64,
    pub diameter_ok: bool,
    /// Item (iv): largest distance between points of the two sampled sets.
    pub cross_bound: Option<f64>,
    pub cross_distance: Option<f64>,
    pub cross_ok: Option<bool>,
    /// Item (v), only for positive anchors.
    pub positivity_bound: Option<f64>,
    pub best_min_eigenvalue: Option<f64>,
    pub positivity_ok: Option<bool>,
    pub violations: usize,
    /// False when no member of the set was found.
    pub conclusive: bool,
    pub passed: bool,
}

/// Checks the neighborhood-set inequalities (ii)-(v) with `r` an upper
/// bound on the Hausdorff distance between the matrix state spaces (for
/// example the bridge's analytic bound).
pub fn check_diambound(
    la: &AdmissibleLip,
    n: usize,
    x: &CMatrix,
    lambda: f64,
    r: f64,
    opts: &DiamboundOptions,
) -> Result<DiamboundReport> {
    let target = opts.target;
    let (src, _) = systems(la, target);
    let src_lip = match target {
        Side::Y => la.x_lip(),
        Side::X => la.y_lip(),
    };
    let anchor_lip = eval_lip_n(src_lip, n, x)?.upper;
    if !(lambda > 2.0 * anchor_lip) {
        return input(format!(
            "lambda must exceed 2 L^n(x) = {:.6}",
            2.0 * anchor_lip
        ));
    }
    let set = NeighborhoodSet::sample(la, n, x, lambda, target, opts.directions, opts.seed)?;
    let scale = lambda * (n as f64).powi(4) * r;
    let xn = x.operator_norm_unchecked();
    let sa = is_self_adjoint(x);
    let tol = |b: f64| 1e-9 * (1.0 + b.abs());

    let norm_bound = if sa {
        xn + 2.0 * scale
    } else {
        4.0 * (xn + scale)
    };
    let max_norm = set
        .samples
        .iter()
        .map(|y| y.operator_norm_unchecked())
        .fold(0.0, f64::max);
    let norm_ok = max_norm <= norm_bound + tol(norm_bound);

    let diameter_bound = 8.0 * scale;
    let diameter = set.diameter();
    let diameter_ok = diameter <= diameter_bound + tol(diameter_bound);

    // second anchor
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x0a11);
    let d = src.dim();
    let pblocks: Vec<CMatrix> = (0..n * n)
        .map(|_| {
            let h: Vec<f64> = (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            src.from_herm_coords(&h)
        })
        .collect();
    let mut p = src.assemble(n, &pblocks);
    p = &p + &p.adjoint();
    let pn = p.operator_norm_unchecked();
    let mut cross = None;
    if pn > 0.0 {
        let mut eps = opts.perturbation * (1.0 + xn) / pn;
        for _ in 0..12 {
            let mut x2 = x.clone();
            x2.axpy_real(eps, &p);
            if lambda > 2.0 * eval_lip_n(src_lip, n, &x2)?.upper {
                let set2 = NeighborhoodSet::sample(
                    la,
                    n,
                    &x2,
                    lambda,
                    target,
                    opts.directions,
                    opts.seed ^ 0x77,
                )?;
                if !set2.samples.is_empty() {
                    let mut dist: f64 = 0.0;
                    for a in &set.samples {
                        for b in &set2.samples {
                            dist = dist.max((a - b).operator_norm_unchecked());
                        }
                    }
                    let bound = 8.0 * scale + 4.0 * (x - &x2).operator_norm_unchecked();
                    cross = Some((bound, dist));
                }
                break;
            }
            eps *= 0.5;
        }
    }

    let positive = sa && x.min_eigenvalue()? >= -1e-12;
    let (positivity_bound, best_min_eigenvalue) = if positive {
        let best = set
            .samples
            .iter()
            .map(|y| y.re_part().min_eigenvalue())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        (Some(-2.0 * scale), Some(best))
    } else {
        (None, None)
    };
    let positivity_ok = positivity_bound
        .zip(best_min_eigenvalue)
        .map(|(b, v)| v >= b - tol(b));

    let conclusive = !set.samples.is_empty();
    let cross_ok = cross.map(|(b, d)| d <= b + tol(b));
    let mut violations = 0;
    for ok in [Some(norm_ok), Some(diameter_ok), cross_ok, positivity_ok]
        .into_iter()
        .flatten()
    {
        if !ok {
            violations += 1;
        }
    }
    Ok(DiamboundReport {
        n,
        lambda,
        r,
        anchor_lip,
        witnesses: set.samples.len(),
        norm_bound,
        max_norm,
        norm_ok,
        diameter_bound,
        diameter,
        diameter_ok,
        cross_bound: cross.map(|c| c.0),
        cross_distance: cross.map(|c| c.1),
        cross_ok,
        positivity_bound,
        best_min_eigenvalue,
        positivity_ok,
        violations,
        conclusive,
        passed: conclusive && violations == 0,
    })
}
