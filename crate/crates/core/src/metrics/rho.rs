use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{EstimateKind, LipBall, MetricEstimate, Witness};
use crate::error::{input, Error, Result};
use crate::lipnorms::{LipNorm, ValueKind};
use crate::matrix::{real_combination, CMatrix};
use crate::opsys::CpMap;
use crate::C64;

#[derive(Clone, Copy, Debug)]
pub struct RhoOptions {
    /// Use the closed form on two-dimensional systems.
    pub oracle: bool,
    /// Random self-adjoint directions scaled onto the Lip sphere.
    pub directions: usize,
    /// Size of the unit-vector grid for the inner norm (levels `n >= 2`).
    pub grid: usize,
    /// Number of best candidates refined by alternating maximization.
    pub polish: usize,
    pub max_alternations: usize,
    pub seed: u64,
}

impl Default for RhoOptions {
    fn default() -> Self {
        Self {
            oracle: true,
            directions: 32,
            grid: 200,
            polish: 4,
            max_alternations: 25,
            seed: 0,
        }
    }
}

impl RhoOptions {
    /// Smaller search used inside matching loops.
    pub fn light() -> Self {
        Self {
            directions: 8,
            grid: 24,
            polish: 2,
            max_alternations: 10,
            ..Self::default()
        }
    }
}

/// `phi - psi` on the Hermitian basis (unit image removed).
pub(crate) struct Difference {
    pub diffs: Vec<CMatrix>,
}

impl Difference {
    pub fn new(l: &LipNorm, phi: &CpMap, psi: &CpMap) -> Result<Self> {
        let d = l.system().dim();
        if phi.herm_images().len() != d || psi.herm_images().len() != d {
            return Err(Error::Input(
                "maps are not defined on the Lip-normed system".into(),
            ));
        }
        if phi.n() != psi.n() {
            return input(format!(
                "maps have different levels {} and {}",
                phi.n(),
                psi.n()
            ));
        }
        let mut diffs: Vec<CMatrix> = phi
            .herm_images()
            .iter()
            .zip(psi.herm_images())
            .map(|(a, b)| a - b)
            .collect();
        let unit = diffs[0].max_abs();
        if unit > 1e-9 {
            return input(format!("maps differ on the unit by {unit:.2e}"));
        }
        diffs[0] = CMatrix::zeros(phi.n(), phi.n());
        Ok(Self { diffs })
    }

    pub fn is_zero(&self) -> bool {
        self.diffs.iter().all(|m| m.max_abs() <= 1e-12)
    }

    pub fn apply(&self, c: &[f64]) -> CMatrix {
        real_combination(c, &self.diffs)
    }

    pub fn norm_at(&self, c: &[f64]) -> f64 {
        self.apply(c).operator_norm_unchecked()
    }

    /// `c -> sign <xi, (phi - psi)(c) xi>`.
    pub fn functional(&self, xi: &[C64], sign: f64) -> Vec<f64> {
        self.diffs
            .iter()
            .map(|m| sign * m.quadratic_form(xi).re)
            .collect()
    }
}

/// Unit vectors in `C^n` modulo phase: a Fibonacci grid on the Bloch sphere
/// for `n = 2`, coordinate and two-term vectors followed by seeded Gaussian
/// draws otherwise.
pub fn xi_grid(n: usize, count: usize) -> Vec<Vec<C64>> {
    let z = Complex::new(0.0, 0.0);
    if n == 1 {
        return vec![vec![Complex::new(1.0, 0.0)]];
    }
    if n == 2 {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        return (0..count)
            .map(|i| {
                let cz = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let theta = cz.clamp(-1.0, 1.0).acos();
                let phi = golden * i as f64;
                vec![
                    Complex::new((theta / 2.0).cos(), 0.0),
                    Complex::from_polar((theta / 2.0).sin(), phi),
                ]
            })
            .collect();
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..n {
        let mut v = vec![z; n];
        v[i] = Complex::new(1.0, 0.0);
        out.push(v);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    'pairs: for i in 0..n {
        for j in i + 1..n {
            for ph in [
                Complex::new(s, 0.0),
                Complex::new(-s, 0.0),
                Complex::new(0.0, s),
                Complex::new(0.0, -s),
            ] {
                if out.len() >= count {
                    break 'pairs;
                }
                let mut v = vec![z; n];
                v[i] = Complex::new(s, 0.0);
                v[j] = ph;
                out.push(v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_91d);
    while out.len() < count {
        let v: Vec<C64> = (0..n)
            .map(|_| {
                Complex::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                )
            })
            .collect();
        let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|c| c / nrm).collect());
    }
    out
}

/// Closed form on a two-dimensional system: the Lip ball is a segment, so
/// `rho = ||(phi - psi)(h)|| / L(h)` for the non-scalar basis element `h`.
pub fn two_point_rho(l: &LipNorm, phi: &CpMap, psi: &CpMap) -> Result<MetricEstimate> {
    if l.system().dim() != 2 {
        return input("closed form needs a two-dimensional system");
    }
    let diff = Difference::new(l, phi, psi)?;
    let lv = l.eval_herm(&[0.0, 1.0])?;
    let d = diff.diffs[1].operator_norm_unchecked();
    let h = &l.system().hermitian_basis()[1];
    let kind = if lv.kind == ValueKind::Exact {
        EstimateKind::Exact
    } else {
        EstimateKind::Lower
    };
    Ok(MetricEstimate::new(d / lv.upper, kind, phi.n())
        .witness(Witness::Element {
            matrix: h.scale_real(1.0 / lv.upper),
        })
        .param("mode", "oracle"))
}

pub fn rho_ln(l: &LipNorm, phi: &CpMap, psi: &CpMap) -> Result<MetricEstimate> {
    rho_ln_with(l, phi, psi, &RhoOptions::default())
}

/// `rho_{L,n}(phi, psi) = sup { ||phi(x) - psi(x)|| : x = x*, L(x) <= 1 }`.
///
/// Returns a lower bound whose element witness lies in the Lip ball. For
/// `n = 1` the supremum is a single support-function evaluation; for larger
/// `n` the search runs the support function along a grid of unit vectors and
/// alternates between the top eigenvector and the maximizing element.
pub fn rho_ln_with(
    l: &LipNorm,
    phi: &CpMap,
    psi: &CpMap,
    opts: &RhoOptions,
) -> Result<MetricEstimate> {
    let ball = LipBall::new(l);
    rho_with_ball(&ball, phi, psi, opts)
}

pub(crate) fn rho_with_ball(
    ball: &LipBall,
    phi: &CpMap,
    psi: &CpMap,
    opts: &RhoOptions,
) -> Result<MetricEstimate> {
    let l = ball.lip();
    let n = phi.n();
    let diff = Difference::new(l, phi, psi)?;
    if diff.is_zero() {
        return Ok(MetricEstimate::new(0.0, EstimateKind::Exact, n));
    }
    if opts.oracle && l.system().dim() == 2 {
        return two_point_rho(l, phi, psi);
    }
    let (value, point, gap) = search(ball, &diff, n, opts)?;
    let x = l.system().from_herm_coords(&point);
    Ok(MetricEstimate::new(value, EstimateKind::Lower, n)
        .with_seed(opts.seed)
        .witness(Witness::Element { matrix: x })
        .param("directions", opts.directions)
        .param("grid", if n == 1 { 1 } else { opts.grid })
        .param("polish", opts.polish)
        .param("support_gap", gap))
}

fn search(
    ball: &LipBall,
    diff: &Difference,
    n: usize,
    opts: &RhoOptions,
) -> Result<(f64, Vec<f64>, f64)> {
    let d = ball.dim();
    let mut cands: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut gap: f64 = 0.0;
    let push = |cands: &mut Vec<(f64, Vec<f64>)>, c: Vec<f64>| {
        let v = diff.norm_at(&c);
        cands.push((v, c));
    };
    for j in 1..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        if let Some(c) = ball.normalize(&e)? {
            push(&mut cands, c);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.directions {
        let r: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        if let Some(c) = ball.normalize(&r)? {
            push(&mut cands, c);
        }
    }
    let grid = if n == 1 {
        xi_grid(1, 1)
    } else {
        xi_grid(n, opts.grid)
    };
    for xi in &grid {
        let s = ball.support(&diff.functional(xi, 1.0))?;
        gap = gap.max(s.gap);
        push(&mut cands, s.point);
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    cands.truncate(opts.polish.max(1));
    let mut best = cands[0].clone();
    for (mut cur, mut c) in cands {
        for _ in 0..opts.max_alternations {
            let eig = diff.apply(&c).hermitian_eigh();
            let last = eig.eigenvalues.len() - 1;
            let (idx, sign) = if eig.eigenvalues[last].abs() >= eig.eigenvalues[0].abs() {
                (last, 1.0)
            } else {
                (0, -1.0)
            };
            let xi = eig.eigenvector(idx);
            let s = ball.support(&diff.functional(&xi, sign))?;
            let v = diff.norm_at(&s.point);
            if v > cur + 1e-13 {
                cur = v;
                c = s.point;
                gap = gap.max(s.gap);
            } else {
                break;
            }
        }
        if cur > best.0 {
            best = (cur, c);
        }
    }
    Ok((best.0, best.1, gap))
}
