use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{BandLimited, CoherentFrame, Rotation, SphereGrid, SpinRep};
use crate::error::{input, Result};
use crate::lipnorms::{Action, LipNorm};
use crate::matrix::CMatrix;
use crate::metrics::{EstimateKind, MetricEstimate, Witness};
use crate::opsys::OperatorSystem;
use crate::real::RMat;

/// Length function on `SO(3)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereLength {
    /// Rotation angle.
    #[default]
    Angle,
    /// `||R - I|| = 2 sin(angle / 2)`.
    Chordal,
}

impl SphereLength {
    pub fn eval(self, rot: &Rotation) -> f64 {
        match self {
            SphereLength::Angle => rot.length(),
            SphereLength::Chordal => 2.0 * (rot.length() / 2.0).sin(),
        }
    }
}

/// Axes along coordinates and a few diagonals at angles `0.05, 0.4, 1.2`,
/// then `random` seeded rotations with uniform axis and angle.
pub fn default_rotations(random: usize, seed: u64) -> Vec<Rotation> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 1.0 / 3f64.sqrt();
    let axes = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [s3, s3, s3],
        [s2, -s2, 0.0],
        [0.0, s2, -s2],
    ];
    let mut out = Vec::new();
    for a in axes {
        for t in [0.05, 0.4, 1.2] {
            out.push(Rotation { axis: a, angle: t });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < 18 + random {
        let v: [f64; 3] = [0; 3].map(|_| rng.sample(StandardNormal));
        if let Ok(r) = Rotation::new(v, rng.random_range(0.01..std::f64::consts::PI)) {
            out.push(r);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereLipOptions {
    #[serde(default)]
    pub length: SphereLength,
    /// Harmonic degree of the band-limited function model; must be at
    /// least `2j`.
    #[serde(default = "default_l_max")]
    pub l_max: usize,
}

fn default_l_max() -> usize {
    16
}

impl Default for SphereLipOptions {
    fn default() -> Self {
        Self {
            length: SphereLength::Angle,
            l_max: default_l_max(),
        }
    }
}

/// `L_A(f) = max_g ||f o g^{-1} - f||_inf / l(g)` on the grid, with
/// `f o g^{-1}` evaluated through the band-limited projection of `f`.
#[derive(Clone, Debug)]
pub struct FunctionLip {
    band: BandLimited,
    rotated: Vec<RMat>,
    lengths: Vec<f64>,
}

impl FunctionLip {
    pub fn new(
        grid: &SphereGrid,
        rotations: &[Rotation],
        length: SphereLength,
        l_max: usize,
    ) -> Result<Self> {
        let band = BandLimited::new(grid, l_max)?;
        let mut lengths = Vec::with_capacity(rotations.len());
        for r in rotations {
            let l = length.eval(r);
            if !(l > 0.0) {
                return input("rotation samples must have positive length");
            }
            lengths.push(l);
        }
        let rotated = rotations
            .iter()
            .map(|r| band.rotated_basis(grid, r))
            .collect();
        Ok(Self {
            band,
            rotated,
            lengths,
        })
    }

    pub fn band(&self) -> &BandLimited {
        &self.band
    }

    /// `f o g^{-1}` for the `k`-th sampled rotation.
    pub fn rotate(&self, k: usize, f: &[f64]) -> Vec<f64> {
        self.rotated[k].mul_vec(&self.band.coefficients(f))
    }

    pub fn eval(&self, f: &[f64]) -> f64 {
        let c = self.band.coefficients(f);
        let base = self.band.synthesize(&c);
        self.rotated
            .iter()
            .zip(&self.lengths)
            .map(|(m, l)| {
                let g = m.mul_vec(&c);
                g.iter()
                    .zip(&base)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
                    / l
            })
            .fold(0.0, f64::max)
    }

    /// Complex functions: pointwise modulus of the rotated difference.
    pub fn eval_complex(&self, f: &[crate::C64]) -> f64 {
        let re: Vec<f64> = f.iter().map(|z| z.re).collect();
        let im: Vec<f64> = f.iter().map(|z| z.im).collect();
        let (cr, ci) = (self.band.coefficients(&re), self.band.coefficients(&im));
        let (br, bi) = (self.band.synthesize(&cr), self.band.synthesize(&ci));
        self.rotated
            .iter()
            .zip(&self.lengths)
            .map(|(m, l)| {
                let (gr, gi) = (m.mul_vec(&cr), m.mul_vec(&ci));
                (0..gr.len())
                    .map(|i| (gr[i] - br[i]).hypot(gi[i] - bi[i]))
                    .fold(0.0, f64::max)
                    / l
            })
            .fold(0.0, f64::max)
    }
}

/// The pair `(L_A, L_B)` induced by one set of rotation samples.
#[derive(Clone, Debug)]
pub struct SphereLipNorms {
    pub rotations: Vec<Rotation>,
    pub a: FunctionLip,
    pub b: LipNorm,
}

fn eval_b(b: &LipNorm, t: &CMatrix) -> Result<f64> {
    Ok(b.eval(t)?.value)
}

/// Action Lip-norms on grid functions and on `M_{2j+1}`.
pub fn sphere_lip_norms(
    rep: &SpinRep,
    grid: &SphereGrid,
    rotations: &[Rotation],
    opts: &SphereLipOptions,
) -> Result<SphereLipNorms> {
    if opts.l_max < rep.two_j() {
        return input(format!(
            "harmonic degree {} cannot represent symbols of spin {}",
            opts.l_max,
            rep.j()
        ));
    }
    let a = FunctionLip::new(grid, rotations, opts.length, opts.l_max)?;
    let b = lip_b(rep, rotations, opts.length)?;
    Ok(SphereLipNorms {
        rotations: rotations.to_vec(),
        a,
        b,
    })
}

fn lip_b(rep: &SpinRep, rotations: &[Rotation], length: SphereLength) -> Result<LipNorm> {
    let sys = OperatorSystem::full(rep.dim());
    let actions = rotations
        .iter()
        .map(|r| Action::conjugation(&sys, &rep.rotation(r)?, length.eval(r)))
        .collect::<Result<Vec<_>>>()?;
    LipNorm::action(&sys, actions)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaOptions {
    /// Lip-1 samples on each side.
    pub samples: usize,
    /// Harmonic degree of the sampled functions.
    pub f_degree: usize,
    /// Slack in `L_B(T) <= 1 + delta`.
    pub delta: f64,
    pub seed: u64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self {
            samples: 12,
            f_degree: 3,
            delta: 1e-6,
            seed: 0,
        }
    }
}

fn sup_diff(f: &[f64], g: &[f64], c: f64) -> f64 {
    f.iter()
        .zip(g)
        .map(|(a, b)| (a - c * b).abs())
        .fold(0.0, f64::max)
}

/// Minimizes the convex function `c -> ||f - c g||_inf` on `[0, c_max]`.
fn best_scale(f: &[f64], g: &[f64], c_max: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0, c_max);
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if sup_diff(f, g, m1) <= sup_diff(f, g, m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let c = 0.5 * (lo + hi);
    (c, sup_diff(f, g, c))
}

fn random_function(band: &BandLimited, degree: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut c = vec![0.0; band.n_harmonics()];
    for l in 1..=degree.min(band.l_max()) {
        for k in l * l..(l + 1) * (l + 1) {
            c[k] = rng.sample::<f64, _>(StandardNormal) / l as f64;
        }
    }
    band.synthesize(&c)
}

fn random_traceless(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut t = CMatrix::zeros(n, n);
    for a in 0..n {
        t[(a, a)] = Complex::new(rng.sample(StandardNormal), 0.0);
        for b in a + 1..n {
            let z = Complex::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample(StandardNormal),
            ) * 0.5f64.sqrt();
            t[(a, b)] = z;
            t[(b, a)] = z.conj();
        }
    }
    let tr = t.trace() / n as f64;
    &t - &CMatrix::identity(n).scale(tr)
}

/// Sampled Lip-1 operators of the B side together with their residuals
/// `|| sigma_breve(sigma_T) - T ||`.
fn lip_one_operators(
    frame: &CoherentFrame,
    lb: &LipNorm,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(CMatrix, f64)>> {
    let n = frame.rep().dim();
    let mut out = Vec::with_capacity(count + 1);
    let jz = frame.rep().jz().clone();
    let mut candidates = vec![jz];
    candidates.extend((0..count).map(|_| random_traceless(n, rng)));
    for t in candidates {
        let l = eval_b(lb, &t)?;
        if !(l > 0.0) {
            continue;
        }
        let t = t.scale_real(1.0 / l);
        let r = frame.residual(&t)?;
        out.push((t, r));
    }
    Ok(out)
}

/// Heuristic bridge constant for `N(f, T) = ||f - sigma_T||_inf / gamma`.
///
/// For sampled Lip-1 functions `f` the operator `c sigma_breve(f)` with the
/// best admissible `c` is matched; for sampled Lip-1 operators the symbol
/// `sigma_T` is matched, rescaled if its Lip-norm exceeds `1 + delta`.
pub fn bridge_gamma_estimate(
    frame: &CoherentFrame,
    la_norm: &FunctionLip,
    lb_norm: &LipNorm,
    opts: &GammaOptions,
) -> Result<MetricEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let band = la_norm.band();
    let mut gap_a: f64 = 0.0;
    let mut worst: Option<CMatrix> = None;
    for _ in 0..opts.samples {
        let f = random_function(band, opts.f_degree, &mut rng);
        let la = la_norm.eval(&f);
        if !(la > 0.0) {
            continue;
        }
        let f: Vec<f64> = f.iter().map(|v| v / la).collect();
        let t = frame.contravariant_real(&f)?;
        let lb = eval_b(lb_norm, &t)?;
        let g = frame.covariant_real(&t)?;
        let c_max = if lb > 0.0 {
            (1.0 + opts.delta) / lb
        } else {
            1.0
        };
        let (c, gap) = best_scale(&f, &g, c_max);
        if gap > gap_a || worst.is_none() {
            gap_a = gap_a.max(gap);
            worst = Some(t.scale_real(c));
        }
    }

    let mut gap_b: f64 = 0.0;
    let mut max_symbol_lip: f64 = 0.0;
    for (t, _) in lip_one_operators(frame, lb_norm, opts.samples, &mut rng)? {
        let f = frame.covariant_real(&t)?;
        let la = la_norm.eval(&f);
        max_symbol_lip = max_symbol_lip.max(la);
        if la > 1.0 + opts.delta {
            let sup = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            gap_b = gap_b.max(sup * (1.0 - 1.0 / la));
        }
    }

    let mut est = MetricEstimate::new(gap_a.max(gap_b), EstimateKind::Heuristic, 1)
        .with_seed(opts.seed)
        .param("j", frame.rep().j())
        .param("samples", opts.samples)
        .param("f_degree", opts.f_degree)
        .param("delta", opts.delta)
        .param("functions_to_operators", gap_a)
        .param("operators_to_functions", gap_b)
        .param("max_symbol_lip", max_symbol_lip);
    if let Some(t) = worst {
        est = est.witness(Witness::Element { matrix: t });
    }
    Ok(est)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Values of `2j`.
    pub two_js: Vec<usize>,
    #[serde(default)]
    pub lip: SphereLipOptions,
    #[serde(default)]
    pub gamma: GammaOptions,
    /// Extra seeded rotations beyond the fixed axis set.
    #[serde(default = "default_random_rotations")]
    pub random_rotations: usize,
    #[serde(default = "default_grid")]
    pub grid: (usize, usize),
}

fn default_random_rotations() -> usize {
    6
}

fn default_grid() -> (usize, usize) {
    (24, 48)
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            two_js: (1..=16).collect(),
            lip: SphereLipOptions::default(),
            gamma: GammaOptions::default(),
            random_rotations: default_random_rotations(),
            grid: default_grid(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub j: f64,
    pub dim: usize,
    pub gamma: MetricEstimate,
    /// Largest `|| sigma_breve(sigma_T) - T ||` over the Lip-1 operator net.
    pub max_residual: f64,
    /// `gamma + max_residual`.
    pub distance_upper: f64,
    /// Residual of `J_z / j`.
    pub jz_residual: f64,
    /// Residual of a fixed degree-two polynomial in the `J`'s, scaled to
    /// operator norm one.
    pub poly_residual: f64,
    pub unit_defect: f64,
}

/// `(J_z^2 + (J_x J_y + J_y J_x) / 2 + J_x) / j^2`, normalized.
pub fn sample_polynomial(rep: &SpinRep) -> Result<CMatrix> {
    let (x, y, z) = (rep.jx(), rep.jy(), rep.jz());
    let mut p = z * z;
    p += &(&(x * y) + &(y * x)).scale_real(0.5);
    p += &x.scale_real(rep.j());
    let n = p.operator_norm()?;
    Ok(p.scale_real(1.0 / n))
}

/// One row per spin: bridge constant, residuals and the resulting distance
/// upper bound.
pub fn berezin_sweep(opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    let grid = SphereGrid::new(opts.grid.0, opts.grid.1)?;
    let rotations = default_rotations(opts.random_rotations, opts.gamma.seed);
    let a = FunctionLip::new(&grid, &rotations, opts.lip.length, opts.lip.l_max)?;
    let mut rows = Vec::with_capacity(opts.two_js.len());
    for &two_j in &opts.two_js {
        let rep = SpinRep::new(two_j)?;
        if opts.lip.l_max < two_j {
            return input(format!(
                "harmonic degree {} cannot represent symbols of spin {}",
                opts.lip.l_max,
                rep.j()
            ));
        }
        let b = lip_b(&rep, &rotations, opts.lip.length)?;
        let frame = CoherentFrame::new(&rep, &grid);
        let gamma = bridge_gamma_estimate(&frame, &a, &b, &opts.gamma)?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.gamma.seed ^ 0x5eed);
        let max_residual = lip_one_operators(&frame, &b, opts.gamma.samples, &mut rng)?
            .iter()
            .map(|(_, r)| *r)
            .fold(0.0, f64::max);
        let jz = rep.jz().scale_real(1.0 / rep.j());
        let one = vec![1.0; grid.len()];
        let unit_defect =
            (&frame.contravariant_real(&one)? - &CMatrix::identity(rep.dim())).operator_norm()?;
        rows.push(SweepRow {
            j: rep.j(),
            dim: rep.dim(),
            distance_upper: gamma.value + max_residual,
            gamma,
            max_residual,
            jz_residual: frame.residual(&jz)?,
            poly_residual: frame.residual(&sample_polynomial(&rep)?)?,
            unit_defect,
        });
    }
    Ok(rows)
}
