use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::rho::{rho_with_ball, Difference, RhoOptions};
use super::{EstimateKind, LipBall, MetricEstimate, Witness};
use crate::error::Result;
use crate::lipnorms::LipNorm;
use crate::matrix::CMatrix;
use crate::opsys::{
    compression, random_isometry, random_ucp_with, scalar_embedding, vector_state, CpMap,
};
use crate::C64;

#[derive(Clone, Copy, Debug)]
pub struct DiameterOptions {
    /// Starting directions for the level-one spread search.
    pub starts: usize,
    /// Random UCP maps and random compressions in the level-`n` net.
    pub net_random: usize,
    /// Random vector states (scalar embeddings) in the net.
    pub net_vectors: usize,
    /// Best net pairs re-evaluated with the full `rho` search.
    pub refine: usize,
    pub seed: u64,
    pub rho: RhoOptions,
}

impl Default for DiameterOptions {
    fn default() -> Self {
        Self {
            starts: 12,
            net_random: 6,
            net_vectors: 6,
            refine: 2,
            seed: 0,
            rho: RhoOptions {
                grid: 64,
                ..RhoOptions::default()
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiameterReport {
    pub n: usize,
    pub lower: MetricEstimate,
    /// Level one only: the spread search value read as an upper estimate.
    pub upper: Option<MetricEstimate>,
    /// Level one only: `sum_j spread(h_j) max_{L(c) <= 1} |c_j|`.
    pub certified_upper: Option<MetricEstimate>,
}

struct Spread {
    value: f64,
    point: Vec<f64>,
    top: Vec<C64>,
    bottom: Vec<C64>,
}

fn spread_of(x: &CMatrix) -> (f64, Vec<C64>, Vec<C64>) {
    let e = x.hermitian_eigh();
    let last = e.eigenvalues.len() - 1;
    (
        e.eigenvalues[last] - e.eigenvalues[0],
        e.eigenvector(last),
        e.eigenvector(0),
    )
}

/// Maximizes `lambda_max(x) - lambda_min(x)` over the Lip ball by
/// alternating between extreme eigenvectors and the support function.
fn spread_search(ball: &LipBall, starts: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Spread>> {
    let sys = ball.lip().system();
    let d = sys.dim();
    let herm = sys.hermitian_basis();
    let mut out = Vec::new();
    let mut inits = Vec::new();
    for j in 1..d.min(starts + 1) {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        inits.push(e);
    }
    while inits.len() < starts.max(1) {
        inits.push(
            (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
        );
    }
    for init in inits {
        let Some(mut c) = ball.normalize(&init)? else {
            continue;
        };
        let (mut cur, mut top, mut bottom) = spread_of(&sys.from_herm_coords(&c));
        for _ in 0..30 {
            let ell: Vec<f64> = herm
                .iter()
                .map(|h| h.quadratic_form(&top).re - h.quadratic_form(&bottom).re)
                .collect();
            let s = ball.support(&ell)?;
            let (v, t, b) = spread_of(&sys.from_herm_coords(&s.point));
            if v > cur + 1e-12 {
                cur = v;
                c = s.point;
                top = t;
                bottom = b;
            } else {
                break;
            }
        }
        out.push(Spread {
            value: cur,
            point: c,
            top,
            bottom,
        });
    }
    out.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(out)
}

pub fn diameter(l: &LipNorm, n: usize, opts: &DiameterOptions) -> Result<DiameterReport> {
    Ok(diameter_levels(l, &[n], opts)?.remove(0))
}

/// Diameter of `UCP_n(X)` under `rho_{L,n}` for each requested level.
///
/// Lower bounds come from pairwise distances over a sampled net (random UCP
/// maps, random compressions, scalar embeddings of vector states). At level
/// one the spread search gives the lower bound directly, because vector
/// states realize the extreme eigenvalues.
pub fn diameter_levels(
    l: &LipNorm,
    levels: &[usize],
    opts: &DiameterOptions,
) -> Result<Vec<DiameterReport>> {
    let sys = l.system();
    let ball = LipBall::new(l);
    if sys.dim() == 1 {
        return Ok(levels
            .iter()
            .map(|&n| DiameterReport {
                n,
                lower: MetricEstimate::new(0.0, EstimateKind::Exact, n),
                upper: (n == 1).then(|| MetricEstimate::new(0.0, EstimateKind::Exact, 1)),
                certified_upper: (n == 1).then(|| MetricEstimate::new(0.0, EstimateKind::Exact, 1)),
            })
            .collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let spreads = spread_search(&ball, opts.starts, &mut rng)?;
    let best = &spreads[0];
    let mut pool: Vec<Vec<f64>> = spreads.iter().take(4).map(|s| s.point.clone()).collect();
    for j in 1..sys.dim() {
        let mut e = vec![0.0; sys.dim()];
        e[j] = 1.0;
        if let Some(c) = ball.normalize(&e)? {
            pool.push(c);
        }
    }

    let mut reports = Vec::with_capacity(levels.len());
    for &n in levels {
        if n == 1 {
            let lower = MetricEstimate::new(best.value, EstimateKind::Lower, 1)
                .with_seed(opts.seed)
                .witness(Witness::Element {
                    matrix: sys.from_herm_coords(&best.point),
                })
                .witness(Witness::Vector {
                    xi: best.top.clone(),
                })
                .witness(Witness::Vector {
                    xi: best.bottom.clone(),
                })
                .param("starts", opts.starts);
            let upper = MetricEstimate::new(best.value, EstimateKind::Heuristic, 1)
                .with_seed(opts.seed)
                .param("method", "alternating spread search");
            let certified = certified_upper(&ball)?;
            reports.push(DiameterReport {
                n,
                lower,
                upper: Some(upper),
                certified_upper: Some(certified),
            });
            continue;
        }
        reports.push(level_lower(&ball, n, &spreads, &pool, opts, &mut rng)?);
    }
    Ok(reports)
}

fn certified_upper(ball: &LipBall) -> Result<MetricEstimate> {
    let sys = ball.lip().system();
    let d = sys.dim();
    let mut total = 0.0;
    for (j, h) in sys.hermitian_basis().iter().enumerate().skip(1) {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let s = ball.support(&e)?;
        total += (s.value + s.gap) * spread_of(h).0;
    }
    Ok(MetricEstimate::new(total, EstimateKind::Upper, 1).param("method", "coordinate bound"))
}

fn level_lower(
    ball: &LipBall,
    n: usize,
    spreads: &[Spread],
    pool: &[Vec<f64>],
    opts: &DiameterOptions,
    rng: &mut ChaCha8Rng,
) -> Result<DiameterReport> {
    let l = ball.lip();
    let sys = l.system();
    let k = sys.ambient_dim();
    let mut net: Vec<CpMap> = Vec::new();
    for _ in 0..opts.net_random {
        net.push(random_ucp_with(sys, n, rng).0.into_inner());
    }
    if n <= k {
        for _ in 0..opts.net_random.div_ceil(2) {
            let v = random_isometry(k, n, rng);
            net.push(compression(sys, &v)?.into_inner());
        }
    }
    let mut vectors: Vec<Vec<C64>> = Vec::new();
    for s in spreads.iter().take(2) {
        vectors.push(s.top.clone());
        vectors.push(s.bottom.clone());
    }
    for _ in 0..opts.net_vectors {
        vectors.push(random_isometry(k, 1, rng).as_slice().to_vec());
    }
    for xi in &vectors {
        let st = vector_state(sys, xi)?;
        net.push(scalar_embedding(sys, &st, n).into_inner());
    }

    let mut scored: Vec<(f64, usize, usize, usize)> = Vec::new();
    for i in 0..net.len() {
        for j in i + 1..net.len() {
            let diff = Difference::new(l, &net[i], &net[j])?;
            let (mut v, mut arg) = (0.0, 0);
            for (p, c) in pool.iter().enumerate() {
                let s = diff.norm_at(c);
                if s > v {
                    v = s;
                    arg = p;
                }
            }
            scored.push((v, i, j, arg));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut value, mut bi, mut bj) = (scored[0].0, scored[0].1, scored[0].2);
    let mut element = sys.from_herm_coords(&pool[scored[0].3]);
    for &(_, i, j, _) in scored.iter().take(opts.refine) {
        let est = rho_with_ball(ball, &net[i], &net[j], &opts.rho)?;
        if est.value > value {
            value = est.value;
            bi = i;
            bj = j;
            if let Some(x) = est.element() {
                element = x.clone();
            }
        }
    }
    let lower = MetricEstimate::new(value, EstimateKind::Lower, n)
        .with_seed(opts.seed)
        .witness(Witness::Element { matrix: element })
        .witness(Witness::Map {
            map: net[bi].to_wire(),
        })
        .witness(Witness::Map {
            map: net[bj].to_wire(),
        })
        .param("net_size", net.len())
        .param("pool_size", pool.len())
        .param("refine", opts.refine);
    Ok(DiameterReport {
        n,
        lower,
        upper: None,
        certified_upper: None,
    })
}
