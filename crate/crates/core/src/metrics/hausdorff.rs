use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rho::{rho_with_ball, RhoOptions};
use super::{AdmissibleLip, EstimateKind, LipBall, MetricEstimate, Witness};
use crate::error::{input, Result};
use crate::lipnorms::BridgeKind;
use crate::matrix::CMatrix;
use crate::opsys::{
    extend_to_ambient, random_isometry, random_ucp_with, scalar_embedding, vector_state, CpMap,
    OperatorSystem,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HausdorffOptions {
    /// Sampled maps per side.
    pub net: usize,
    /// Random starting candidates per match.
    pub candidates: usize,
    /// Rounds of convex-combination moves per match.
    pub local_rounds: usize,
    pub seed: u64,
    pub rho: RhoOptions,
}

impl Default for HausdorffOptions {
    fn default() -> Self {
        Self {
            net: 4,
            candidates: 4,
            local_rounds: 2,
            seed: 0,
            rho: RhoOptions::default(),
        }
    }
}

/// `phi o pi_X` as a map on `X ⊕ Y`.
pub fn lift_x(la: &AdmissibleLip, phi: &CpMap) -> Result<CpMap> {
    lift(la, phi, Side::X)
}

/// `psi o pi_Y` as a map on `X ⊕ Y`.
pub fn lift_y(la: &AdmissibleLip, psi: &CpMap) -> Result<CpMap> {
    lift(la, psi, Side::Y)
}

fn side_system(la: &AdmissibleLip, side: Side) -> &OperatorSystem {
    match side {
        Side::X => la.x_system(),
        Side::Y => la.y_system(),
    }
}

fn lift(la: &AdmissibleLip, map: &CpMap, side: Side) -> Result<CpMap> {
    let sum = la.lip().system();
    let kx = la.x_system().ambient_dim();
    let ky = la.y_system().ambient_dim();
    let sys = side_system(la, side);
    let mut herm = Vec::with_capacity(sum.dim());
    for h in sum.hermitian_basis() {
        let b = match side {
            Side::X => h.block(0, 0, kx, kx),
            Side::Y => h.block(kx, kx, ky, ky),
        };
        herm.push(map.apply(sys, &b)?);
    }
    CpMap::from_herm_images(sum, map.n(), herm)
}

fn mix(sys: &OperatorSystem, a: &CpMap, b: &CpMap, t: f64) -> Result<CpMap> {
    let herm = a
        .herm_images()
        .iter()
        .zip(b.herm_images())
        .map(|(x, y)| &x.scale_real(1.0 - t) + &y.scale_real(t))
        .collect();
    CpMap::from_herm_images(sys, a.n(), herm)
}

#[derive(Clone, Debug)]
pub struct Matched {
    pub map: CpMap,
    pub estimate: MetricEstimate,
}

fn contains_all(big: &OperatorSystem, small: &OperatorSystem) -> bool {
    big.ambient_dim() == small.ambient_dim()
        && small.hermitian_basis().iter().all(|h| big.contains(h))
}

/// Candidates on the target side built from `phi` and the bridge.
fn structured_candidates(la: &AdmissibleLip, phi: &CpMap, from: Side) -> Result<Vec<CpMap>> {
    let src = side_system(la, from);
    let tgt = side_system(la, from.other());
    let n = phi.n();
    let mut out = Vec::new();
    if tgt.dim() == 1 {
        let herm = vec![CMatrix::identity(n)];
        out.push(CpMap::from_herm_images(tgt, n, herm)?);
        return Ok(out);
    }
    if contains_all(src, tgt) {
        let herm = tgt
            .hermitian_basis()
            .iter()
            .map(|h| phi.apply(src, h))
            .collect::<Result<Vec<_>>>()?;
        out.push(CpMap::from_herm_images(tgt, n, herm)?);
    } else if src.ambient_dim() == tgt.ambient_dim() {
        let ext = extend_to_ambient(src, phi)?;
        if ext.restriction_error <= 1e-6 {
            out.push(ext.map.restrict(tgt));
        }
    }
    let bridge = la.bridge();
    match (&bridge.kind, from) {
        (BridgeKind::Quotient { .. }, Side::Y) => {
            // psi o Phi
            let herm = bridge
                .left
                .iter()
                .map(|m| phi.apply(src, m))
                .collect::<Result<Vec<_>>>()?;
            out.push(CpMap::from_herm_images(tgt, n, herm)?);
        }
        (BridgeKind::Point { .. }, _) => {
            let images = if from == Side::X {
                &bridge.right
            } else {
                &bridge.left
            };
            let st = CpMap::from_herm_images(tgt, 1, images.clone())?;
            out.push(scalar_embedding(tgt, &st, n).into_inner());
        }
        _ => {}
    }
    Ok(out)
}

/// Best target-side partner for `phi` under `rho_{L,n}` on `X ⊕ Y`.
///
/// Candidates: the restriction (or ambient extension then restriction) of
/// `phi`, bridge-specific transfers, random UCP maps and scalar embeddings
/// of random vector states; the best is improved by convex-combination moves
/// and evaluated with the full search. Ties keep the first candidate found.
pub fn match_ucp(
    la: &AdmissibleLip,
    phi: &CpMap,
    from: Side,
    opts: &HausdorffOptions,
) -> Result<Matched> {
    let src = side_system(la, from);
    if phi.herm_images().len() != src.dim() {
        return input("map is not defined on the source system");
    }
    let tgt = side_system(la, from.other());
    let n = phi.n();
    let ball = LipBall::new(la.lip());
    let lifted = lift(la, phi, from)?;
    let light = RhoOptions {
        seed: opts.seed,
        ..RhoOptions::light()
    };
    let score = |psi: &CpMap| -> Result<f64> {
        let lp = lift(la, psi, from.other())?;
        Ok(rho_with_ball(&ball, &lifted, &lp, &light)?.value)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cands = structured_candidates(la, phi, from)?;
    let singleton = tgt.dim() == 1;
    if !singleton {
        for _ in 0..opts.candidates {
            cands.push(random_ucp_with(tgt, n, &mut rng).0.into_inner());
        }
        for _ in 0..opts.candidates.div_ceil(2) {
            let xi = random_isometry(tgt.ambient_dim(), 1, &mut rng);
            let st = vector_state(tgt, xi.as_slice())?;
            cands.push(scalar_embedding(tgt, &st, n).into_inner());
        }
    }
    let mut best = cands[0].clone();
    let mut best_score = score(&best)?;
    for c in cands.iter().skip(1) {
        let s = score(c)?;
        if s < best_score {
            best_score = s;
            best = c.clone();
        }
    }
    if !singleton {
        for _ in 0..opts.local_rounds {
            let r = random_ucp_with(tgt, n, &mut rng).0.into_inner();
            for t in [0.5, 0.2, 0.05] {
                let m = mix(tgt, &best, &r, t)?;
                let s = score(&m)?;
                if s < best_score {
                    best_score = s;
                    best = m;
                }
            }
        }
    }
    let full = RhoOptions {
        seed: opts.seed,
        ..opts.rho
    };
    let lp = lift(la, &best, from.other())?;
    let mut est = rho_with_ball(&ball, &lifted, &lp, &full)?;
    est.kind = EstimateKind::Heuristic;
    est = est.witness(Witness::Map {
        map: best.to_wire(),
    });
    Ok(Matched {
        map: best,
        estimate: est,
    })
}

/// Sampled Hausdorff distance between `UCP_n(X)` and `UCP_n(Y)` inside
/// `UCP_n(X ⊕ Y)`: the largest best-match distance over nets on both sides.
pub fn hausdorff_ucp(
    la: &AdmissibleLip,
    n: usize,
    opts: &HausdorffOptions,
) -> Result<MetricEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x4841_5553);
    let mut side_max = [0.0f64; 2];
    let mut worst: Option<CpMap> = None;
    let mut worst_value = -1.0;
    for (idx, side) in [Side::X, Side::Y].into_iter().enumerate() {
        let sys = side_system(la, side);
        let mut net: Vec<CpMap> = Vec::new();
        if sys.dim() == 1 {
            net.push(CpMap::from_herm_images(sys, n, vec![CMatrix::identity(n)])?);
        } else {
            for _ in 0..opts.net {
                net.push(random_ucp_with(sys, n, &mut rng).0.into_inner());
            }
            for _ in 0..opts.net.div_ceil(2) {
                let xi = random_isometry(sys.ambient_dim(), 1, &mut rng);
                let st = vector_state(sys, xi.as_slice())?;
                net.push(scalar_embedding(sys, &st, n).into_inner());
            }
        }
        for (i, phi) in net.iter().enumerate() {
            let o = HausdorffOptions {
                seed: opts.seed.wrapping_add(1 + i as u64 + 1000 * idx as u64),
                ..*opts
            };
            let m = match_ucp(la, phi, side, &o)?;
            side_max[idx] = side_max[idx].max(m.estimate.value);
            if m.estimate.value > worst_value {
                worst_value = m.estimate.value;
                worst = Some(phi.clone());
            }
        }
    }
    let mut est = MetricEstimate::new(side_max[0].max(side_max[1]), EstimateKind::Heuristic, n)
        .with_seed(opts.seed)
        .param("net", opts.net)
        .param("candidates", opts.candidates)
        .param("local_rounds", opts.local_rounds)
        .param("x_side", side_max[0])
        .param("y_side", side_max[1]);
    if let Some(w) = worst {
        est = est.witness(Witness::Map { map: w.to_wire() });
    }
    Ok(est)
}
