use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::hausdorff::{hausdorff_ucp, HausdorffOptions};
use super::{EstimateKind, MetricEstimate};
use crate::convex::{min_max_norm, AffineMatrix, SolverOptions};
use crate::error::{Error, Result};
use crate::lipnorms::{Bridge, LipNorm, Variant};
use crate::matrix::{real_combination, CMatrix};
use crate::opsys::{compression, CpMap, OperatorSystem};

pub fn make_norm_bridge(epsilon: f64, x: &OperatorSystem, y: &OperatorSystem) -> Result<Bridge> {
    Bridge::norm(epsilon, x, y)
}

/// `eta^{-1} ||Phi(x) - y||`; `epsilon` bounds `||Gamma(Phi(x)) - x||` on the
/// Lip ball for some unital `Gamma` and enters the uniform bound.
pub fn make_quotient_bridge(
    eta: f64,
    epsilon: f64,
    phi: &CpMap,
    y: &OperatorSystem,
) -> Result<Bridge> {
    Bridge::quotient(eta, epsilon, phi, y)
}

/// `C^{-1} lambda ||x - mu 1||` between `(X, lambda L)` and the one-point
/// system; `C` should be at least `diam(X, L)`.
pub fn make_scaling_bridge(lambda: f64, c: f64, x: &OperatorSystem) -> Result<Bridge> {
    Bridge::scaling(lambda, c, x)
}

/// `gamma^{-1} |sigma0(x) - omega0(y)|`; the diameters are the caller's
/// estimates for the uniform bound `diam_x + diam_y + gamma`.
pub fn make_point_bridge(
    gamma: f64,
    sigma0: &CpMap,
    omega0: &CpMap,
    diam_x: f64,
    diam_y: f64,
) -> Result<Bridge> {
    Bridge::point(gamma, sigma0, omega0, diam_x, diam_y)
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeCheck {
    pub samples: usize,
    /// `max_a (min_b max(L_B(b), N(a, b)) - L_A(a))` over samples with
    /// `L_A(a) = 1`.
    pub max_excess: f64,
    #[serde(skip)]
    pub worst: Option<(CMatrix, CMatrix)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeReport {
    /// `N(1, 1)`.
    pub unit_pair: f64,
    /// `N(1, 0)`.
    pub unit_zero: f64,
    pub condition_i: bool,
    pub x_to_y: BridgeCheck,
    pub y_to_x: BridgeCheck,
    /// `(delta, passed)` for each tolerance in the grid.
    pub by_delta: Vec<(f64, bool)>,
    pub passed: bool,
}

/// For `a` fixed on one side, `min_b max(L_B(b), N(a, b))` with `b` ranging
/// over the other side's latent space.
fn partner_min(
    lb: &LipNorm,
    bridge: &Bridge,
    a_fixed: &CMatrix,
    b_is_right: bool,
    opts: SolverOptions,
) -> Result<(f64, Vec<f64>)> {
    let comp = lb.compiled();
    let maps = if b_is_right {
        &bridge.right
    } else {
        &bridge.left
    };
    let sign = if b_is_right {
        -bridge.scale
    } else {
        bridge.scale
    };
    let mut terms: Vec<AffineMatrix> = comp.ball_terms();
    let coeffs: Vec<CMatrix> = (0..comp.latent)
        .map(|j| real_combination(&comp.proj.column(j), maps).scale_real(sign))
        .collect();
    let constant = a_fixed.scale_real(if b_is_right {
        bridge.scale
    } else {
        -bridge.scale
    });
    terms.push(AffineMatrix { constant, coeffs });
    let sol = min_max_norm(&terms, comp.latent, opts)?;
    Ok((sol.value, comp.proj.mul_vec(&sol.w)))
}

fn check_side(
    la: &LipNorm,
    lb: &LipNorm,
    bridge: &Bridge,
    a_is_left: bool,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<BridgeCheck> {
    let sys = la.system();
    let d = sys.dim();
    let a_maps = if a_is_left {
        &bridge.left
    } else {
        &bridge.right
    };
    let mut dirs: Vec<Vec<f64>> = (1..d)
        .map(|j| {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            e
        })
        .collect();
    while dirs.len() < samples + d - 1 {
        dirs.push(
            (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
        );
    }
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst = None;
    let mut count = 0;
    for mut c in dirs {
        c[0] = rng.random_range(-1.0..1.0);
        let lv = la.eval_herm(&c)?;
        if !(lv.upper > 1e-12) {
            continue;
        }
        let c: Vec<f64> = c.iter().map(|v| v / lv.upper).collect();
        let lower = lv.lower / lv.upper;
        let image = real_combination(&c, a_maps);
        let (m, b) = partner_min(lb, bridge, &image, a_is_left, SolverOptions::default())?;
        count += 1;
        let excess = m - lower;
        if excess > max_excess {
            max_excess = excess;
            worst = Some((sys.from_herm_coords(&c), lb.system().from_herm_coords(&b)));
        }
    }
    Ok(BridgeCheck {
        samples: count,
        max_excess: max_excess.max(0.0),
        worst,
    })
}

/// Checks conditions (i) and (ii) of a bridge on sampled elements.
pub fn validate_bridge(
    bridge: &Bridge,
    lx: &LipNorm,
    ly: &LipNorm,
    deltas: &[f64],
    samples: usize,
    seed: u64,
) -> Result<BridgeReport> {
    if bridge.left.len() != lx.system().dim() || bridge.right.len() != ly.system().dim() {
        return Err(Error::Dimension(
            "bridge maps do not match the summands".into(),
        ));
    }
    let (unit_pair, unit_zero) = bridge.condition_i(lx.system(), ly.system());
    let condition_i = unit_pair <= 1e-9 && unit_zero > 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_to_y = check_side(lx, ly, bridge, true, samples, &mut rng)?;
    let y_to_x = check_side(ly, lx, bridge, false, samples, &mut rng)?;
    let worst = x_to_y.max_excess.max(y_to_x.max_excess);
    let by_delta: Vec<(f64, bool)> = deltas.iter().map(|&d| (d, worst <= d)).collect();
    let passed = condition_i && by_delta.iter().all(|(_, p)| *p);
    Ok(BridgeReport {
        unit_pair,
        unit_zero,
        condition_i,
        x_to_y,
        y_to_x,
        by_delta,
        passed,
    })
}

pub const BRIDGE_DELTA: f64 = 1e-6;
const BRIDGE_SAMPLES: usize = 12;

/// A direct-sum Lip-norm `max(L_X, L_Y, N)` with its bridge certificate.
#[derive(Clone, Debug)]
pub struct AdmissibleLip {
    lip: LipNorm,
    pub report: BridgeReport,
    /// `max |L_induced(h) - L_side(h)|` over the Hermitian bases of both
    /// summands.
    pub induced_defect: f64,
}

pub(crate) fn side_projection(
    sum: &OperatorSystem,
    kx: usize,
    ky: usize,
    x_side: bool,
) -> Result<CpMap> {
    let (k, off) = if x_side { (kx, 0) } else { (ky, kx) };
    let v = CMatrix::from_fn(kx + ky, k, |a, b| {
        if a == b + off {
            num_complex::Complex::new(1.0, 0.0)
        } else {
            num_complex::Complex::new(0.0, 0.0)
        }
    });
    Ok(compression(sum, &v)?.into_inner())
}

impl AdmissibleLip {
    pub fn new(lx: LipNorm, ly: LipNorm, bridge: Bridge, seed: u64) -> Result<Self> {
        let report = validate_bridge(&bridge, &lx, &ly, &[BRIDGE_DELTA], BRIDGE_SAMPLES, seed)?;
        if !report.passed {
            return Err(Error::Validation(format!(
                "bridge fails: condition (i) {}, excess {:.3e} / {:.3e}",
                report.condition_i, report.x_to_y.max_excess, report.y_to_x.max_excess
            )));
        }
        let lip = LipNorm::direct_sum(lx, ly, bridge)?;
        let mut out = Self {
            lip,
            report,
            induced_defect: 0.0,
        };
        out.induced_defect = out.induced_defect()?;
        if out.induced_defect > 1e-6 {
            return Err(Error::Validation(format!(
                "direct sum does not induce the summand Lip-norms (defect {:.3e})",
                out.induced_defect
            )));
        }
        Ok(out)
    }

    fn induced_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x_side in [true, false] {
            let side = if x_side { self.x_lip() } else { self.y_lip() };
            let q = self.induced(x_side)?;
            for h in side.system().hermitian_basis().iter().skip(1) {
                let want = side.eval(h)?.value;
                let got = q.eval(h)?.value;
                worst = worst.max((want - got).abs());
            }
        }
        Ok(worst)
    }

    /// The quotient of the sum onto one summand.
    pub fn induced(&self, x_side: bool) -> Result<LipNorm> {
        let (sx, sy) = (self.x_system(), self.y_system());
        let pr = side_projection(
            self.lip.system(),
            sx.ambient_dim(),
            sy.ambient_dim(),
            x_side,
        )?;
        LipNorm::quotient(self.lip.clone(), pr, if x_side { sx } else { sy })
    }

    pub fn lip(&self) -> &LipNorm {
        &self.lip
    }

    fn parts(&self) -> (&LipNorm, &LipNorm, &Bridge) {
        match self.lip.variant() {
            Variant::DirectSum { x, y, bridge } => (x, y, bridge),
            _ => unreachable!("admissible Lip-norms are direct sums"),
        }
    }

    pub fn x_lip(&self) -> &LipNorm {
        self.parts().0
    }

    pub fn y_lip(&self) -> &LipNorm {
        self.parts().1
    }

    pub fn bridge(&self) -> &Bridge {
        self.parts().2
    }

    pub fn x_system(&self) -> &OperatorSystem {
        self.x_lip().system()
    }

    pub fn y_system(&self) -> &OperatorSystem {
        self.y_lip().system()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistUpper {
    /// `None` when the bridge fails validation.
    pub estimate: Option<MetricEstimate>,
    pub validation: BridgeReport,
}

/// Upper bound on the complete distance from a bridge.
///
/// Named bridges give their analytic bound (independent of `n`); general
/// bridges fall back to the sampled Hausdorff estimate, maximized over
/// `n <= n_max`.
pub fn dist_upper(
    lx: &LipNorm,
    ly: &LipNorm,
    bridge: &Bridge,
    n_max: usize,
    opts: &HausdorffOptions,
) -> Result<DistUpper> {
    let validation = validate_bridge(bridge, lx, ly, &[BRIDGE_DELTA], BRIDGE_SAMPLES, opts.seed)?;
    if !validation.passed {
        return Ok(DistUpper {
            estimate: None,
            validation,
        });
    }
    if let Some(b) = bridge.analytic_bound() {
        let kind = serde_json::to_value(&bridge.kind).unwrap_or_default();
        let est = MetricEstimate::new(b, EstimateKind::Upper, 0).param("bridge", kind);
        return Ok(DistUpper {
            estimate: Some(est),
            validation,
        });
    }
    let la = AdmissibleLip::new(lx.clone(), ly.clone(), bridge.clone(), opts.seed)?;
    let mut best: Option<MetricEstimate> = None;
    for n in 1..=n_max.max(1) {
        let e = hausdorff_ucp(&la, n, opts)?;
        if best.as_ref().is_none_or(|b| e.value > b.value) {
            best = Some(e);
        }
    }
    let est = best.map(|mut e| {
        e.kind = EstimateKind::Heuristic;
        e.params.insert("n_max".into(), n_max.into());
        e
    });
    Ok(DistUpper {
        estimate: est,
        validation,
    })
}
