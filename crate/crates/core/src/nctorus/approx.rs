use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{
    fejer_bound, fejer_kernel, gcd, torus_lip, FejerQuadrature, FourierPolynomial, LengthFn,
    TorusLipOptions, TorusParams, TorusSpec,
};
use crate::error::{Error, Result};
use crate::lipnorms::{validate_lipnorm, LipNorm, LipReport};
use crate::matrix::CMatrix;
use crate::opsys::{CpMap, MapWire, OperatorSystem};

/// `q^{-d} sum_{t in (Z/q)^d} prod_j K_n(t_j) l(t)`. For any Lip-norm that
/// dominates the lattice part of the gauge action this bounds
/// `||x - sigma_n(x)||` on the Lip ball of the model.
pub fn lattice_bound(spec: &TorusSpec, length: LengthFn, n: usize) -> f64 {
    let (d, q) = (spec.d(), spec.q());
    let mut total = 0.0;
    for idx in 0..q.pow(d as u32) {
        let mut rest = idx;
        let mut t = vec![0.0; d];
        let mut w = 1.0;
        for ti in t.iter_mut() {
            *ti = (rest % q) as f64 / q as f64;
            rest /= q;
            w *= fejer_kernel(n, *ti) / q as f64;
        }
        total += w * length.eval(&t);
    }
    total
}

fn normalize(l: &LipNorm, x: CMatrix) -> Result<Option<CMatrix>> {
    let v = l.eval(&x)?.value;
    if v > 1e-12 {
        Ok(Some(x.scale_real(1.0 / v)))
    } else {
        Ok(None)
    }
}

fn hermitian_part(x: &CMatrix) -> CMatrix {
    (x + &x.adjoint()).scale_real(0.5)
}

/// Self-adjoint elements with `L = 1`: real and imaginary parts of every
/// monomial, then `extra` random low-degree polynomials and random
/// elements of the system.
pub fn lip_net(spec: &TorusSpec, l: &LipNorm, extra: usize, seed: u64) -> Result<Vec<CMatrix>> {
    let sys = spec.system();
    let mut out = Vec::new();
    for m in spec.monomials().iter().skip(1) {
        let re = hermitian_part(m);
        let im = hermitian_part(&m.scale(Complex::new(0.0, -1.0)));
        for h in [re, im] {
            if h.max_abs() > 1e-12 {
                if let Some(x) = normalize(l, h)? {
                    out.push(x);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degree = spec.degree_cap().clamp(1, 2);
    for i in 0..extra {
        let x = if i % 2 == 0 {
            hermitian_part(&spec.to_matrix(&FourierPolynomial::random(
                spec.d(),
                degree,
                &mut rng,
            ))?)
        } else {
            let c: Vec<f64> = (0..sys.dim())
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            sys.from_herm_coords(&c)
        };
        if let Some(x) = normalize(l, x)? {
            out.push(x);
        }
    }
    Ok(out)
}

/// `max ||sigma_n(x) - x||` over `net`.
pub fn net_defect(spec: &TorusSpec, n: usize, net: &[CMatrix]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in net {
        let y = spec.cesaro_matrix(x, n)?;
        worst = worst.max((&y - x).operator_norm()?);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RcpOptions {
    pub length: LengthFn,
    /// Required gap between the Fejér bound and `epsilon`.
    pub slack: f64,
    pub quadrature_points: usize,
    /// Random elements added to the monomial part of the verification net.
    pub net: usize,
    pub seed: u64,
}

impl Default for RcpOptions {
    fn default() -> Self {
        Self {
            length: LengthFn::Euclidean,
            slack: 1e-3,
            quadrature_points: 1 << 12,
            net: 64,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaKind {
    /// `c -> c 1`, for `B = C`.
    Unitization,
    /// `B` is the whole model.
    Inclusion,
}

/// A triple `(alpha, beta, B)` with `alpha = sigma_n`.
#[derive(Clone, Debug, Serialize)]
pub struct RcpCertificate {
    pub epsilon: f64,
    pub n: usize,
    /// C*-algebra rank of `B`.
    pub rank: usize,
    pub b_dim: usize,
    pub fejer_bound: FejerQuadrature,
    /// Rigorous for the sampled Lip-norm; `certified` iff below `epsilon`.
    pub lattice_bound: f64,
    pub certified: bool,
    pub net_size: usize,
    pub net_seed: u64,
    /// `max ||beta(alpha(x)) - x||` over the verification net.
    pub net_defect: f64,
    pub verified: bool,
    pub alpha: MapWire,
    pub beta: BetaKind,
}

fn alpha_map(spec: &TorusSpec, n: usize) -> Result<CpMap> {
    if n == 0 {
        let images = spec
            .monomials()
            .iter()
            .map(|m| CMatrix::from_fn(1, 1, |_, _| spec.tau(m)))
            .collect();
        CpMap::from_basis_images(spec.system(), 1, images)
    } else {
        Ok(spec.cesaro_map(n)?.into_inner())
    }
}

/// Constructive upper bound for `Rcp_L(epsilon)`: the smallest Cesàro order
/// `n < q` whose Fejér bound clears `epsilon`, `B = C` for `n = 0` and the
/// whole model otherwise.
pub fn rcp_upper(
    spec: &TorusSpec,
    l: &LipNorm,
    epsilon: f64,
    opts: &RcpOptions,
) -> Result<RcpCertificate> {
    let q = spec.q();
    let chosen = (0..q).find_map(|n| {
        let fb = fejer_bound(n, opts.length, spec.d(), opts.quadrature_points);
        (fb.value + opts.slack < epsilon).then_some((n, fb))
    });
    let net = lip_net(spec, l, opts.net, opts.seed)?;
    let Some((n, fb)) = chosen else {
        let best = net_defect(spec, q - 1, &net)?;
        return Err(Error::Numerical(format!(
            "no Cesàro order below q = {q} reaches epsilon = {epsilon}; smallest defect on the net is {best:.4}, try a larger q"
        )));
    };
    let lb = lattice_bound(spec, opts.length, n);
    let defect = net_defect(spec, n, &net)?;
    let (rank, b_dim, beta) = if n == 0 {
        (1, 1, BetaKind::Unitization)
    } else {
        (spec.rank(), spec.ambient_dim(), BetaKind::Inclusion)
    };
    Ok(RcpCertificate {
        epsilon,
        n,
        rank,
        b_dim,
        fejer_bound: fb,
        lattice_bound: lb,
        certified: lb < epsilon,
        net_size: net.len(),
        net_seed: opts.seed,
        net_defect: defect,
        verified: defect < epsilon,
        alpha: alpha_map(spec, n)?.to_wire(),
        beta,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AfnResult {
    pub rank: usize,
    pub certificate: RcpCertificate,
    /// Dimension of `Y = alpha(X)`.
    pub y_dim: usize,
    pub y_validation: LipReport,
    #[serde(skip)]
    pub y_system: OperatorSystem,
    #[serde(skip)]
    pub y_lip: Option<LipNorm>,
}

/// Upper bound for `Afn_L(epsilon)` from [`rcp_upper`], with `Y = alpha(X)`
/// carrying the quotient of `L` by `alpha`.
pub fn afn_upper(
    spec: &TorusSpec,
    l: &LipNorm,
    epsilon: f64,
    opts: &RcpOptions,
) -> Result<AfnResult> {
    let cert = rcp_upper(spec, l, epsilon, opts)?;
    let alpha = alpha_map(spec, cert.n)?;
    let y = if cert.n == 0 {
        OperatorSystem::scalars()
    } else {
        let basis = spec
            .residues()
            .iter()
            .zip(spec.monomials())
            .filter(|(k, _)| spec.cesaro_multiplier(cert.n, k) != 0.0)
            .map(|(_, m)| m.clone())
            .collect();
        OperatorSystem::new(basis)?
    };
    let y_lip = LipNorm::quotient(l.clone(), alpha, &y)?;
    let report = validate_lipnorm(&y_lip, opts.seed)?;
    Ok(AfnResult {
        rank: cert.rank,
        y_dim: y.dim(),
        certificate: cert,
        y_validation: report,
        y_system: y,
        y_lip: Some(y_lip),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub q: usize,
    pub p: i64,
    pub n: usize,
    pub fejer_bound: f64,
    pub lattice_bound: f64,
    /// `max ||sigma_n(x) - x||` over the Lip-one net.
    pub achieved: f64,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniformityProbe {
    pub n: usize,
    pub rows: Vec<ProbeRow>,
    /// `(q, (max - min) / max)` of the achieved defects over coprime `p`.
    pub spread_by_q: Vec<(usize, f64)>,
    pub max_spread: f64,
}

/// Sweeps every coprime `p / q` with `q` in `qs` (and `2n + 1 <= q`) and
/// records the defect of `sigma_n` on a Lip-one net of the two-torus.
pub fn uniformity_probe(
    qs: &[usize],
    n: usize,
    lip: &TorusLipOptions,
    opts: &RcpOptions,
) -> Result<UniformityProbe> {
    let mut rows = Vec::new();
    let mut spread_by_q = Vec::new();
    for &q in qs {
        if 2 * n + 1 > q {
            continue;
        }
        let mut vals = Vec::new();
        for p in 1..q as i64 {
            if gcd(p, q as i64) != 1 {
                continue;
            }
            let spec = TorusSpec::new(TorusParams::two(q, p))?;
            let l = torus_lip(&spec, lip)?;
            let net = lip_net(&spec, &l, opts.net, opts.seed)?;
            let achieved = net_defect(&spec, n, &net)?;
            vals.push(achieved);
            rows.push(ProbeRow {
                q,
                p,
                n,
                fejer_bound: fejer_bound(n, lip.length, 2, opts.quadrature_points).value,
                lattice_bound: lattice_bound(&spec, lip.length, n),
                achieved,
                rank: spec.rank(),
            });
        }
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if !vals.is_empty() && hi > 0.0 {
            spread_by_q.push((q, (hi - lo) / hi));
        }
    }
    let max_spread = spread_by_q.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(UniformityProbe {
        n,
        rows,
        spread_by_q,
        max_spread,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TotalBoundedness {
    /// `max` over the family of `2 * lattice_bound(0)`, an upper bound for
    /// the diameter.
    pub max_diameter_upper: f64,
    /// `(epsilon, max rcp rank)`; `None` where some member has no
    /// certificate.
    pub afn: Vec<(f64, Option<usize>)>,
}

/// The two quantities of the total boundedness criterion over a family of
/// torus models: a uniform diameter bound and `epsilon -> max Afn` upper
/// bounds.
pub fn total_boundedness(
    specs: &[TorusSpec],
    lip: &TorusLipOptions,
    epsilons: &[f64],
    opts: &RcpOptions,
) -> Result<TotalBoundedness> {
    let mut diam: f64 = 0.0;
    let mut lips = Vec::with_capacity(specs.len());
    for s in specs {
        diam = diam.max(2.0 * lattice_bound(s, lip.length, 0));
        lips.push(torus_lip(s, lip)?);
    }
    let mut afn = Vec::new();
    for &eps in epsilons {
        let mut worst = Some(0usize);
        for (s, l) in specs.iter().zip(&lips) {
            worst = match (worst, rcp_upper(s, l, eps, opts)) {
                (Some(w), Ok(c)) => Some(w.max(c.rank)),
                (_, Err(Error::Numerical(_))) | (None, _) => None,
                (_, Err(e)) => return Err(e),
            };
        }
        afn.push((eps, worst));
    }
    Ok(TotalBoundedness {
        max_diameter_upper: diam,
        afn,
    })
}
