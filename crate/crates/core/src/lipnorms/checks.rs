use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{LipNorm, SeminormValue};
use crate::error::{input, Result};
use crate::matrix::CMatrix;
use crate::C64;

#[derive(Clone, Debug, Serialize)]
pub struct LipReport {
    pub passed: bool,
    /// `L(1)`, evaluated without the scalar shortcut.
    pub unit_value: f64,
    /// Dimension of the kernel on self-adjoint elements (1 means scalars).
    pub kernel_dim: usize,
    pub kernel_ok: bool,
    pub max_triangle_excess: f64,
    pub max_homogeneity_error: f64,
    pub seminorm_ok: bool,
    pub max_adjoint_defect: f64,
    pub adjoint_ok: bool,
    pub samples: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

fn random_herm(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn random_complex(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    (0..d)
        .map(|_| {
            Complex::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect()
}

/// Checks the Lip-norm axioms: kernel equal to the scalars (by a rank
/// computation on the defining maps), seminorm axioms on random samples, and
/// adjoint invariance.
pub fn validate_lipnorm(l: &LipNorm, seed: u64) -> Result<LipReport> {
    let sys = l.system();
    let d = sys.dim();
    let comp = l.compiled();
    let mut failures = Vec::new();

    let mut e0 = vec![0.0; d];
    e0[0] = 1.0;
    let unit_value = l.eval_raw(&e0)?;
    if unit_value > 1e-9 {
        failures.push(format!("L(1) = {unit_value:.3e} is not zero"));
    }

    // self-adjoint kernel = proj(ker T)
    let ker = comp.stacked().kernel_basis(1e-9);
    let image = comp.proj.mul(&ker);
    let kernel_dim = image.rank(1e-9);
    let mut kernel_ok = kernel_dim == 1;
    if kernel_ok {
        // the image must be spanned by e_0
        let mut resid = 0.0f64;
        for j in 0..image.cols {
            for i in 1..d {
                resid = resid.max(image.get(i, j).abs());
            }
        }
        let scale = (0..image.cols)
            .map(|j| image.get(0, j).abs())
            .fold(0.0, f64::max);
        if resid > 1e-8 * (1.0 + scale) {
            kernel_ok = false;
        }
    }
    if !kernel_ok {
        failures.push(format!(
            "kernel on self-adjoint elements has dimension {kernel_dim} or is not the scalars"
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = if comp.fiber_dim() == 0 { 24 } else { 4 };
    let mut tri: f64 = 0.0;
    let mut hom: f64 = 0.0;
    let mut adj: f64 = 0.0;
    for _ in 0..samples {
        let x = random_herm(&mut rng, d);
        let y = random_herm(&mut rng, d);
        let t: f64 = rng.random_range(-3.0..3.0);
        let lx = l.eval_herm(&x)?;
        let ly = l.eval_herm(&y)?;
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lxy = l.eval_herm(&sum)?;
        tri = tri.max(lxy.lower - lx.upper - ly.upper);
        let tx: Vec<f64> = x.iter().map(|a| a * t).collect();
        let ltx = l.eval_herm(&tx)?;
        let target = t.abs() * lx.value;
        let err = if target < ltx.lower {
            ltx.lower - target
        } else if target > ltx.upper {
            target - ltx.upper
        } else {
            0.0
        } / (1.0 + target);
        hom = hom.max(err);

        let z = random_complex(&mut rng, d);
        let zc: Vec<C64> = z.iter().map(|c| c.conj()).collect();
        let lz = l.eval_coords(&z)?;
        let lzc = l.eval_coords(&zc)?;
        let gap = (lz.upper - lz.lower) + (lzc.upper - lzc.lower);
        adj = adj.max(((lz.value - lzc.value).abs() - gap).max(0.0) / (1.0 + lz.value));
    }
    let seminorm_ok = tri <= 1e-9 && hom <= 1e-9;
    if !seminorm_ok {
        failures.push(format!(
            "seminorm axioms violated (triangle excess {tri:.2e}, homogeneity error {hom:.2e})"
        ));
    }
    let adjoint_tol = if comp.fiber_dim() == 0 { 1e-10 } else { 1e-7 };
    let adjoint_ok = adj <= adjoint_tol;
    if !adjoint_ok {
        failures.push(format!("not adjoint invariant (defect {adj:.2e})"));
    }
    Ok(LipReport {
        passed: failures.is_empty(),
        unit_value,
        kernel_dim,
        kernel_ok,
        max_triangle_excess: tri,
        max_homogeneity_error: hom,
        seminorm_ok,
        max_adjoint_defect: adj,
        adjoint_ok,
        samples,
        failures,
        notes: vec![
            "closedness of the domain is automatic in finite dimensions".into(),
            "once the kernel is the scalars the metric induces the weak* topology on the finite-dimensional state space".into(),
        ],
    })
}

/// The usual Leibniz bound `f(a, b, c, d) = a c + b d`.
pub fn leibniz_f(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * c + b * d
}

#[derive(Clone, Debug, Serialize)]
pub struct LeibnizReport {
    pub pairs: usize,
    /// Pairs where the lower bracket of `L'(xy)` exceeds `f` at the upper
    /// brackets of `L'(x)`, `L'(y)` by more than the slack.
    pub violations: usize,
    /// Pairs that are neither certified to hold nor to fail.
    pub inconclusive: usize,
    /// `max (L'(xy) - f(...))` over the sampled pairs.
    pub max_excess: f64,
    pub holds: bool,
    #[serde(skip)]
    pub worst: Option<(CMatrix, CMatrix)>,
}

/// Samples pairs `(x, y)` and tests `L'(xy) <= f(L'(x), L'(y), ||y||, ||x||)`,
/// where `L'` is the adjoint-invariant complex-linear extension of `L`
/// (`max_t ||T_t(x)||` on the complexified normal form).
///
/// Pairs of Hermitian basis elements and of basis elements come first, then
/// random complex elements, random self-adjoint ones and scalar multiples of
/// the identity.
pub fn check_f_leibniz(
    l: &LipNorm,
    f: &dyn Fn(f64, f64, f64, f64) -> f64,
    samples: usize,
    slack: f64,
    seed: u64,
) -> Result<LeibnizReport> {
    let sys = l.system();
    if !sys.is_multiplicatively_closed() {
        return input("f-Leibniz check needs a multiplicatively closed system");
    }
    let d = sys.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(CMatrix, CMatrix)> = Vec::new();
    let structured: Vec<CMatrix> = sys
        .basis()
        .iter()
        .chain(sys.hermitian_basis())
        .cloned()
        .collect();
    'outer: for a in &structured {
        for b in &structured {
            if pool.len() >= samples / 2 {
                break 'outer;
            }
            pool.push((a.clone(), b.clone()));
        }
    }
    while pool.len() < samples {
        let kind = pool.len() % 5;
        let draw = |rng: &mut ChaCha8Rng| -> CMatrix {
            match kind {
                0 | 1 | 2 => sys.from_coords(&random_complex(rng, d)),
                3 => sys.from_herm_coords(&random_herm(rng, d)),
                _ => {
                    let mut c = vec![Complex::new(0.0, 0.0); d];
                    c[0] = Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0);
                    sys.from_coords(&c)
                }
            }
        };
        let x = draw(&mut rng);
        let y = if kind == 4 {
            sys.from_coords(&random_complex(&mut rng, d))
        } else {
            draw(&mut rng)
        };
        pool.push((x, y));
    }

    let mut violations = 0;
    let mut inconclusive = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst = None;
    for (x, y) in &pool {
        let xy = x * y;
        let lxy: SeminormValue = l.eval(&xy)?;
        let lx = l.eval(x)?;
        let ly = l.eval(y)?;
        let nx = x.operator_norm()?;
        let ny = y.operator_norm()?;
        let rhs_hi = f(lx.upper, ly.upper, ny, nx);
        let rhs_lo = f(lx.lower, ly.lower, ny, nx);
        let excess = lxy.value - f(lx.value, ly.value, ny, nx);
        if excess > max_excess {
            max_excess = excess;
            worst = Some((x.clone(), y.clone()));
        }
        if lxy.lower > rhs_hi + slack {
            violations += 1;
        } else if lxy.upper > rhs_lo + slack {
            inconclusive += 1;
        }
    }
    Ok(LeibnizReport {
        pairs: pool.len(),
        violations,
        inconclusive,
        max_excess,
        holds: violations == 0 && inconclusive == 0,
        worst,
    })
}
