use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TorusSpec;
use crate::error::{input, Result};
use crate::lipnorms::{Action, LipNorm};

/// Length function on `T^d = (R/Z)^d`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthFn {
    /// Distance to `0` in the quotient of the Euclidean metric.
    #[default]
    Euclidean,
    /// `max_i dist(t_i, Z)`.
    Max,
}

fn circle(t: f64) -> f64 {
    let r = t - t.floor();
    r.min(1.0 - r)
}

impl LengthFn {
    pub fn eval(self, t: &[f64]) -> f64 {
        match self {
            LengthFn::Euclidean => t.iter().map(|&x| circle(x).powi(2)).sum::<f64>().sqrt(),
            LengthFn::Max => t.iter().map(|&x| circle(x)).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthCheck {
    pub samples: usize,
    pub zero_at_origin: bool,
    /// Smallest value seen away from the origin.
    pub min_off_origin: f64,
    pub max_asymmetry: f64,
    pub max_subadditivity_excess: f64,
    pub passed: bool,
}

/// Samples the length-function axioms on random points and triples.
pub fn check_length(length: LengthFn, d: usize, samples: usize, seed: u64) -> LengthCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero_at_origin = length.eval(&vec![0.0; d]) == 0.0;
    let mut min_off: f64 = f64::INFINITY;
    let mut asym: f64 = 0.0;
    let mut excess: f64 = 0.0;
    for _ in 0..samples {
        let s: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        let t: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        let neg: Vec<f64> = s.iter().map(|x| -x).collect();
        let sum: Vec<f64> = s.iter().zip(&t).map(|(a, b)| a + b).collect();
        let ls = length.eval(&s);
        min_off = min_off.min(ls);
        asym = asym.max((ls - length.eval(&neg)).abs());
        excess = excess.max(length.eval(&sum) - ls - length.eval(&t));
    }
    LengthCheck {
        samples,
        zero_at_origin,
        min_off_origin: min_off,
        max_asymmetry: asym,
        max_subadditivity_excess: excess,
        passed: zero_at_origin && min_off > 0.0 && asym <= 1e-9 && excess <= 1e-9,
    }
}

/// Group elements entering the torus Lip-norm: every nonzero lattice point
/// `m / q` (an automorphism of the model) and optionally fine points
/// `r v` for `v` along coordinate axes and diagonals, acting on
/// coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusLipOptions {
    #[serde(default)]
    pub length: LengthFn,
    #[serde(default)]
    pub fine_radii: Vec<f64>,
}

impl Default for TorusLipOptions {
    fn default() -> Self {
        Self {
            length: LengthFn::Euclidean,
            fine_radii: vec![0.01, 0.05, 0.15],
        }
    }
}

impl TorusLipOptions {
    pub fn lattice_only() -> Self {
        Self {
            length: LengthFn::Euclidean,
            fine_radii: Vec::new(),
        }
    }

    /// Many fine radii, for evaluating close to the continuous supremum.
    pub fn dense() -> Self {
        Self {
            length: LengthFn::Euclidean,
            fine_radii: (1..=24)
                .map(|i| i as f64 / 48.0)
                .chain([1e-3, 5e-3])
                .collect(),
        }
    }
}

fn fine_directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        dirs.push(v);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; d];
                v[i] = h;
                v[j] = s * h;
                dirs.push(v);
            }
        }
    }
    dirs
}

/// Action Lip-norm `max_t ||gamma_t(x) - x|| / l(t)` over the sampled
/// group elements.
pub fn torus_lip(spec: &TorusSpec, opts: &TorusLipOptions) -> Result<LipNorm> {
    let sys = spec.system();
    let (d, q) = (spec.d(), spec.q());
    if q == 1 {
        return input("the q = 1 model is one-dimensional and carries no Lip-norm");
    }
    let mut actions = Vec::new();
    for idx in 1..q.pow(d as u32) {
        let mut m = vec![0i64; d];
        let mut rest = idx;
        for e in m.iter_mut() {
            *e = (rest % q) as i64;
            rest /= q;
        }
        let t: Vec<f64> = m.iter().map(|&e| e as f64 / q as f64).collect();
        let w = spec.lattice_unitary(&m)?;
        actions.push(Action::conjugation(sys, &w, opts.length.eval(&t))?);
    }
    for &r in &opts.fine_radii {
        if !(r > 0.0) {
            return input("fine radii must be positive");
        }
        for v in fine_directions(d) {
            let t: Vec<f64> = v.iter().map(|x| x * r).collect();
            let images = sys
                .hermitian_basis()
                .iter()
                .map(|h| spec.gauge_coeff(&t, h))
                .collect::<Result<Vec<_>>>()?;
            actions.push(Action::from_herm_images(sys, images, opts.length.eval(&t))?);
        }
    }
    LipNorm::action(sys, actions)
}
