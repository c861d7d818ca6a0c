use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::LengthFn;
use crate::scalar::Real;
use crate::C64;

/// `(1 - |k| / (n + 1))_+`.
pub fn fejer_multiplier(n: usize, k: i64) -> f64 {
    (1.0 - k.unsigned_abs() as f64 / (n as f64 + 1.0)).max(0.0)
}

/// Fejér kernel `K_n(t) = (1/(n+1)) (sin((n+1) pi t) / sin(pi t))^2`, i.e.
/// the closed form in the angle `theta = 2 pi t`.
pub fn fejer_kernel<T: Real>(n: usize, t: T) -> T {
    let np1 = T::lit(n as f64 + 1.0);
    let t = t - t.floor();
    let s = (T::PI() * t).sin();
    if s.abs() <= T::epsilon() {
        return np1;
    }
    let r = (np1 * T::PI() * t).sin() / s;
    r * r / np1
}

/// `sum_{|k| <= n} (1 - |k|/(n+1)) e^{2 pi i k t}`.
pub fn fejer_kernel_sum<T: Real>(n: usize, t: T) -> T {
    let np1 = T::lit(n as f64 + 1.0);
    let mut s = T::one();
    for k in 1..=n {
        let kk = T::lit(k as f64);
        s = s + T::lit(2.0) * (T::one() - kk / np1) * (T::lit(2.0) * T::PI() * kk * t).cos();
    }
    s
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FejerQuadrature {
    pub value: f64,
    /// `|T_N - T_{N/2}|` for the trapezoid rule with `N` points.
    pub error_estimate: f64,
    pub points: usize,
}

/// `sum_k int_T l(r_k(t)) K_n(t) dt` by the periodic trapezoid rule on at
/// least `2^12` points.
pub fn fejer_bound(n: usize, length: LengthFn, d: usize, points: usize) -> FejerQuadrature {
    let m = points.max(1 << 12).next_power_of_two();
    let integrate = |m: usize| -> f64 {
        let mut total = 0.0;
        for k in 0..d {
            let mut acc = 0.0;
            let mut t = vec![0.0; d];
            for i in 0..m {
                t[k] = i as f64 / m as f64;
                acc += length.eval(&t) * fejer_kernel(n, t[k]);
            }
            total += acc / m as f64;
        }
        total
    };
    let full = integrate(m);
    let half = integrate(m / 2);
    FejerQuadrature {
        value: full,
        error_estimate: (full - half).abs(),
        points: m,
    }
}

/// Finite sum `sum_k c_k u_1^{k_1} ... u_d^{k_d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPolynomial {
    d: usize,
    terms: BTreeMap<Vec<i64>, C64>,
}

impl FourierPolynomial {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(k: Vec<i64>, c: C64) -> Self {
        let mut p = Self::zero(k.len());
        p.add_term(k, c);
        p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn add_term(&mut self, k: Vec<i64>, c: C64) {
        assert_eq!(k.len(), self.d, "multi-index length");
        *self.terms.entry(k).or_insert(Complex::new(0.0, 0.0)) += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: &[i64]) -> C64 {
        self.terms.get(k).copied().unwrap_or(Complex::new(0.0, 0.0))
    }

    /// `max_k max_i |k_i|` over nonzero terms.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm() > 0.0)
            .flat_map(|(k, _)| k.iter().map(|e| e.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    pub fn map_coeffs(&self, f: impl Fn(&[i64], C64) -> C64) -> Self {
        Self {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), f(k, *c)))
                .collect(),
        }
    }

    /// `gamma_t`: `c_k -> exp(2 pi i k.t) c_k`.
    pub fn gauge(&self, t: &[f64]) -> Self {
        self.map_coeffs(|k, c| {
            let phase: f64 = k.iter().zip(t).map(|(&e, &ti)| e as f64 * ti).sum();
            c * Complex::from_polar(1.0, std::f64::consts::TAU * phase)
        })
    }

    /// Cesàro mean via the Fejér multiplier.
    pub fn cesaro(&self, n: usize) -> Self {
        self.map_coeffs(|k, c| c * k.iter().map(|&e| fejer_multiplier(n, e)).product::<f64>())
    }

    /// Average of the partial sums `s_{(n_1..n_d)}` over `0 <= n_i <= n`.
    pub fn cesaro_by_partial_sums(&self, n: usize) -> Self {
        let d = self.d;
        let count = (n + 1).pow(d as u32);
        let mut out = Self::zero(d);
        for idx in 0..count {
            let mut caps = vec![0usize; d];
            let mut rest = idx;
            for c in caps.iter_mut() {
                *c = rest % (n + 1);
                rest /= n + 1;
            }
            for (k, c) in &self.terms {
                if k.iter()
                    .zip(&caps)
                    .all(|(&e, &cap)| e.unsigned_abs() as usize <= cap)
                {
                    out.add_term(k.clone(), *c / count as f64);
                }
            }
        }
        out
    }

    /// Gaussian coefficients on all multi-indices with `|k_i| <= degree`,
    /// damped by `1 / (1 + |k|^2)`.
    pub fn random(d: usize, degree: usize, rng: &mut ChaCha8Rng) -> Self {
        let side = 2 * degree + 1;
        let mut p = Self::zero(d);
        for idx in 0..side.pow(d as u32) {
            let mut k = vec![0i64; d];
            let mut rest = idx;
            for e in k.iter_mut() {
                *e = (rest % side) as i64 - degree as i64;
                rest /= side;
            }
            let w = 1.0 / (1.0 + k.iter().map(|e| (e * e) as f64).sum::<f64>());
            let c = Complex::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            ) * w;
            p.add_term(k, c);
        }
        p
    }
}
