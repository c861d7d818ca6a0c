use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{input, Result};
use crate::real::RMat;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Product grid on the sphere: Gauss-Legendre in `cos(theta)` times
/// equispaced `phi`. Weights are normalized to total mass one.
#[derive(Clone, Debug, Serialize)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    /// `(theta, phi)` per point, theta-major.
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self::new(24, 48).expect("default grid sizes are valid")
    }
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return input("sphere grid needs at least one point in each direction");
        }
        let (z, w) = gauss_legendre(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (zi, wi) in z.iter().zip(&w) {
            for k in 0..n_phi {
                points.push((zi.clamp(-1.0, 1.0).acos(), TAU * k as f64 / n_phi as f64));
                weights.push(wi / (2.0 * n_phi as f64));
            }
        }
        Ok(Self {
            n_theta,
            n_phi,
            points,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cartesian(&self, i: usize) -> [f64; 3] {
        let (t, p) = self.points[i];
        [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Largest harmonic degree `l` for which products of two degree-`l`
    /// functions are integrated exactly.
    pub fn exact_degree(&self) -> usize {
        (2 * self.n_theta - 1).min(self.n_phi - 1) / 2
    }
}

/// Real orthonormal spherical harmonics up to degree `l_max` at the unit
/// vector `x`, ordered by `l` and then `m = -l..=l`. Orthonormal for the
/// area measure of total mass `4 pi`.
pub fn real_harmonics(l_max: usize, x: [f64; 3]) -> Vec<f64> {
    let z = x[2].clamp(-1.0, 1.0);
    let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let phi = x[1].atan2(x[0]);
    let size = l_max + 1;
    // normalized associated Legendre functions, p[l][m]
    let mut p = vec![vec![0.0; size]; size];
    p[0][0] = (1.0 / (4.0 * PI)).sqrt();
    for m in 1..size {
        p[m][m] = ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s * p[m - 1][m - 1];
    }
    for m in 0..size {
        if m + 1 < size {
            p[m + 1][m] = ((2 * m + 3) as f64).sqrt() * z * p[m][m];
        }
        for l in m + 2..size {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[l][m] = a * (z * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    let mut out = Vec::with_capacity(size * size);
    let r2 = std::f64::consts::SQRT_2;
    for (l, row) in p.iter().enumerate() {
        for m in -(l as i64)..=(l as i64) {
            let am = m.unsigned_abs() as usize;
            let v = match m.cmp(&0) {
                std::cmp::Ordering::Equal => row[0],
                std::cmp::Ordering::Greater => r2 * row[am] * (am as f64 * phi).cos(),
                std::cmp::Ordering::Less => r2 * row[am] * (am as f64 * phi).sin(),
            };
            out.push(v);
        }
    }
    out
}

/// Band-limited model of functions on the grid: values are identified with
/// their projection onto harmonics of degree `<= l_max`, which makes
/// rotated evaluation exact for band-limited functions.
#[derive(Clone, Debug)]
pub struct BandLimited {
    l_max: usize,
    /// `points x harmonics`.
    basis: RMat,
    weights: Vec<f64>,
}

impl BandLimited {
    pub fn new(grid: &SphereGrid, l_max: usize) -> Result<Self> {
        if l_max > grid.exact_degree() {
            return input(format!(
                "harmonic degree {l_max} exceeds what the grid integrates exactly ({})",
                grid.exact_degree()
            ));
        }
        let rows: Vec<Vec<f64>> = (0..grid.len())
            .map(|i| real_harmonics(l_max, grid.cartesian(i)))
            .collect();
        let nh = (l_max + 1).pow(2);
        Ok(Self {
            l_max,
            basis: RMat::from_fn(grid.len(), nh, |i, k| rows[i][k]),
            weights: grid.weights.clone(),
        })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn n_harmonics(&self) -> usize {
        (self.l_max + 1).pow(2)
    }

    /// Harmonic coefficients by quadrature.
    pub fn coefficients(&self, f: &[f64]) -> Vec<f64> {
        let wf: Vec<f64> = f
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| 4.0 * PI * v * w)
            .collect();
        self.basis.tmul_vec(&wf)
    }

    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        self.basis.mul_vec(c)
    }

    /// `max |f - P f|` on the grid.
    pub fn projection_residual(&self, f: &[f64]) -> f64 {
        let g = self.synthesize(&self.coefficients(f));
        f.iter()
            .zip(&g)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Matrix evaluating coefficient vectors at `R^{-1} x_i`.
    pub fn rotated_basis(&self, grid: &SphereGrid, rot: &Rotation) -> RMat {
        let rows: Vec<Vec<f64>> = (0..grid.len())
            .map(|i| real_harmonics(self.l_max, rot.apply_inverse(grid.cartesian(i))))
            .collect();
        RMat::from_fn(grid.len(), self.n_harmonics(), |i, k| rows[i][k])
    }
}

/// Rotation of `R^3` by `angle` about the unit vector `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rotation {
    pub axis: [f64; 3],
    pub angle: f64,
}

impl Rotation {
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(n > 0.0) || !n.is_finite() || !angle.is_finite() {
            return input("rotation axis must be a finite nonzero vector");
        }
        Ok(Self {
            axis: [axis[0] / n, axis[1] / n, axis[2] / n],
            angle,
        })
    }

    /// Rodrigues formula.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let [x, y, z] = self.axis;
        let (s, c) = self.angle.sin_cos();
        let t = 1.0 - c;
        [
            [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
            [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
            [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
        ]
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = self.matrix();
        [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }

    pub fn apply_inverse(&self, v: [f64; 3]) -> [f64; 3] {
        let m = self.matrix();
        [0, 1, 2].map(|i| m[0][i] * v[0] + m[1][i] * v[1] + m[2][i] * v[2])
    }

    /// Rotation angle in `[0, pi]`, the default length function.
    pub fn length(&self) -> f64 {
        let a = self.angle.rem_euclid(std::f64::consts::TAU);
        a.min(std::f64::consts::TAU - a)
    }
}
