use std::f64::consts::PI;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::*;
use crate::matrix::CMatrix;

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&g + &g.adjoint()).scale_real(0.5)
}

fn to_complex(f: &[f64]) -> Vec<crate::C64> {
    f.iter().map(|v| Complex::new(*v, 0.0)).collect()
}

#[test]
fn gauss_legendre_rule() {
    let (x, w) = gauss_legendre(5);
    assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    // the 5-point rule is exact through degree 9
    let m8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
    assert!((m8 - 2.0 / 9.0).abs() < 1e-14);
    let largest = x.iter().cloned().fold(f64::MIN, f64::max);
    let expected = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    assert!((largest - expected).abs() < 1e-14);
}

#[test]
fn grid_weights_and_harmonics() {
    let g = SphereGrid::default();
    assert_eq!(g.len(), 24 * 48);
    assert!((g.integrate(&vec![1.0; g.len()]) - 1.0).abs() < 1e-14);
    let l = 16;
    let ys: Vec<Vec<f64>> = (0..g.len())
        .map(|i| real_harmonics(l, g.cartesian(i)))
        .collect();
    let nh = (l + 1) * (l + 1);
    let mut worst: f64 = 0.0;
    for a in 0..nh {
        for b in 0..nh {
            let ip: f64 = (0..g.len())
                .map(|i| 4.0 * PI * g.weights[i] * ys[i][a] * ys[i][b])
                .sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((ip - target).abs());
        }
    }
    assert!(worst < 1e-10, "orthonormality defect {worst}");
    for k in 1..9 {
        let f: Vec<f64> = ys.iter().map(|y| y[k]).collect();
        assert!(g.integrate(&f).abs() < 1e-8);
    }
    // Y_10 = sqrt(3 / 4 pi) cos(theta)
    let y = real_harmonics(1, [0.6, 0.0, 0.8]);
    assert!((y[2] - (3.0 / (4.0 * PI)).sqrt() * 0.8).abs() < 1e-14);
}

#[test]
fn spin_algebra() {
    for two_j in 1..=16 {
        let r = SpinRep::new(two_j).unwrap();
        assert!(r.commutation_defect() < 1e-9, "2j = {two_j}");
        assert!(r.casimir_defect() < 1e-9, "2j = {two_j}");
    }
    assert!(SpinRep::new(0).is_err());
    assert!(SpinRep::from_j(0.75).is_err());
    assert_eq!(SpinRep::from_j(2.5).unwrap().dim(), 6);
}

#[test]
fn coherent_states_and_projection() {
    let r = SpinRep::new(5).unwrap();
    let p = CoherentProjection::new(&r);
    assert!(p.defect() < 1e-10);
    assert!(p.z_stabilizer_defect(&r, 0.7).unwrap() < 1e-10);

    // <psi, J psi> = j n(theta, phi)
    let (t, ph) = (1.1, -0.4);
    let psi = r.coherent_state(t, ph);
    let n = [t.sin() * ph.cos(), t.sin() * ph.sin(), t.cos()];
    for (op, ni) in [r.jx(), r.jy(), r.jz()].iter().zip(n) {
        assert!((op.quadratic_form(&psi).re - r.j() * ni).abs() < 1e-12);
    }
    let e = r.euler(ph, t, 0.0);
    let col: Vec<_> = (0..r.dim()).map(|a| e[(a, 0)]).collect();
    for (a, b) in col.iter().zip(&psi) {
        assert!((a - b).norm() < 1e-12);
    }

    // U_R psi_x is the coherent state at R x up to phase
    let rot = Rotation::new([0.3, -1.0, 0.5], 0.9).unwrap();
    let u = r.rotation(&rot).unwrap();
    let moved = u.mul_vec(&psi);
    let y = rot.apply(n);
    let target = r.coherent_state(y[2].acos(), y[1].atan2(y[0]));
    let overlap: crate::C64 = target.iter().zip(&moved).map(|(a, b)| a.conj() * b).sum();
    assert!((overlap.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn symbols() {
    let g = SphereGrid::default();
    let half = SpinRep::new(1).unwrap();
    let s = covariant_symbol(half.jz(), &half, &g).unwrap();
    for (v, (t, _)) in s.iter().zip(&g.points) {
        assert!((v.re - 0.5 * t.cos()).abs() < 1e-9 && v.im.abs() < 1e-12);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for two_j in [1, 4, 9, 16] {
        let r = SpinRep::new(two_j).unwrap();
        let frame = CoherentFrame::new(&r, &g);
        let n = r.dim();
        let one = frame.covariant(&CMatrix::identity(n)).unwrap();
        assert!(one
            .iter()
            .all(|v| (v - Complex::new(1.0, 0.0)).norm() < 1e-12));
        let h = random_hermitian(n, &mut rng);
        let psd = &h * &h;
        assert!(frame
            .covariant(&psd)
            .unwrap()
            .iter()
            .all(|v| v.re >= -1e-10));

        let unit = frame.contravariant_real(&vec![1.0; g.len()]).unwrap();
        assert!((&unit - &CMatrix::identity(n)).max_abs() < 1e-6);
        let pos: Vec<f64> = (0..g.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        assert!(
            frame
                .contravariant_real(&pos)
                .unwrap()
                .min_eigenvalue()
                .unwrap()
                >= -1e-10
        );

        // normalized trace(T sigma_breve_f) = sum_i w_i f_i sigma_T(x_i)
        let t = CMatrix::from_fn(n, n, |_, _| {
            Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let f: Vec<crate::C64> = (0..g.len())
            .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let lhs = (&t * &frame.contravariant(&f).unwrap()).trace() / n as f64;
        let st = frame.covariant(&t).unwrap();
        let rhs: crate::C64 = (0..g.len()).map(|i| f[i] * st[i] * g.weights[i]).sum();
        assert!((lhs - rhs).norm() < 1e-8);

        assert!(frame.residual(&CMatrix::identity(n)).unwrap() < 1e-6);
        let jz = r.jz().scale_real(1.0 / r.j());
        let res = berezin_residual(&jz, &r, &g).unwrap();
        assert!(
            (res - 1.0 / (r.j() + 1.0)).abs() < 1e-9,
            "2j = {two_j}: {res}"
        );
    }
}

#[test]
fn polynomial_residuals_mostly_decrease() {
    let g = SphereGrid::default();
    let res: Vec<f64> = (1..=16)
        .map(|tj| {
            let r = SpinRep::new(tj).unwrap();
            CoherentFrame::new(&r, &g)
                .residual(&sample_polynomial(&r).unwrap())
                .unwrap()
        })
        .collect();
    let down = res.windows(2).filter(|w| w[1] < w[0]).count();
    assert!(down * 2 > res.len() - 1, "{res:?}");
}

#[test]
fn lip_norms_and_covariance() {
    let g = SphereGrid::default();
    let rots = default_rotations(4, 3);
    let r = SpinRep::new(6).unwrap();
    let lips = sphere_lip_norms(&r, &g, &rots, &SphereLipOptions::default()).unwrap();
    let frame = CoherentFrame::new(&r, &g);
    assert!(lips.a.eval(&vec![2.5; g.len()]) < 1e-9);
    assert!(
        lips.b
            .eval(&CMatrix::identity(r.dim()).scale_real(3.0))
            .unwrap()
            .value
            < 1e-9
    );
    assert!(lips.b.eval(r.jz()).unwrap().value > 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let t = random_hermitian(r.dim(), &mut rng);
        let s = frame.covariant_real(&t).unwrap();
        // sigma_{U T U*} = sigma_T o R^{-1}
        for (k, rot) in rots.iter().enumerate().step_by(5) {
            let u = r.rotation(rot).unwrap();
            let moved = frame.covariant_real(&t.conjugate_by(&u)).unwrap();
            let rotated = lips.a.rotate(k, &s);
            let err = moved
                .iter()
                .zip(&rotated)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "covariance defect {err}");
        }
        assert!(lips.a.eval(&s) <= lips.b.eval(&t).unwrap().value + 1e-9);
        assert!((lips.a.eval_complex(&to_complex(&s)) - lips.a.eval(&s)).abs() < 1e-12);
    }

    assert!(sphere_lip_norms(
        &r,
        &g,
        &[Rotation::new([1.0, 0.0, 0.0], 0.0).unwrap()],
        &Default::default()
    )
    .is_err());
    let small = SphereLipOptions {
        l_max: 4,
        ..Default::default()
    };
    assert!(sphere_lip_norms(&r, &g, &rots, &small).is_err());
}

#[test]
fn matrix_level_bound_through_ucp_maps() {
    let g = SphereGrid::default();
    let r = SpinRep::new(3).unwrap();
    let frame = CoherentFrame::new(&r, &g);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=2 {
        // phi(f) = sum_i f_i Q_i with Q_i >= 0 summing to I
        let raw: Vec<CMatrix> = (0..g.len())
            .map(|i| {
                let h = random_hermitian(n, &mut rng);
                (&h * &h).scale_real(g.weights[i])
            })
            .collect();
        let mut total = CMatrix::zeros(n, n);
        for q in &raw {
            total += q;
        }
        let inv_sqrt = total.hermitian_map(|x| 1.0 / x.sqrt()).unwrap();
        let qs: Vec<CMatrix> = raw.iter().map(|q| &(&inv_sqrt * q) * &inv_sqrt).collect();
        let phi = |f: &[f64]| -> CMatrix {
            let mut out = CMatrix::zeros(n, n);
            for (q, v) in qs.iter().zip(f) {
                out.axpy_real(*v, q);
            }
            out
        };
        for _ in 0..5 {
            let t = random_hermitian(r.dim(), &mut rng);
            let f: Vec<f64> = frame
                .covariant_real(&t)
                .unwrap()
                .iter()
                .map(|v| v + 0.1 * rng.random_range(-1.0..1.0))
                .collect();
            let st = frame.covariant_real(&t).unwrap();
            let lhs = (&phi(&f) - &phi(&st)).operator_norm().unwrap();
            let sup = f
                .iter()
                .zip(&st)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(lhs <= sup + 1e-9);
        }
    }
}

#[test]
fn gamma_estimate_trend() {
    let opts = SweepOptions {
        two_js: vec![1, 16],
        gamma: GammaOptions {
            samples: 6,
            ..Default::default()
        },
        random_rotations: 2,
        ..Default::default()
    };
    let rows = berezin_sweep(&opts).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(
        rows[1].gamma.value < rows[0].gamma.value,
        "{} vs {}",
        rows[1].gamma.value,
        rows[0].gamma.value
    );
    assert!(rows[1].jz_residual * 2.0 < rows[0].jz_residual);
    for row in &rows {
        assert!(row.unit_defect < 1e-6);
        assert!((row.distance_upper - row.gamma.value - row.max_residual).abs() < 1e-12);
        let b_to_a = row.gamma.params["operators_to_functions"].as_f64().unwrap();
        assert!(b_to_a == 0.0, "symbols of Lip-1 operators are Lip-1");
    }
}
