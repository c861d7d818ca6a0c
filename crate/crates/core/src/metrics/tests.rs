use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::lipnorms::{Bridge, LipNorm};
use crate::matrix::CMatrix;
use crate::opsys::{random_ucp, CpMap, OperatorSystem};

fn scalar(v: f64) -> CMatrix {
    CMatrix::from_fn(1, 1, |_, _| Complex::new(v, 0.0))
}

fn two_point(d: f64) -> LipNorm {
    let sys = OperatorSystem::diagonal(2);
    LipNorm::functional(&sys, vec![vec![scalar(0.0), scalar(1.0 / d)]]).unwrap()
}

/// `f -> f_1 A + f_2 (1 - A)` on the two-point system.
fn two_point_map(a: &CMatrix) -> CpMap {
    let sys = OperatorSystem::diagonal(2);
    let n = a.rows();
    CpMap::from_basis_images(&sys, n, vec![CMatrix::identity(n), a.clone()]).unwrap()
}

fn random_effect(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let h = &g * &g.adjoint();
    h.scale_real(1.0 / (h.operator_norm().unwrap() + 1e-3))
}

#[test]
fn rho_vanishes_on_equal_maps() {
    let l = two_point(1.0);
    let phi = random_ucp(l.system(), 2, 4);
    let r = rho_ln(&l, &phi, &phi).unwrap();
    assert_eq!(r.value, 0.0);
    assert_eq!(r.kind, EstimateKind::Exact);
}

#[test]
fn rho_search_matches_two_point_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d = 1.5;
    let l = two_point(d);
    let opts = RhoOptions {
        oracle: false,
        ..RhoOptions::default()
    };
    for n in 1..=3 {
        for _ in 0..3 {
            let a = random_effect(n, &mut rng);
            let b = random_effect(n, &mut rng);
            let want = d * (&a - &b).operator_norm().unwrap();
            let got = rho_ln_with(&l, &two_point_map(&a), &two_point_map(&b), &opts).unwrap();
            assert!(
                (got.value - want).abs() < 1e-6,
                "n={n}: {} vs {want}",
                got.value
            );
            let oracle = rho_ln(&l, &two_point_map(&a), &two_point_map(&b)).unwrap();
            assert_eq!(oracle.kind, EstimateKind::Exact);
            assert!((oracle.value - want).abs() < 1e-12);
        }
    }
}

#[test]
fn rho_on_states() {
    let l = two_point(2.0);
    let (t, s) = (0.8, 0.3);
    let st = |w: f64| two_point_map(&scalar(w));
    let opts = RhoOptions {
        oracle: false,
        ..RhoOptions::default()
    };
    let r = rho_ln_with(&l, &st(t), &st(s), &opts).unwrap();
    assert!((r.value - 1.0).abs() < 1e-7);
}

#[test]
fn rho_witness_reevaluates() {
    let sys = OperatorSystem::full(2);
    let half = CMatrix::identity(2).scale_real(0.5);
    let l = LipNorm::functional(
        &sys,
        vec![vec![
            CMatrix::zeros(2, 2),
            &CMatrix::unit(2, 0, 0) - &half,
            CMatrix::unit(2, 0, 1),
            CMatrix::unit(2, 1, 0),
        ]],
    )
    .unwrap();
    let phi = random_ucp(&sys, 2, 10);
    let psi = random_ucp(&sys, 2, 11);
    let r = rho_ln(&l, &phi, &psi).unwrap();
    let x = r.element().unwrap();
    assert!(l.eval(x).unwrap().upper <= 1.0 + 1e-9);
    let v = (&phi.apply(&sys, x).unwrap() - &psi.apply(&sys, x).unwrap())
        .operator_norm()
        .unwrap();
    assert!(v >= r.value - 1e-9);
    // symmetric
    let back = rho_ln(&l, &psi, &phi).unwrap();
    assert!((back.value - r.value).abs() < 1e-6);
}

#[test]
fn two_point_diameter_all_levels() {
    let l = two_point(2.0);
    let reps = diameter_levels(&l, &[1, 2, 3], &DiameterOptions::default()).unwrap();
    for r in &reps {
        assert!(
            (r.lower.value - 2.0).abs() < 0.05,
            "n={} {}",
            r.n,
            r.lower.value
        );
    }
    let cu = reps[0].certified_upper.as_ref().unwrap().value;
    assert!(cu >= 2.0 - 1e-9);
}

#[test]
fn one_point_and_scaled_diameter() {
    let p = LipNorm::one_point();
    assert_eq!(
        diameter(&p, 1, &DiameterOptions::default())
            .unwrap()
            .lower
            .value,
        0.0
    );
    let l = two_point(1.0);
    let s = LipNorm::scaled(l.clone(), 4.0).unwrap();
    let a = diameter(&l, 1, &DiameterOptions::default())
        .unwrap()
        .lower
        .value;
    let b = diameter(&s, 1, &DiameterOptions::default())
        .unwrap()
        .lower
        .value;
    assert!((a / 4.0 - b).abs() < 1e-7);
}

#[test]
fn named_bridge_bounds() {
    let x = OperatorSystem::diagonal(2);
    assert!(
        (make_norm_bridge(0.1, &x, &x)
            .unwrap()
            .analytic_bound()
            .unwrap()
            - 0.1)
            .abs()
            < 1e-15
    );
    assert!(
        (make_scaling_bridge(4.0, 1.0, &x)
            .unwrap()
            .analytic_bound()
            .unwrap()
            - 0.25)
            .abs()
            < 1e-15
    );
    let phi = CpMap::from_basis_images(&x, 2, x.basis().to_vec()).unwrap();
    let q = make_quotient_bridge(0.01, 0.05, &phi, &x).unwrap();
    assert!((q.analytic_bound().unwrap() - 0.06).abs() < 1e-15);
    assert!(make_norm_bridge(0.0, &x, &x).is_err());
    assert!(make_scaling_bridge(-1.0, 1.0, &x).is_err());
}

#[test]
fn bridge_validation() {
    let lx = two_point(1.0);
    let sys = lx.system().clone();
    let nb = make_norm_bridge(0.2, &sys, &sys).unwrap();
    let rep = validate_bridge(&nb, &lx, &lx, &[1e-6], 8, 0).unwrap();
    assert!(rep.passed, "{rep:?}");

    // scaling bridge to the one-point system with C = diam
    let p = LipNorm::one_point();
    let sb = make_scaling_bridge(3.0, 1.0, &sys).unwrap();
    let l3 = LipNorm::scaled(lx.clone(), 3.0).unwrap();
    let rep = validate_bridge(&sb, &l3, &p, &[1e-6], 8, 0).unwrap();
    assert!(rep.passed, "{rep:?}");

    // N = 0 breaks condition (i)
    let zero = CpMap::from_herm_images(&sys, 1, vec![scalar(0.0), scalar(0.0)]).unwrap();
    let gb = Bridge::general(1.0, &zero, &zero).unwrap();
    let rep = validate_bridge(&gb, &lx, &lx, &[1e-6], 4, 0).unwrap();
    assert!(!rep.condition_i && !rep.passed);
}

#[test]
fn quotient_bridge_passes() {
    let full = OperatorSystem::full(2);
    let half = CMatrix::identity(2).scale_real(0.5);
    let lx = LipNorm::functional(
        &full,
        vec![vec![
            CMatrix::zeros(2, 2),
            &CMatrix::unit(2, 0, 0) - &half,
            CMatrix::unit(2, 0, 1),
            CMatrix::unit(2, 1, 0),
        ]],
    )
    .unwrap();
    let diag = OperatorSystem::diagonal(2);
    let images: Vec<CMatrix> = full
        .basis()
        .iter()
        .map(|b| CMatrix::diag(&[b[(0, 0)], b[(1, 1)]]))
        .collect();
    let phi = CpMap::from_basis_images(&full, 2, images).unwrap();
    let ly = LipNorm::quotient(lx.clone(), phi.clone(), &diag).unwrap();
    let b = make_quotient_bridge(0.1, 0.0, &phi, &diag).unwrap();
    let rep = validate_bridge(&b, &lx, &ly, &[1e-6], 6, 2).unwrap();
    assert!(rep.passed, "{rep:?}");
}

#[test]
fn hausdorff_norm_bridge_small() {
    let lx = two_point(1.0);
    let sys = lx.system().clone();
    let eps = 0.2;
    let la = AdmissibleLip::new(
        lx.clone(),
        lx.clone(),
        make_norm_bridge(eps, &sys, &sys).unwrap(),
        0,
    )
    .unwrap();
    assert!(la.induced_defect < 1e-6);
    let opts = HausdorffOptions {
        net: 2,
        ..HausdorffOptions::default()
    };
    let h = hausdorff_ucp(&la, 1, &opts).unwrap();
    assert!(h.value <= eps + 1e-6, "{}", h.value);
    let h2 = hausdorff_ucp(&la, 2, &opts).unwrap();
    assert!(h2.value <= eps + 1e-6, "{}", h2.value);
}

#[test]
fn matching_to_one_point_is_unique() {
    let lx = two_point(1.0);
    let sys = lx.system().clone();
    let diam = diameter(&lx, 1, &DiameterOptions::default())
        .unwrap()
        .lower
        .value;
    let la = AdmissibleLip::new(
        LipNorm::scaled(lx, 4.0).unwrap(),
        LipNorm::one_point(),
        make_scaling_bridge(4.0, diam, &sys).unwrap(),
        0,
    )
    .unwrap();
    let phi = random_ucp(&sys, 2, 3);
    let m = match_ucp(&la, &phi, Side::X, &HausdorffOptions::default()).unwrap();
    assert_eq!(m.map.n(), 2);
    assert!(m.estimate.value <= diam / 4.0 + 1e-6);
}

#[test]
fn diambound_two_point() {
    let lx = two_point(1.0);
    let sys = lx.system().clone();
    let eps = 0.1;
    let la = AdmissibleLip::new(
        lx.clone(),
        lx,
        make_norm_bridge(eps, &sys, &sys).unwrap(),
        0,
    )
    .unwrap();
    let x = CMatrix::diag_real(&[0.4, 0.1]);
    let rep = check_diambound(&la, 1, &x, 1.0, eps, &DiamboundOptions::default()).unwrap();
    assert!(rep.conclusive && rep.passed, "{rep:?}");
    assert!(rep.positivity_ok == Some(true));
    let x2 = CMatrix::from_fn(4, 4, |a, b| {
        if a == b {
            Complex::new(0.1 * a as f64, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let rep = check_diambound(&la, 2, &x2, 1.0, eps, &DiamboundOptions::default()).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert!(check_diambound(&la, 1, &x, 0.1, eps, &DiamboundOptions::default()).is_err());
}
