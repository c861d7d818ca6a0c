use super::*;
use crate::opsys::compression;

fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

fn scalar(v: f64) -> CMatrix {
    CMatrix::from_fn(1, 1, |_, _| c(v))
}

/// `T(x) = (x_00 - x_11) / d` on the two-point system.
fn two_point_lip(d: f64) -> LipNorm {
    let sys = OperatorSystem::diagonal(2);
    LipNorm::functional(&sys, vec![vec![scalar(0.0), scalar(1.0 / d)]]).unwrap()
}

/// `x -> x - tr(x)/2` on `M_2`.
fn centered_m2() -> LipNorm {
    let sys = OperatorSystem::full(2);
    let half = CMatrix::identity(2).scale_real(0.5);
    let images = vec![
        CMatrix::zeros(2, 2),
        &CMatrix::unit(2, 0, 0) - &half,
        CMatrix::unit(2, 0, 1),
        CMatrix::unit(2, 1, 0),
    ];
    LipNorm::functional(&sys, vec![images]).unwrap()
}

fn corner_lip(eps: f64) -> LipNorm {
    let sys = OperatorSystem::full(2);
    let maps = vec![
        vec![scalar(0.0), scalar(1.0), scalar(0.0), scalar(0.0)],
        vec![scalar(0.0), scalar(0.0), scalar(eps), scalar(0.0)],
        vec![scalar(0.0), scalar(0.0), scalar(0.0), scalar(eps)],
    ];
    LipNorm::functional(&sys, maps).unwrap()
}

#[test]
fn vanishes_on_scalars() {
    let l = two_point_lip(0.5);
    assert_eq!(l.eval(&CMatrix::identity(2)).unwrap().value, 0.0);
    assert_eq!(
        l.eval(&CMatrix::identity(2).scale(Complex::new(0.0, 3.0)))
            .unwrap()
            .value,
        0.0
    );
    assert!(l.eval_raw(&[1.0, 0.0]).unwrap() < 1e-14);
}

#[test]
fn two_point_value() {
    for d in [0.25, 1.0, 3.0] {
        let v = two_point_lip(d)
            .eval(&CMatrix::diag_real(&[1.0, 0.0]))
            .unwrap();
        assert_eq!(v.kind, ValueKind::Exact);
        assert!((v.value - 1.0 / d).abs() < 1e-14);
    }
}

#[test]
fn clock_conjugation_closed_form() {
    let q = 5;
    let sys = OperatorSystem::full(q);
    let t: f64 = 0.3;
    let u = CMatrix::diag(
        &(0..q)
            .map(|j| Complex::from_polar(1.0, std::f64::consts::TAU * t * j as f64))
            .collect::<Vec<_>>(),
    );
    let len = 0.7;
    let l = LipNorm::action(&sys, vec![Action::conjugation(&sys, &u, len).unwrap()]).unwrap();
    // cyclic shift
    let s = CMatrix::from_fn(q, q, |a, b| if (a + 1) % q == b { c(1.0) } else { c(0.0) });
    let v = l.eval(&s).unwrap().value;
    let want = (Complex::from_polar(1.0, std::f64::consts::TAU * t) - 1.0).norm() / len;
    assert!((v - want).abs() < 1e-12, "{v} vs {want}");
    assert!(l.eval(&u).unwrap().value < 1e-12);
}

#[test]
fn quotient_closed_form_and_lip_decreasing() {
    let parent = centered_m2();
    let full = parent.system().clone();
    let diag = OperatorSystem::diagonal(2);
    let images: Vec<CMatrix> = full
        .basis()
        .iter()
        .map(|b| CMatrix::diag(&[b[(0, 0)], b[(1, 1)]]))
        .collect();
    let phi = CpMap::from_basis_images(&full, 2, images).unwrap();
    let quot = LipNorm::quotient(parent.clone(), phi.clone(), &diag).unwrap();
    let v = quot.eval(&CMatrix::diag_real(&[2.0, -1.0])).unwrap();
    assert!((v.value - 1.5).abs() < 1e-6);
    assert!(v.lower <= 1.5 + 1e-9 && v.upper >= 1.5 - 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let x = CMatrix::from_fn(2, 2, |_, _| Complex::new(rng.random_range(-1.0..1.0), 0.0));
        let x = &x + &x.adjoint();
        let lx = parent.eval(&x).unwrap().value;
        let ly = quot.eval(&phi.apply(&full, &x).unwrap()).unwrap();
        assert!(ly.lower <= lx + 1e-9);
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn scaled_doubles() {
    let l = centered_m2();
    let s = LipNorm::scaled(l.clone(), 2.0).unwrap();
    let x = CMatrix::from_fn(2, 2, |a, b| {
        Complex::new((a + 2 * b) as f64, a as f64 - b as f64)
    });
    let a = l.eval(&x).unwrap().value;
    let b = s.eval(&x).unwrap().value;
    assert!((b - 2.0 * a).abs() < 1e-12);
}

#[test]
fn direct_sum_induces_summands() {
    let lx = two_point_lip(1.0);
    let ly = two_point_lip(1.0);
    let sx = lx.system().clone();
    let bridge = Bridge::norm(0.5, &sx, ly.system()).unwrap();
    let sum = LipNorm::direct_sum(lx.clone(), ly, bridge).unwrap();
    assert!(validate_lipnorm(&sum, 1).unwrap().passed);
    let v = CMatrix::from_fn(4, 2, |a, b| if a == b { c(1.0) } else { c(0.0) });
    let pr = compression(sum.system(), &v).unwrap().into_inner();
    let induced = LipNorm::quotient(sum, pr, &sx).unwrap();
    for x in [[1.0, 0.0], [0.3, -2.0], [4.0, 1.0]] {
        let m = CMatrix::diag_real(&x);
        let want = lx.eval(&m).unwrap().value;
        let got = induced.eval(&m).unwrap();
        assert!((got.value - want).abs() < 1e-6, "{} vs {want}", got.value);
    }
}

#[test]
fn extended_seminorm_collapses() {
    let l = centered_m2();
    let h = CMatrix::from_fn(2, 2, |a, b| Complex::new(1.0 + (a * b) as f64, 0.0));
    let h = &h + &h.adjoint();
    let lh = l.eval(&h).unwrap().value;
    let e = eval_lip_e(&l, &h).unwrap();
    assert_eq!(e.kind, ValueKind::Exact);
    assert!((e.value - lh).abs() < 1e-12);
    let ih = h.scale(Complex::new(0.0, 1.0));
    assert!((eval_lip_e(&l, &ih).unwrap().value - lh).abs() < 1e-12);
}

#[test]
fn extended_seminorm_bracket() {
    let l = centered_m2();
    let x = CMatrix::unit(2, 0, 1);
    let e = eval_lip_e(&l, &x).unwrap();
    // Re and Im parts have value 1/2 each; the bracket contains the truth
    assert!(e.lower <= e.value && e.value <= e.upper);
    assert!(e.lower >= 0.5 - 1e-12 && e.upper <= 1.0 + 1e-12);
    assert!(e.upper - e.lower < 0.1);
}

#[test]
fn matrix_level_takes_block_max() {
    let l = two_point_lip(1.0);
    let sys = l.system().clone();
    let blocks = vec![
        CMatrix::diag_real(&[1.0, 0.0]),
        CMatrix::zeros(2, 2),
        CMatrix::zeros(2, 2),
        CMatrix::diag_real(&[3.0, 0.0]),
    ];
    let x = sys.assemble(2, &blocks);
    let v = eval_lip_n(&l, 2, &x).unwrap();
    assert!((v.value - 3.0).abs() < 1e-12);
}

#[test]
fn zero_map_fails_validation() {
    let sys = OperatorSystem::diagonal(2);
    let l = LipNorm::functional(&sys, vec![vec![scalar(0.0), scalar(0.0)]]).unwrap();
    let r = validate_lipnorm(&l, 0).unwrap();
    assert!(!r.passed);
    assert!(!r.kernel_ok);
    assert_eq!(r.kernel_dim, 2);
}

#[test]
fn good_norms_validate() {
    assert!(validate_lipnorm(&two_point_lip(2.0), 0).unwrap().passed);
    assert!(validate_lipnorm(&centered_m2(), 0).unwrap().passed);
    assert!(validate_lipnorm(&corner_lip(0.1), 0).unwrap().passed);
}

#[test]
fn leibniz_counterexample_found() {
    let bad = corner_lip(0.1);
    let r = check_f_leibniz(&bad, &leibniz_f, 40, 1e-8, 5).unwrap();
    assert!(r.violations > 0);
    assert!(r.max_excess > 0.5);

    let sys = OperatorSystem::full(2);
    let u = CMatrix::diag_real(&[1.0, -1.0]);
    let good = LipNorm::action(&sys, vec![Action::conjugation(&sys, &u, 1.0).unwrap()]).unwrap();
    let r = check_f_leibniz(&good, &leibniz_f, 60, 1e-8, 5).unwrap();
    assert!(r.holds, "{r:?}");
}

#[test]
fn spec_round_trip() {
    let lx = two_point_lip(1.0);
    let ly = two_point_lip(2.0);
    let b = Bridge::norm(0.5, lx.system(), ly.system()).unwrap();
    let sum = LipNorm::direct_sum(lx, ly, b).unwrap();
    let json = serde_json::to_string(&sum.to_spec()).unwrap();
    let spec: LipSpec = serde_json::from_str(&json).unwrap();
    let back = LipNorm::from_spec(sum.system(), &spec).unwrap();
    let x = sum.system().from_herm_coords(&[0.2, -1.0, 0.7, 1.3]);
    let a = sum.eval(&x).unwrap().value;
    let b = back.eval(&x).unwrap().value;
    assert!((a - b).abs() < 1e-9);

    let l = centered_m2();
    let spec = l.to_spec();
    let back = LipNorm::from_spec(l.system(), &spec).unwrap();
    let x = CMatrix::unit(2, 1, 0);
    assert!((l.eval(&x).unwrap().value - back.eval(&x).unwrap().value).abs() < 1e-12);
}
