use cqms::lipnorms::LipNorm;
use cqms::metrics::{
    diameter, dist_upper, make_norm_bridge, make_scaling_bridge, DiameterOptions, HausdorffOptions,
};
use cqms::opsys::OperatorSystem;
use cqms::{CMatrix, Complex};

fn two_point(d: f64) -> LipNorm {
    let s = |v: f64| CMatrix::from_fn(1, 1, |_, _| Complex::new(v, 0.0));
    LipNorm::functional(&OperatorSystem::diagonal(2), vec![vec![s(0.0), s(1.0 / d)]]).unwrap()
}

fn upper(lx: &LipNorm, ly: &LipNorm, b: &cqms::lipnorms::Bridge) -> f64 {
    let d = dist_upper(lx, ly, b, 1, &HausdorffOptions::default()).unwrap();
    assert!(d.validation.passed, "{:?}", d.validation);
    d.estimate.unwrap().value
}

#[test]
fn triangle_audit_for_composed_norm_bridges() {
    let (x, y, z) = (two_point(1.0), two_point(1.1), two_point(1.25));
    let sys = x.system().clone();
    let (e1, e2) = (0.15, 0.3);
    let xy = upper(&x, &y, &make_norm_bridge(e1, &sys, &sys).unwrap());
    let yz = upper(&y, &z, &make_norm_bridge(e2, &sys, &sys).unwrap());
    let xz = upper(&x, &z, &make_norm_bridge(e1 + e2, &sys, &sys).unwrap());
    assert!(xz <= xy + yz + 1e-12);
}

#[test]
fn scaling_family_matches_c_over_lambda() {
    let l = two_point(1.0);
    let c = diameter(&l, 1, &DiameterOptions::default())
        .unwrap()
        .lower
        .value;
    assert!((c - 1.0).abs() < 1e-9);
    let sys = l.system().clone();
    for (lambda, want) in [(1.0, 1.0), (2.0, 0.5), (4.0, 0.25), (8.0, 0.125)] {
        let b = make_scaling_bridge(lambda, 1.0, &sys).unwrap();
        let got = upper(
            &LipNorm::scaled(l.clone(), lambda).unwrap(),
            &LipNorm::one_point(),
            &b,
        );
        assert_eq!(got, want);
    }
}

#[test]
// the lift needs ||x - mu 1|| <= C / lambda, so C must reach half the diameter
fn scaling_bridge_below_the_radius_is_rejected() {
    let l = two_point(1.0);
    let b = make_scaling_bridge(4.0, 0.4, l.system()).unwrap();
    let d = dist_upper(
        &LipNorm::scaled(l, 4.0).unwrap(),
        &LipNorm::one_point(),
        &b,
        1,
        &HausdorffOptions::default(),
    )
    .unwrap();
    assert!(!d.validation.passed);
    assert!(d.estimate.is_none());
}
