use cqms::berezin::{covariant_symbol, SphereGrid, SpinRep};
use cqms::lipnorms::LipNorm;
use cqms::metrics::rho_ln;
use cqms::nctorus::{
    fejer_kernel, fejer_kernel_sum, torus_lip, FourierPolynomial, TorusLipOptions, TorusParams,
    TorusSpec,
};
use cqms::opsys::{random_ucp, state_of_ucp, ucp_of_state, OperatorSystem};
use cqms::{CMatrix, Complex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar(v: f64) -> CMatrix {
    CMatrix::from_fn(1, 1, |_, _| Complex::new(v, 0.0))
}

fn centered_m2() -> LipNorm {
    let sys = OperatorSystem::full(2);
    let half = CMatrix::identity(2).scale_real(0.5);
    LipNorm::functional(
        &sys,
        vec![vec![
            CMatrix::zeros(2, 2),
            &CMatrix::unit(2, 0, 0) - &half,
            CMatrix::unit(2, 0, 1),
            CMatrix::unit(2, 1, 0),
        ]],
    )
    .unwrap()
}

fn lip_norms() -> Vec<LipNorm> {
    let tp = LipNorm::functional(
        &OperatorSystem::diagonal(2),
        vec![vec![scalar(0.0), scalar(0.5)]],
    )
    .unwrap();
    let spec = TorusSpec::new(TorusParams::two(3, 1)).unwrap();
    vec![
        tp,
        centered_m2(),
        torus_lip(&spec, &TorusLipOptions::default()).unwrap(),
    ]
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), rows * cols).prop_map(move |v| {
        CMatrix::new(
            rows,
            cols,
            v.into_iter().map(|(a, b)| Complex::new(a, b)).collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matrix_json_round_trip(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        let s = serde_json::to_string(&m).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(v["rows"].as_u64(), Some(m.rows() as u64));
        prop_assert_eq!(v["re"].as_array().map(|a| a.len()), Some(m.rows() * m.cols()));
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn choi_correspondence_inverts(seed in any::<u64>(), n in 1usize..4, which in 0usize..3) {
        let sys = [OperatorSystem::full(2), OperatorSystem::diagonal(3), OperatorSystem::full(3)][which].clone();
        let phi = random_ucp(&sys, n, seed);
        let back = ucp_of_state(&sys, &state_of_ucp(&phi)).unwrap();
        prop_assert!(back.max_image_difference(&phi) < 1e-12);
    }

    #[test]
    fn lip_norms_are_seminorms_vanishing_on_scalars(seed in any::<u64>(), t in -3.0..3.0f64, c in -5.0..5.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in lip_norms() {
            let sys = l.system();
            let draw = |rng: &mut ChaCha8Rng| {
                let h: Vec<f64> = (0..sys.hermitian_dim()).map(|_| rand::Rng::random_range(rng, -1.0..1.0)).collect();
                sys.from_herm_coords(&h)
            };
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let lx = l.eval(&x).unwrap().value;
            let k = x.rows();
            let shifted = &x + &CMatrix::identity(k).scale_real(c);
            prop_assert!((l.eval(&shifted).unwrap().value - lx).abs() <= 1e-9 * (1.0 + lx));
            prop_assert!((l.eval(&x.scale_real(t)).unwrap().value - t.abs() * lx).abs() <= 1e-9 * (1.0 + lx));
            let sum = l.eval(&(&x + &y)).unwrap().value;
            prop_assert!(sum <= lx + l.eval(&y).unwrap().value + 1e-9);
            prop_assert_eq!(l.eval(&CMatrix::identity(k).scale_real(c)).unwrap().value, 0.0);
        }
    }

    #[test]
    fn fejer_kernel_forms_agree(n in 0usize..40, t in 0.0..1.0f64) {
        let a = fejer_kernel(n, t);
        prop_assert!(a >= 0.0);
        prop_assert!((a - fejer_kernel_sum(n, t)).abs() < 1e-10);
    }

    #[test]
    fn cesaro_means_are_unital_contractions(seed in any::<u64>(), n in 0usize..4) {
        let spec = TorusSpec::new(TorusParams::two(8, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = FourierPolynomial::random(2, 3, &mut rng);
        let a = spec.to_matrix(&p).unwrap();
        let s = spec.to_matrix(&p.cesaro(n)).unwrap();
        prop_assert!(s.operator_norm().unwrap() <= a.operator_norm().unwrap() + 1e-9);
        let one = FourierPolynomial::monomial(vec![0, 0], Complex::new(1.0, 0.0));
        let c = spec.to_matrix(&one.cesaro(n)).unwrap();
        prop_assert!((&c - &CMatrix::identity(8)).max_abs() < 1e-12);
    }

    #[test]
    fn covariant_symbols_of_hermitian_operators_are_real_and_bounded(seed in any::<u64>(), two_j in 1usize..7) {
        let r = SpinRep::new(two_j).unwrap();
        let n = r.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(n, n, |_, _| {
            Complex::new(rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0))
        });
        let h = (&g + &g.adjoint()).scale_real(0.5);
        let bound = h.operator_norm().unwrap();
        let grid = SphereGrid::new(8, 16).unwrap();
        for v in covariant_symbol(&h, &r, &grid).unwrap() {
            prop_assert!(v.im.abs() < 1e-12);
            prop_assert!(v.re.abs() <= bound + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rho_is_a_metric_on_samples(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let l = centered_m2();
        let sys = l.system();
        let (p, q, r) = (random_ucp(sys, 2, a), random_ucp(sys, 2, b), random_ucp(sys, 2, c));
        let pq = rho_ln(&l, &p, &q).unwrap().value;
        let qp = rho_ln(&l, &q, &p).unwrap().value;
        let pr = rho_ln(&l, &p, &r).unwrap().value;
        let rq = rho_ln(&l, &r, &q).unwrap().value;
        prop_assert!((pq - qp).abs() < 1e-9);
        prop_assert!(pq <= pr + rq + 1e-9);
    }
}
