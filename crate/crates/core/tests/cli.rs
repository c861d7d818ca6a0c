use std::path::{Path, PathBuf};

use cqms::cli::{
    exit_code, load_config, run, ResultRecord, Suite, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION,
};
use cqms::lipnorms::LipNorm;
use cqms::metrics::EstimateKind;
use cqms::opsys::OperatorSystem;
use cqms::{CMatrix, Complex, Error};
use serde_json::json;

fn write(dir: &Path, name: &str, v: &serde_json::Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn read_record(dir: &Path) -> ResultRecord {
    serde_json::from_str(&std::fs::read_to_string(dir.join("result.json")).unwrap()).unwrap()
}

#[test]
fn validate_two_point_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.json",
        &json!({"suite": "validate", "seed": 1, "systems": [{"name": "tp", "kind": "two_point"}]}),
    );
    let out = dir.path().join("out");
    let (rec, code) = run(&cfg, Suite::Validate, None, &out).unwrap();
    assert_eq!(code, 0);
    assert!(rec.passed);
    assert!(rec
        .checks
        .iter()
        .any(|c| c.name == "tp.lipnorm" && c.passed));
    assert_eq!(rec.get("tp.kernel_dim").unwrap().value, 1.0);
    assert!(out.join("runtime.json").exists());
    assert_eq!(read_record(&out).config_hash, rec.config_hash);
}

#[test]
fn failing_lipnorm_exits_with_validation_status() {
    let dir = tempfile::tempdir().unwrap();
    let sys = OperatorSystem::diagonal(2);
    let zero = CMatrix::from_fn(1, 1, |_, _| Complex::new(0.0, 0.0));
    let l = LipNorm::functional(&sys, vec![vec![zero.clone(), zero]]).unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        &json!({
            "suite": "validate",
            "seed": 0,
            "systems": [{"name": "zero", "kind": "explicit", "system": sys, "lip": l.to_spec()}]
        }),
    );
    let (rec, code) = run(&cfg, Suite::Validate, None, &dir.path().join("out")).unwrap();
    assert_eq!(code, EXIT_VALIDATION);
    assert!(!rec.passed);
}

#[test]
fn config_errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let no_seed = write(
        dir.path(),
        "a.json",
        &json!({"suite": "validate", "systems": []}),
    );
    assert_eq!(
        run(&no_seed, Suite::Validate, None, &out).unwrap_err().code,
        EXIT_CONFIG
    );

    let wrong = write(
        dir.path(),
        "b.json",
        &json!({"suite": "berezin", "seed": 1}),
    );
    assert_eq!(
        run(&wrong, Suite::Validate, None, &out).unwrap_err().code,
        EXIT_CONFIG
    );

    let empty = write(
        dir.path(),
        "c.json",
        &json!({"suite": "validate", "seed": 1, "systems": []}),
    );
    assert_eq!(
        run(&empty, Suite::Validate, None, &out).unwrap_err().code,
        EXIT_CONFIG
    );

    std::fs::write(dir.path().join("d.json"), "{not json").unwrap();
    assert_eq!(
        run(&dir.path().join("d.json"), Suite::Validate, None, &out)
            .unwrap_err()
            .code,
        EXIT_CONFIG
    );
    assert_eq!(
        run(
            &dir.path().join("missing.json"),
            Suite::Validate,
            None,
            &out
        )
        .unwrap_err()
        .code,
        EXIT_CONFIG
    );

    let missing_ref = write(
        dir.path(),
        "e.json",
        &json!({"suite": "validate", "seed": 1, "systems": [{"name": "f", "kind": "file", "path": "nope.json"}]}),
    );
    assert_eq!(
        run(&missing_ref, Suite::Validate, None, &out)
            .unwrap_err()
            .code,
        EXIT_CONFIG
    );

    assert_eq!(exit_code(&Error::Numerical("x".into())), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::Validation("x".into())), EXIT_VALIDATION);
}

#[test]
fn seed_override_and_suite_inference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.json",
        &json!({"systems": [{"name": "tp", "kind": "two_point"}]}),
    );
    let a = load_config(&cfg, Suite::Validate, Some(7)).unwrap();
    assert_eq!(a.config.seed, 7);
    let b = load_config(&cfg, Suite::Validate, Some(8)).unwrap();
    assert_ne!(a.hash, b.hash);
    assert_eq!(
        a.hash,
        load_config(&cfg, Suite::Validate, Some(7)).unwrap().hash
    );
}

#[test]
fn system_files_resolve_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("sys")).unwrap();
    write(
        &dir.path().join("sys"),
        "t.json",
        &json!({"kind": "torus", "q": 3}),
    );
    let cfg = write(
        dir.path(),
        "v.json",
        &json!({"suite": "validate", "seed": 2, "systems": [{"name": "t3", "kind": "file", "path": "sys/t.json"}]}),
    );
    let (rec, code) = run(&cfg, Suite::Validate, None, &dir.path().join("out")).unwrap();
    assert_eq!(code, 0);
    assert_eq!(rec.get("t3.dim").unwrap().value, 9.0);
}

#[test]
fn distance_scaling_bridge_gives_c_over_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "d.json",
        &json!({
            "suite": "distance",
            "seed": 1,
            "x": {"kind": "two_point", "d": 1.0},
            "bridges": [{"kind": "scaling", "lambda": 4.0, "c": 1.0}]
        }),
    );
    let (rec, code) = run(&cfg, Suite::Distance, None, &dir.path().join("out")).unwrap();
    assert_eq!(code, 0, "{:?}", rec.checks);
    let e = rec.get("bridge0.scaling.dist_upper").unwrap();
    assert_eq!(e.value, 0.25);
    assert_eq!(e.kind, EstimateKind::Upper);
}

#[test]
fn distance_norm_bridge_between_two_point_spaces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "d.json",
        &json!({
            "suite": "distance",
            "seed": 1,
            "x": {"kind": "two_point"},
            "y": {"kind": "two_point"},
            "bridges": [{"kind": "norm", "epsilon": 0.1}]
        }),
    );
    let (rec, code) = run(&cfg, Suite::Distance, None, &dir.path().join("out")).unwrap();
    assert_eq!(code, 0);
    assert_eq!(rec.get("bridge0.norm.dist_upper").unwrap().value, 0.1);

    // scaling bridges compare with the one-point system only
    let bad = write(
        dir.path(),
        "e.json",
        &json!({
            "suite": "distance",
            "seed": 1,
            "x": {"kind": "two_point"},
            "y": {"kind": "two_point"},
            "bridges": [{"kind": "scaling", "lambda": 2.0, "c": 1.0}]
        }),
    );
    assert_eq!(
        run(&bad, Suite::Distance, None, &dir.path().join("out2"))
            .unwrap_err()
            .code,
        EXIT_CONFIG
    );
}

#[test]
fn berezin_sweep_writes_sixteen_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "b.json",
        &json!({"suite": "berezin", "seed": 3, "samples": 2, "random_rotations": 1}),
    );
    let out = dir.path().join("out");
    let (rec, code) = run(&cfg, Suite::Berezin, None, &out).unwrap();
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(out.join("berezin.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("j[exact],dim[exact],gamma_hat[heuristic]"));
    assert_eq!(lines.count(), 16);
    // residual of J_z / j is 1 / (j + 1): 2/3 at j = 1/2 and 1/9 at j = 8
    assert!((rec.get("jz_residual.ratio").unwrap().value - 1.0 / 6.0).abs() < 1e-9);
}

fn torus_record(dir: &Path, name: &str, qs: &[usize]) -> PathBuf {
    let cfg = write(
        dir,
        &format!("{name}.json"),
        &json!({"suite": "nctorus", "seed": 1, "qs": qs}),
    );
    let out = dir.join(name);
    let (_, code) = run(&cfg, Suite::Nctorus, None, &out).unwrap();
    assert_eq!(code, 0);
    out.join("result.json")
}

#[test]
fn report_joins_torus_sweeps_on_q_and_n() {
    let dir = tempfile::tempdir().unwrap();
    let a = torus_record(dir.path(), "a", &[3, 5]);
    let b = torus_record(dir.path(), "b", &[5, 7]);
    let cfg = write(
        dir.path(),
        "r.json",
        &json!({"suite": "report", "seed": 0, "records": [a, b]}),
    );
    let out = dir.path().join("report");
    let (rec, code) = run(&cfg, Suite::Report, None, &out).unwrap();
    assert_eq!(code, 0);
    let t = rec.table("torus").unwrap();
    assert_eq!(t.keys, 2);
    assert_eq!(t.columns[0].name, "q");
    assert_eq!(t.columns[1].name, "n");
    // q = 3 has n in {0, 1, 2}; q = 5 appears in both records and is not duplicated
    assert_eq!(t.rows.len(), 9);
    let qs: Vec<f64> = t.rows.iter().map(|r| r[0].unwrap()).collect();
    assert_eq!(qs, [3.0, 3.0, 3.0, 5.0, 5.0, 5.0, 7.0, 7.0, 7.0]);
    assert!(rec.notes.is_empty(), "{:?}", rec.notes);

    let heur = std::fs::read_to_string(out.join("torus_heuristic.csv")).unwrap();
    assert_eq!(
        heur.lines().next().unwrap(),
        "q[exact],n[exact],achieved[heuristic]"
    );
    let cert = std::fs::read_to_string(out.join("torus_certified.csv")).unwrap();
    assert!(!cert.lines().next().unwrap().contains("heuristic"));
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("status: pass"));
}

#[test]
fn report_of_one_record_passes_tables_through() {
    let dir = tempfile::tempdir().unwrap();
    let a = torus_record(dir.path(), "a", &[3]);
    let cfg = write(
        dir.path(),
        "r.json",
        &json!({"suite": "report", "seed": 0, "records": [a.clone()]}),
    );
    let (rec, _) = run(&cfg, Suite::Report, None, &dir.path().join("report")).unwrap();
    let src: ResultRecord = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(rec.table("torus"), src.table("torus"));
    assert_eq!(rec.checks.len(), src.checks.len());
}

#[test]
fn report_rejects_mixed_suites() {
    let dir = tempfile::tempdir().unwrap();
    let a = torus_record(dir.path(), "a", &[3]);
    let v = write(
        dir.path(),
        "v.json",
        &json!({"suite": "validate", "seed": 1, "systems": [{"name": "tp", "kind": "two_point"}]}),
    );
    run(&v, Suite::Validate, None, &dir.path().join("v")).unwrap();
    let cfg = write(
        dir.path(),
        "r.json",
        &json!({"suite": "report", "seed": 0, "records": [a, dir.path().join("v/result.json")]}),
    );
    let err = run(&cfg, Suite::Report, None, &dir.path().join("report")).unwrap_err();
    assert_eq!(err.code, EXIT_CONFIG);
}
