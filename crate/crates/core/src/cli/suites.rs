use std::path::Path;

use super::config::{BerezinConfig, DistanceConfig, NctorusConfig, ValidateConfig};
use super::record::{ResultRecord, Table};
use crate::berezin::{berezin_sweep, GammaOptions, SphereLipOptions, SweepOptions};
use crate::error::{Error, Result};
use crate::lipnorms::{validate_lipnorm, Bridge, BridgeKind, BridgeSpec, LipNorm};
use crate::metrics::{
    diameter_levels, dist_upper, DiameterOptions, EstimateKind, HausdorffOptions,
};
use crate::nctorus::{
    afn_upper, fejer_bound, lattice_bound, lip_net, net_defect, torus_lip, uniformity_probe,
    TorusParams, TorusSpec,
};

use EstimateKind::{Exact, Heuristic, Lower, Upper};

pub(super) fn validate(cfg: &ValidateConfig, base: &Path, rec: &mut ResultRecord) -> Result<()> {
    if cfg.systems.is_empty() {
        return Err(Error::Config(
            "validate suite needs at least one system".into(),
        ));
    }
    for s in &cfg.systems {
        let l = s.system.build(base)?;
        let rep = validate_lipnorm(&l, rec.seed)?;
        let name = &s.name;
        rec.value(format!("{name}.dim"), l.system().dim() as f64, Exact);
        rec.value(format!("{name}.kernel_dim"), rep.kernel_dim as f64, Exact);
        rec.value(format!("{name}.unit_value"), rep.unit_value, Exact);
        rec.value(
            format!("{name}.max_triangle_excess"),
            rep.max_triangle_excess,
            Lower,
        );
        rec.value(
            format!("{name}.max_homogeneity_error"),
            rep.max_homogeneity_error,
            Lower,
        );
        rec.value(
            format!("{name}.max_adjoint_defect"),
            rep.max_adjoint_defect,
            Lower,
        );
        let detail = (!rep.failures.is_empty()).then(|| rep.failures.join("; "));
        rec.check(format!("{name}.lipnorm"), rep.passed, detail);
    }
    Ok(())
}

fn bridge_name(kind: &BridgeKind) -> &'static str {
    match kind {
        BridgeKind::Norm { .. } => "norm",
        BridgeKind::Quotient { .. } => "quotient",
        BridgeKind::Scaling { .. } => "scaling",
        BridgeKind::Point { .. } => "point",
        BridgeKind::General => "general",
    }
}

pub(super) fn distance(cfg: &DistanceConfig, base: &Path, rec: &mut ResultRecord) -> Result<()> {
    let lx = cfg.x.build(base)?;
    let ly = match &cfg.y {
        Some(y) => y.build(base)?,
        None => LipNorm::one_point(),
    };
    if !cfg.diameter_levels.is_empty() {
        let opts = DiameterOptions {
            seed: rec.seed,
            ..Default::default()
        };
        for r in diameter_levels(&lx, &cfg.diameter_levels, &opts)? {
            let n = r.n;
            rec.quantity(format!("diameter.n{n}.lower"), r.lower);
            if let Some(u) = r.upper {
                rec.quantity(format!("diameter.n{n}.search_upper"), u);
            }
            if let Some(u) = r.certified_upper {
                rec.quantity(format!("diameter.n{n}.certified_upper"), u);
            }
        }
    }
    let hopts = HausdorffOptions {
        net: cfg.net,
        seed: rec.seed,
        ..Default::default()
    };
    for (i, spec) in cfg.bridges.iter().enumerate() {
        // the scaling family compares (X, lambda L) with the one-point system
        let (lx_i, ly_i) = match spec {
            BridgeSpec::Scaling { lambda, .. } => {
                if ly.system().dim() != 1 {
                    return Err(Error::Config(
                        "scaling bridges need the one-point system as y".into(),
                    ));
                }
                (LipNorm::scaled(lx.clone(), *lambda)?, ly.clone())
            }
            _ => (lx.clone(), ly.clone()),
        };
        let bridge = Bridge::from_spec(spec, lx_i.system(), ly_i.system())?;
        let name = format!("bridge{i}.{}", bridge_name(&bridge.kind));
        let d = dist_upper(&lx_i, &ly_i, &bridge, cfg.n_max, &hopts)?;
        let worst = d
            .validation
            .x_to_y
            .max_excess
            .max(d.validation.y_to_x.max_excess);
        rec.value(format!("{name}.max_excess"), worst, Lower);
        let detail = (!d.validation.passed)
            .then(|| "bridge conditions fail on sampled elements".to_string());
        rec.check(format!("{name}.valid"), d.validation.passed, detail);
        if let Some(e) = d.estimate {
            rec.quantity(format!("{name}.dist_upper"), e);
        }
    }
    Ok(())
}

fn two_js(cfg: &BerezinConfig) -> Result<Vec<usize>> {
    let lo = 2.0 * cfg.j_min;
    let hi = 2.0 * cfg.j_max;
    let half = |t: f64| t >= 1.0 && (t - t.round()).abs() < 1e-9;
    if !half(lo) || !half(hi) || hi < lo {
        return Err(Error::Config(
            "j range must be positive half-integers with j_min <= j_max".into(),
        ));
    }
    Ok((lo.round() as usize..=hi.round() as usize).collect())
}

pub(super) fn berezin(cfg: &BerezinConfig, rec: &mut ResultRecord) -> Result<()> {
    let opts = SweepOptions {
        two_js: two_js(cfg)?,
        lip: SphereLipOptions {
            length: cfg.length,
            l_max: cfg.l_max,
        },
        gamma: GammaOptions {
            samples: cfg.samples,
            f_degree: cfg.f_degree,
            seed: rec.seed,
            ..Default::default()
        },
        random_rotations: cfg.random_rotations,
        grid: cfg.grid,
    };
    let rows = berezin_sweep(&opts)?;
    let mut t = Table::new(
        "berezin",
        &["j"],
        &[
            ("dim", Exact),
            ("gamma_hat", Heuristic),
            ("max_residual", Heuristic),
            ("distance_upper", Heuristic),
            ("jz_residual", Exact),
            ("poly_residual", Exact),
            ("unit_defect", Exact),
        ],
    );
    let mut unit_ok = true;
    for r in &rows {
        t.push(
            [
                r.j,
                r.dim as f64,
                r.gamma.value,
                r.max_residual,
                r.distance_upper,
                r.jz_residual,
                r.poly_residual,
                r.unit_defect,
            ]
            .map(Some)
            .to_vec(),
        );
        unit_ok &= r.unit_defect < 1e-6;
    }
    rec.check("contravariant_unital", unit_ok, None);
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        if rows.len() > 1 {
            rec.value("gamma_hat.first", first.gamma.value, Heuristic);
            rec.value("gamma_hat.last", last.gamma.value, Heuristic);
            rec.value(
                "jz_residual.ratio",
                last.jz_residual / first.jz_residual,
                Exact,
            );
        }
    }
    rec.tables.push(t);
    Ok(())
}

pub(super) fn nctorus(cfg: &NctorusConfig, rec: &mut ResultRecord) -> Result<()> {
    if cfg.qs.is_empty() {
        return Err(Error::Config("nctorus suite needs at least one q".into()));
    }
    let mut rcp = cfg.rcp.clone();
    rcp.seed = rec.seed;
    rcp.length = cfg.lip.length;
    let multi_p = cfg.ps.len() > 1;
    let keys: &[&str] = if multi_p {
        &["q", "p", "n"]
    } else {
        &["q", "n"]
    };
    let mut sweep = Table::new(
        "torus",
        keys,
        &[
            ("fejer_bound", Upper),
            ("lattice_bound", Upper),
            ("achieved", Heuristic),
            ("rank", Exact),
        ],
    );
    let ekeys: &[&str] = if multi_p {
        &["q", "p", "epsilon"]
    } else {
        &["q", "epsilon"]
    };
    let mut certs = Table::new(
        "rcp",
        ekeys,
        &[
            ("n", Exact),
            ("rcp_rank", Upper),
            ("afn_rank", Upper),
            ("lattice_bound", Upper),
            ("certified", Exact),
            ("net_defect", Heuristic),
            ("verified", Exact),
        ],
    );
    for &q in &cfg.qs {
        for &p in &cfg.ps {
            let spec = TorusSpec::new(TorusParams::two(q, p))?;
            let l = torus_lip(&spec, &cfg.lip)?;
            let net = lip_net(&spec, &l, rcp.net, rcp.seed)?;
            for &n in cfg.ns.iter().filter(|&&n| n < q) {
                let mut row = vec![Some(q as f64)];
                if multi_p {
                    row.push(Some(p as f64));
                }
                row.extend([
                    Some(n as f64),
                    Some(fejer_bound(n, cfg.lip.length, 2, rcp.quadrature_points).value),
                    Some(lattice_bound(&spec, cfg.lip.length, n)),
                    Some(net_defect(&spec, n, &net)?),
                    Some(spec.rank() as f64),
                ]);
                sweep.push(row);
            }
            for &eps in &cfg.epsilons {
                let mut row = vec![Some(q as f64)];
                if multi_p {
                    row.push(Some(p as f64));
                }
                row.push(Some(eps));
                match afn_upper(&spec, &l, eps, &rcp) {
                    Ok(a) => {
                        let c = &a.certificate;
                        let flag = |b: bool| Some(if b { 1.0 } else { 0.0 });
                        row.extend([
                            Some(c.n as f64),
                            Some(c.rank as f64),
                            Some(a.rank as f64),
                            Some(c.lattice_bound),
                            flag(c.certified),
                            Some(c.net_defect),
                            flag(c.verified),
                        ]);
                        rec.check(
                            format!("q{q}.p{p}.eps{eps}.afn_le_rcp"),
                            a.rank <= c.rank,
                            None,
                        );
                        rec.check(
                            format!("q{q}.p{p}.eps{eps}.quotient_lipnorm"),
                            a.y_validation.passed,
                            None,
                        );
                    }
                    Err(Error::Numerical(msg)) => {
                        row.extend([None; 7]);
                        rec.notes
                            .push(format!("q = {q}, p = {p}, epsilon = {eps}: {msg}"));
                    }
                    Err(e) => return Err(e),
                }
                certs.push(row);
            }
        }
    }
    rec.tables.push(sweep);
    if !cfg.epsilons.is_empty() {
        rec.tables.push(certs);
    }
    if let Some(pc) = &cfg.probe {
        let probe = uniformity_probe(&pc.qs, pc.n, &cfg.lip, &rcp)?;
        let mut t = Table::new(
            "probe",
            &["q", "p"],
            &[
                ("achieved", Heuristic),
                ("lattice_bound", Upper),
                ("fejer_bound", Upper),
            ],
        );
        for r in &probe.rows {
            t.push(vec![
                Some(r.q as f64),
                Some(r.p as f64),
                Some(r.achieved),
                Some(r.lattice_bound),
                Some(r.fejer_bound),
            ]);
        }
        rec.tables.push(t);
        for (q, s) in &probe.spread_by_q {
            rec.value(format!("probe.spread.q{q}"), *s, Heuristic);
        }
        rec.value("probe.max_spread", probe.max_spread, Heuristic);
    }
    Ok(())
}
