use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::record::{kind_name, ResultRecord, Table};
use crate::error::{Error, Result};
use crate::metrics::EstimateKind;

/// Total order on key rows; keys are finite numbers.
fn key_of(row: &[Option<f64>], keys: usize) -> Vec<u64> {
    row[..keys]
        .iter()
        .map(|v| {
            let b = v.unwrap_or(f64::NAN).to_bits();
            // order-preserving map of the float bits
            if b >> 63 == 1 {
                !b
            } else {
                b | (1 << 63)
            }
        })
        .collect()
}

/// Outer join of same-named tables on their key columns. Value columns are
/// matched by name; the first record providing a cell wins and later
/// disagreeing values are reported as conflicts.
pub fn merge_tables(tables: &[&Table], notes: &mut Vec<String>) -> Result<Table> {
    let first = tables[0];
    let mut columns = first.columns.clone();
    for t in &tables[1..] {
        if t.keys != first.keys || t.columns[..t.keys] != first.columns[..first.keys] {
            return Err(Error::Input(format!(
                "tables named {} have different keys",
                first.name
            )));
        }
        for c in &t.columns[t.keys..] {
            match columns.iter().find(|x| x.name == c.name) {
                Some(x) if x.kind != c.kind => {
                    return Err(Error::Input(format!(
                        "column {} changes kind between records",
                        c.name
                    )));
                }
                Some(_) => {}
                None => columns.push(c.clone()),
            }
        }
    }
    let mut rows: BTreeMap<Vec<u64>, Vec<Option<f64>>> = BTreeMap::new();
    for t in tables {
        let map: Vec<usize> = t
            .columns
            .iter()
            .map(|c| {
                columns
                    .iter()
                    .position(|x| x.name == c.name)
                    .expect("column registered")
            })
            .collect();
        for r in &t.rows {
            let entry = rows
                .entry(key_of(r, t.keys))
                .or_insert_with(|| vec![None; columns.len()]);
            for (i, v) in r.iter().enumerate() {
                let slot = &mut entry[map[i]];
                match (*slot, *v) {
                    (None, _) => *slot = *v,
                    (Some(a), Some(b)) if a.to_bits() != b.to_bits() && i >= t.keys => {
                        notes.push(format!(
                            "{}: conflicting {} at key {:?}; kept {a}",
                            first.name,
                            columns[map[i]].name,
                            &r[..t.keys]
                        ))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(Table {
        name: first.name.clone(),
        keys: first.keys,
        columns,
        rows: rows.into_values().collect(),
    })
}

/// Merges records of one suite into a single report record.
pub fn merge_records(records: &[ResultRecord], into: &mut ResultRecord) -> Result<()> {
    let Some(first) = records.first() else {
        return Err(Error::Input("report needs at least one record".into()));
    };
    if let Some(r) = records.iter().find(|r| r.suite != first.suite) {
        return Err(Error::Input(format!(
            "cannot merge {} and {} records",
            first.suite.name(),
            r.suite.name()
        )));
    }
    let single = records.len() == 1;
    for (i, r) in records.iter().enumerate() {
        for q in &r.quantities {
            let name = if single {
                q.name.clone()
            } else {
                format!("r{i}.{}", q.name)
            };
            into.quantity(name, q.estimate.clone());
        }
        for c in &r.checks {
            let name = if single {
                c.name.clone()
            } else {
                format!("r{i}.{}", c.name)
            };
            into.check(name, c.passed, c.detail.clone());
        }
        into.notes.extend(r.notes.iter().cloned());
    }
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        for t in &r.tables {
            if !names.contains(&t.name.as_str()) {
                names.push(&t.name);
            }
        }
    }
    for name in names {
        let group: Vec<&Table> = records.iter().filter_map(|r| r.table(name)).collect();
        let merged = merge_tables(&group, &mut into.notes)?;
        into.tables.push(merged);
    }
    Ok(())
}

fn certified(k: EstimateKind) -> bool {
    k != EstimateKind::Heuristic
}

/// Splits every table into certified and heuristic parts.
pub fn split_tables(rec: &ResultRecord) -> Vec<Table> {
    let mut out = Vec::new();
    for t in &rec.tables {
        let c = t.select(&format!("{}_certified", t.name), certified);
        if c.columns.len() > c.keys {
            out.push(c);
        }
        let h = t.select(&format!("{}_heuristic", t.name), |k| !certified(k));
        if h.columns.len() > h.keys {
            out.push(h);
        }
    }
    out
}

/// Human-readable summary with certified values listed apart from
/// heuristic estimates.
pub fn summary(rec: &ResultRecord, sources: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "cqms report ({} record(s))", sources.len());
    for src in sources {
        let _ = writeln!(s, "  {src}");
    }
    let _ = writeln!(s, "status: {}", if rec.passed { "pass" } else { "FAIL" });
    for c in rec.checks.iter().filter(|c| !c.passed) {
        let _ = writeln!(s, "  failed check {}", c.name);
    }
    for (title, keep) in [
        ("certified and exact values", true),
        ("heuristic estimates (not bounds)", false),
    ] {
        let rows: Vec<_> = rec
            .quantities
            .iter()
            .filter(|q| certified(q.estimate.kind) == keep)
            .collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(s, "\n{title}:");
        for q in rows {
            let _ = writeln!(
                s,
                "  {:<40} {:>14.6e}  [{}]",
                q.name,
                q.estimate.value,
                kind_name(q.estimate.kind)
            );
        }
    }
    for t in &rec.tables {
        let _ = writeln!(
            s,
            "\ntable {} ({} rows, keyed by {})",
            t.name,
            t.rows.len(),
            key_names(t)
        );
    }
    for n in &rec.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn key_names(t: &Table) -> String {
    t.columns[..t.keys]
        .iter()
        .map(|c| c.name.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}
