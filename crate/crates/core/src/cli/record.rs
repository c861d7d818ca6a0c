use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Suite;
use crate::error::Result;
use crate::metrics::{EstimateKind, MetricEstimate};

/// One named output value with its kind tag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    #[serde(flatten)]
    pub estimate: MetricEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: EstimateKind,
}

/// Numeric table; the first `keys` columns are the sweep variables. Missing
/// entries are `null` in JSON and empty in CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub keys: usize,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(name: &str, keys: &[&str], values: &[(&str, EstimateKind)]) -> Self {
        let mut columns: Vec<Column> = keys
            .iter()
            .map(|k| Column {
                name: k.to_string(),
                kind: EstimateKind::Exact,
            })
            .collect();
        columns.extend(values.iter().map(|(n, k)| Column {
            name: n.to_string(),
            kind: *k,
        }));
        Self {
            name: name.into(),
            keys: keys.len(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "table row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Header cells carry the kind, e.g. `gamma_hat[heuristic]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}[{}]", c.name, kind_name(c.kind)))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| v.map(|x| format!("{x}")).unwrap_or_default())
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Same keys, restricted to value columns passing `keep`.
    pub fn select(&self, name: &str, keep: impl Fn(EstimateKind) -> bool) -> Table {
        let idx: Vec<usize> = (0..self.columns.len())
            .filter(|&i| i < self.keys || keep(self.columns[i].kind))
            .collect();
        Table {
            name: name.into(),
            keys: self.keys,
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i]).collect())
                .collect(),
        }
    }
}

pub fn kind_name(k: EstimateKind) -> &'static str {
    match k {
        EstimateKind::Exact => "exact",
        EstimateKind::Upper => "upper",
        EstimateKind::Lower => "lower",
        EstimateKind::Heuristic => "heuristic",
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Deterministic output of one run. Wall-clock time is written separately.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub version: String,
    pub suite: Suite,
    pub config_hash: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub quantities: Vec<Quantity>,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ResultRecord {
    pub fn new(suite: Suite, config_hash: String, seed: u64) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            suite,
            config_hash,
            seed,
            passed: true,
            checks: Vec::new(),
            quantities: Vec::new(),
            tables: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn quantity(&mut self, name: impl Into<String>, estimate: MetricEstimate) {
        self.quantities.push(Quantity {
            name: name.into(),
            estimate,
        });
    }

    pub fn value(&mut self, name: impl Into<String>, value: f64, kind: EstimateKind) {
        self.quantity(name, MetricEstimate::new(value, kind, 0));
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: Option<String>) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn get(&self, name: &str) -> Option<&MetricEstimate> {
        self.quantities
            .iter()
            .find(|q| q.name == name)
            .map(|q| &q.estimate)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// `result.json` plus one CSV per table.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("result.json"), self.to_json()?)?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        Ok(())
    }
}
