//! Batch runner behind the `cqms` binary: JSON experiment configs, result
//! records and the report merger.

mod config;
mod record;
mod report;
mod suites;

pub use config::{
    BerezinConfig, DistanceConfig, ExperimentConfig, NamedSystem, NctorusConfig, ProbeConfig,
    ReportConfig, Suite, SuiteConfig, SystemConfig, ValidateConfig,
};
pub use record::{kind_name, Check, Column, Quantity, ResultRecord, Table};
pub use report::{merge_records, merge_tables, split_tables, summary};

use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::error::Error;

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_CONFIG,
        message: msg.into(),
    }
}

/// Exit status for a library error raised while running a suite.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_)
        | Error::Dimension(_)
        | Error::Config(_)
        | Error::Json(_)
        | Error::Io(_) => EXIT_CONFIG,
        Error::Validation(_) => EXIT_VALIDATION,
        Error::Numerical(_) | Error::NonFinite { .. } | Error::NotHermitian(_) => EXIT_NUMERICAL,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

/// A parsed config together with its canonical hash.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub hash: String,
    pub base: PathBuf,
}

/// Reads a config, applies the seed override and checks the suite.
pub fn load_config(path: &Path, suite: Suite, seed: Option<u64>) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| config_error("config must be a JSON object"))?;
    if let Some(s) = seed {
        obj.insert("seed".into(), s.into());
    }
    if !obj.get("seed").is_some_and(|s| s.is_u64()) {
        return Err(config_error(
            "config needs a nonnegative integer seed (or pass --seed)",
        ));
    }
    match obj.get("suite").and_then(|s| s.as_str()) {
        Some(s) if s == suite.name() => {}
        Some(s) => {
            return Err(config_error(format!(
                "config is for the {s} suite but {} was requested",
                suite.name()
            )))
        }
        None => {
            obj.insert("suite".into(), suite.name().into());
        }
    }
    let config: ExperimentConfig = serde_json::from_value(value.clone())
        .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    // serde_json maps are sorted, so this serialization is canonical
    let canonical = serde_json::to_vec(&value).map_err(|e| config_error(e.to_string()))?;
    let hash = hex::encode(Sha256::digest(&canonical));
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(LoadedConfig { config, hash, base })
}

/// Runs the configured suite and returns its record.
pub fn execute(
    loaded: &LoadedConfig,
) -> Result<(ResultRecord, Vec<Table>, Option<String>), CliError> {
    let cfg = &loaded.config;
    let mut rec = ResultRecord::new(cfg.suite.suite(), loaded.hash.clone(), cfg.seed);
    let mut extra = Vec::new();
    let mut text = None;
    match &cfg.suite {
        SuiteConfig::Validate(c) => suites::validate(c, &loaded.base, &mut rec)?,
        SuiteConfig::Distance(c) => suites::distance(c, &loaded.base, &mut rec)?,
        SuiteConfig::Berezin(c) => suites::berezin(c, &mut rec)?,
        SuiteConfig::Nctorus(c) => suites::nctorus(c, &mut rec)?,
        SuiteConfig::Report(c) => {
            let mut records = Vec::new();
            let mut sources = Vec::new();
            for p in &c.records {
                let full = loaded.base.join(p);
                let s = std::fs::read_to_string(&full)
                    .map_err(|e| config_error(format!("cannot read {}: {e}", full.display())))?;
                let r: ResultRecord = serde_json::from_str(&s)
                    .map_err(|e| config_error(format!("{}: {e}", full.display())))?;
                records.push(r);
                sources.push(p.display().to_string());
            }
            merge_records(&records, &mut rec)?;
            extra = split_tables(&rec);
            text = Some(summary(&rec, &sources));
        }
    }
    Ok((rec, extra, text))
}

/// Full command: load, run, write `result.json`, CSV tables and
/// `runtime.json` into `out`. Returns the record and the exit status.
pub fn run(
    config: &Path,
    suite: Suite,
    seed: Option<u64>,
    out: &Path,
) -> Result<(ResultRecord, i32), CliError> {
    let start = Instant::now();
    let loaded = load_config(config, suite, seed)?;
    let (rec, extra, text) = execute(&loaded)?;
    rec.write(out)?;
    for t in &extra {
        std::fs::write(out.join(format!("{}.csv", t.name)), t.to_csv()).map_err(Error::from)?;
    }
    if let Some(t) = &text {
        std::fs::write(out.join("summary.txt"), t).map_err(Error::from)?;
    }
    let runtime = serde_json::json!({ "seconds": start.elapsed().as_secs_f64() });
    std::fs::write(out.join("runtime.json"), format!("{runtime}\n")).map_err(Error::from)?;
    let code = if rec.passed { 0 } else { EXIT_VALIDATION };
    Ok((rec, code))
}
