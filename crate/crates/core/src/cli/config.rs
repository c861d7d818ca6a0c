use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::berezin::SphereLength;
use crate::error::{Error, Result};
use crate::lipnorms::{BridgeSpec, LipNorm, LipSpec};
use crate::matrix::CMatrix;
use crate::nctorus::{torus_lip, RcpOptions, TorusLipOptions, TorusParams, TorusSpec};
use crate::opsys::OperatorSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Validate,
    Distance,
    Berezin,
    Nctorus,
    Report,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Validate => "validate",
            Suite::Distance => "distance",
            Suite::Berezin => "berezin",
            Suite::Nctorus => "nctorus",
            Suite::Report => "report",
        }
    }
}

/// Top-level experiment file.
#[derive(Clone, Debug, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(flatten)]
    pub suite: SuiteConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case")]
pub enum SuiteConfig {
    Validate(ValidateConfig),
    Distance(DistanceConfig),
    Berezin(BerezinConfig),
    Nctorus(NctorusConfig),
    Report(ReportConfig),
}

impl SuiteConfig {
    pub fn suite(&self) -> Suite {
        match self {
            SuiteConfig::Validate(_) => Suite::Validate,
            SuiteConfig::Distance(_) => Suite::Distance,
            SuiteConfig::Berezin(_) => Suite::Berezin,
            SuiteConfig::Nctorus(_) => Suite::Nctorus,
            SuiteConfig::Report(_) => Suite::Report,
        }
    }
}

/// A Lip-normed operator system, given by preset or explicitly.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemConfig {
    /// Functions on two points with `L(f) = |f_1 - f_2| / d`.
    TwoPoint {
        #[serde(default = "one")]
        d: f64,
    },
    /// The two-torus model with `rho = exp(2 pi i p / q)`.
    Torus {
        q: usize,
        #[serde(default = "one_i64")]
        p: i64,
        #[serde(default)]
        lip: TorusLipOptions,
    },
    /// Any system and serialized Lip-norm.
    Explicit {
        system: OperatorSystem,
        lip: LipSpec,
    },
    /// Another JSON file holding a system entry, relative to the config.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn one_i64() -> i64 {
    1
}

impl SystemConfig {
    pub fn build(&self, base: &Path) -> Result<LipNorm> {
        match self {
            SystemConfig::TwoPoint { d } => {
                if !(*d > 0.0) {
                    return Err(Error::Config("two-point distance must be positive".into()));
                }
                let sys = OperatorSystem::diagonal(2);
                let s = |v: f64| CMatrix::from_fn(1, 1, |_, _| Complex::new(v, 0.0));
                LipNorm::functional(&sys, vec![vec![s(0.0), s(1.0 / d)]])
            }
            SystemConfig::Torus { q, p, lip } => {
                let spec = TorusSpec::new(TorusParams::two(*q, *p))?;
                torus_lip(&spec, lip)
            }
            SystemConfig::Explicit { system, lip } => LipNorm::from_spec(system, lip),
            SystemConfig::File { path } => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", full.display())))?;
                let inner: SystemConfig = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", full.display())))?;
                if matches!(inner, SystemConfig::File { .. }) {
                    return Err(Error::Config(
                        "system files may not point to further files".into(),
                    ));
                }
                let dir = full.parent().unwrap_or(base).to_path_buf();
                inner.build(&dir)
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct NamedSystem {
    pub name: String,
    #[serde(flatten)]
    pub system: SystemConfig,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ValidateConfig {
    pub systems: Vec<NamedSystem>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DistanceConfig {
    pub x: SystemConfig,
    /// Defaults to the one-point system.
    #[serde(default)]
    pub y: Option<SystemConfig>,
    #[serde(default)]
    pub bridges: Vec<BridgeSpec>,
    /// Matrix levels for the sampled Hausdorff fallback.
    #[serde(default = "one_usize")]
    pub n_max: usize,
    /// Levels at which to estimate the diameter of `x`.
    #[serde(default)]
    pub diameter_levels: Vec<usize>,
    /// Sampled maps per side in the Hausdorff fallback.
    #[serde(default = "default_net")]
    pub net: usize,
}

fn one_usize() -> usize {
    1
}

fn default_net() -> usize {
    4
}

#[derive(Clone, Debug, Deserialize)]
pub struct BerezinConfig {
    #[serde(default = "default_j_min")]
    pub j_min: f64,
    #[serde(default = "default_j_max")]
    pub j_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_f_degree")]
    pub f_degree: usize,
    #[serde(default = "default_random_rotations")]
    pub random_rotations: usize,
    #[serde(default = "default_grid")]
    pub grid: (usize, usize),
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    #[serde(default)]
    pub length: SphereLength,
}

fn default_j_min() -> f64 {
    0.5
}
fn default_j_max() -> f64 {
    8.0
}
fn default_samples() -> usize {
    12
}
fn default_f_degree() -> usize {
    3
}
fn default_random_rotations() -> usize {
    6
}
fn default_grid() -> (usize, usize) {
    (24, 48)
}
fn default_l_max() -> usize {
    16
}

#[derive(Clone, Debug, Deserialize)]
pub struct NctorusConfig {
    pub qs: Vec<usize>,
    /// Numerators of `p / q`; default `[1]`.
    #[serde(default = "default_ps")]
    pub ps: Vec<i64>,
    /// Cesàro orders; orders with `n >= q` are skipped.
    #[serde(default = "default_ns")]
    pub ns: Vec<usize>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub lip: TorusLipOptions,
    #[serde(default)]
    pub rcp: RcpOptions,
    #[serde(default)]
    pub probe: Option<ProbeConfig>,
}

fn default_ps() -> Vec<i64> {
    vec![1]
}

fn default_ns() -> Vec<usize> {
    vec![0, 1, 2]
}

#[derive(Clone, Debug, Deserialize)]
pub struct ProbeConfig {
    pub qs: Vec<usize>,
    #[serde(default = "one_usize")]
    pub n: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ReportConfig {
    /// `result.json` files, relative to the config.
    pub records: Vec<PathBuf>,
}
