//! Metrics on matrix state spaces: `rho_{L,n}`, diameters, bridges, distance
//! bounds between Lip-normed operator systems and the neighborhood-set
//! inequalities.
//!
//! Sup-type quantities come back as lower bounds with witnesses that can be
//! re-evaluated; distance bounds come back as upper bounds backed by a named
//! bridge, or as heuristic estimates from sampled nets.

mod ball;
mod bridges;
mod diameter;
mod hausdorff;
mod neighborhood;
mod rho;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::matrix::CMatrix;
use crate::opsys::MapWire;
use crate::C64;

pub use ball::{LipBall, Support};
pub use bridges::{
    dist_upper, make_norm_bridge, make_point_bridge, make_quotient_bridge, make_scaling_bridge,
    validate_bridge, AdmissibleLip, BridgeCheck, BridgeReport, DistUpper,
};
pub use diameter::{diameter, diameter_levels, DiameterOptions, DiameterReport};
pub use hausdorff::{hausdorff_ucp, lift_x, lift_y, match_ucp, HausdorffOptions, Matched, Side};
pub use neighborhood::{check_diambound, DiamboundOptions, DiamboundReport, NeighborhoodSet};
pub use rho::{rho_ln, rho_ln_with, two_point_rho, xi_grid, RhoOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Exact,
    Upper,
    Lower,
    Heuristic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Element { matrix: CMatrix },
    Map { map: MapWire },
    Vector { xi: Vec<C64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl MetricEstimate {
    pub fn new(value: f64, kind: EstimateKind, n: usize) -> Self {
        Self {
            value,
            kind,
            n,
            seed: None,
            witnesses: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn param(mut self, key: &str, v: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    /// First stored element witness, if any.
    pub fn element(&self) -> Option<&CMatrix> {
        self.witnesses.iter().find_map(|w| match w {
            Witness::Element { matrix } => Some(matrix),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests;
