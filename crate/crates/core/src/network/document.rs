//! Serde schema of the JSON model document.
//!
//! Numeric fields that may change between planning horizons accept either a scalar or a
//! `{"year": value}` schedule (see [`Param`]). A document describes a template; a concrete
//! [`Network`](super::Network) is obtained for one horizon by [`build_network_at`](super::build_network_at).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AssetKind, CarrierKind, Co2Role, LimitKind};
use crate::lp::RowSense;

/// A scalar or a year-indexed schedule. Schedules interpolate linearly between anchors and
/// hold the end values outside them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamRepr", into = "ParamRepr")]
pub enum Param {
    Scalar(f64),
    Schedule(BTreeMap<i32, f64>),
}

// Untagged enums buffer map keys as strings, so schedules go through string keys.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ParamRepr {
    Scalar(f64),
    Schedule(BTreeMap<String, f64>),
}

impl TryFrom<ParamRepr> for Param {
    type Error = String;

    fn try_from(r: ParamRepr) -> Result<Self, String> {
        match r {
            ParamRepr::Scalar(v) => Ok(Param::Scalar(v)),
            ParamRepr::Schedule(m) => m
                .into_iter()
                .map(|(k, v)| {
                    k.trim().parse::<i32>().map(|y| (y, v)).map_err(|_| format!("schedule key '{k}' is not a year"))
                })
                .collect::<Result<_, _>>()
                .map(Param::Schedule),
        }
    }
}

impl From<Param> for ParamRepr {
    fn from(p: Param) -> Self {
        match p {
            Param::Scalar(v) => ParamRepr::Scalar(v),
            Param::Schedule(m) => ParamRepr::Schedule(m.into_iter().map(|(k, v)| (k.to_string(), v)).collect()),
        }
    }
}

impl Param {
    pub fn at(&self, year: i32) -> f64 {
        match self {
            Param::Scalar(v) => *v,
            Param::Schedule(anchors) => super::interpolate(anchors, year).unwrap_or(f64::NAN),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Param::Scalar(v) => v.is_finite(),
            Param::Schedule(a) => !a.is_empty() && a.values().all(|v| v.is_finite()),
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Scalar(v)
    }
}

impl Default for Param {
    fn default() -> Self {
        Param::Scalar(0.0)
    }
}

fn default_rate() -> f64 {
    0.07
}

fn default_one() -> Param {
    Param::Scalar(1.0)
}

fn default_hours() -> f64 {
    8760.0
}

fn default_year() -> i32 {
    2030
}

fn default_le() -> RowSense {
    RowSense::Le
}

/// Conversion factors from the real-world units used in scenario payloads (Mt CO₂, TWh) to
/// model units (t CO₂, MWh). A model built at reduced scale shrinks both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub co2_t_per_mt: f64,
    pub energy_mwh_per_twh: f64,
}

impl Default for Scaling {
    fn default() -> Self {
        Scaling { co2_t_per_mt: 1e6, energy_mwh_per_twh: 1e6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub name: String,
    #[serde(default = "default_rate")]
    pub discount_rate: f64,
    #[serde(default = "default_year")]
    pub year: i32,
    #[serde(default)]
    pub scaling: Scaling,
    pub carriers: Vec<CarrierDoc>,
    pub buses: Vec<BusDoc>,
    pub snapshots: SnapshotDoc,
    #[serde(default)]
    pub assets: Vec<AssetDoc>,
    #[serde(default)]
    pub limits: Vec<LimitDoc>,
    #[serde(default)]
    pub initial_fleet: Vec<InitialFleetDoc>,
    #[serde(default)]
    pub aggregation_exempt_tags: Vec<String>,
}

impl ModelDocument {
    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialises")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarrierDoc {
    pub name: String,
    #[serde(default)]
    pub kind: CarrierKind,
    #[serde(default)]
    pub co2_intensity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BusDoc {
    pub id: String,
    pub carrier: String,
    pub node: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub co2_role: Option<Co2Role>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotDoc {
    pub weights: Vec<f64>,
    #[serde(default = "default_hours")]
    pub hours: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttachmentDoc {
    pub bus: String,
    #[serde(default = "default_one")]
    pub efficiency: Param,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssetDoc {
    pub id: String,
    pub kind: AssetKind,
    pub buses: Vec<AttachmentDoc>,
    /// Overnight investment, EUR per MW (per MWh of energy capacity for stores).
    #[serde(default)]
    pub capital_cost: Param,
    #[serde(default)]
    pub marginal_cost: Param,
    #[serde(default = "default_lifetime")]
    pub lifetime: Param,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub availability: Vec<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub availability_variants: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub expandable: bool,
    #[serde(default)]
    pub existing_capacity: f64,
    #[serde(default)]
    pub unlimited: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capture_reference: Option<String>,
    /// Fixed load profile in MW; negative values inject.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub demand: Vec<f64>,
    #[serde(default = "default_one")]
    pub demand_scale: Param,
}

fn default_lifetime() -> Param {
    Param::Scalar(25.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitDoc {
    pub name: String,
    pub kind: LimitKind,
    #[serde(default)]
    pub bound: f64,
    #[serde(default = "default_one")]
    pub scale_by_year: Param,
    #[serde(default = "default_le")]
    pub sense: RowSense,
    /// Asset id → weight on its annual dispatch (generic limits only).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coefficients: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    #[serde(default = "default_true")]
    pub enabled: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialFleetDoc {
    pub asset: String,
    pub build_year: i32,
    pub capacity: f64,
    pub lifetime: u32,
}
