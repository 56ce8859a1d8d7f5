//! The bundled desk-scale model: three nodes, six carriers, 32 snapshots, brownfield fleet,
//! at 1/1000 of continental scale (1 model MWh = 1 GWh, 1 model t = 1 kt).

use crate::error::Result;
use crate::network::ModelDocument;
use crate::scenarios::ScenarioSet;

pub const DESK_EUROPE_JSON: &str = include_str!("../fixtures/desk_europe.json");
pub const SCENARIOS_JSON: &str = include_str!("../fixtures/scenarios.json");

/// Planning horizons the fixture is built for.
pub const HORIZONS: [i32; 5] = [2030, 2035, 2040, 2045, 2050];

/// Horizon with the net-emission cap at 10 % of baseline.
pub const TEN_PERCENT_HORIZON: i32 = 2040;

/// Eight scenarios spanning every two-level setting plus the CCS extremes.
pub const MINI_MATRIX: &str = "ccs=a+c,biomass=b,transport=b,weather=a";

pub fn desk_europe() -> Result<ModelDocument> {
    ModelDocument::from_json(DESK_EUROPE_JSON)
}

pub fn scenario_set() -> Result<ScenarioSet> {
    ScenarioSet::from_json(SCENARIOS_JSON)
}
