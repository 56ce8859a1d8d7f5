use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Translation;
use crate::error::{Error, Result};
use crate::network::{mwh_to_mt, AssetKind, Network};
use crate::solver::LpSolution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub id: String,
    pub asset: String,
    pub build_year: Option<i32>,
    /// Total installed capacity of the instance (fixed + built).
    pub capacity: f64,
    pub marginal_cost: f64,
    /// MW per snapshot.
    pub dispatch: Vec<f64>,
    /// MWh per snapshot (stores only).
    pub levels: Vec<f64>,
}

/// One row of the annual flow table: signed energy (t for CO₂) that `source` moves into `bus`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowEntry {
    pub carrier: String,
    pub bus: String,
    pub source: String,
    pub energy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DispatchResult {
    pub year: i32,
    pub weights: Vec<f64>,
    /// Capacity built this horizon, per expandable asset.
    pub new_capacity: BTreeMap<String, f64>,
    pub instances: Vec<InstanceResult>,
    pub flows: Vec<FlowEntry>,
    /// t CO₂ per year.
    pub net_emissions: f64,
    pub sequestered: f64,
    /// MWh per year by carrier.
    pub imports: BTreeMap<String, f64>,
    pub electrolysis_mwh: f64,
    pub h2_mt: f64,
    pub capital_cost: f64,
    pub operating_cost: f64,
    /// Annualised capital of carried capacity, EUR/a; excluded from `objective`.
    pub fixed_cost: f64,
    /// Capital of new builds plus operating cost, EUR/a.
    pub objective: f64,
}

impl DispatchResult {
    /// Residual of each bus balance in the flow table.
    pub fn bus_residuals(&self) -> BTreeMap<String, f64> {
        let mut out: BTreeMap<String, f64> = BTreeMap::new();
        for f in &self.flows {
            *out.entry(f.bus.clone()).or_default() += f.energy;
        }
        out
    }

    pub fn carrier_residuals(&self) -> BTreeMap<String, f64> {
        let mut out: BTreeMap<String, f64> = BTreeMap::new();
        for f in &self.flows {
            *out.entry(f.carrier.clone()).or_default() += f.energy;
        }
        out
    }
}

impl Translation {
    pub fn extract(&self, network: &Network, solution: &LpSolution) -> Result<DispatchResult> {
        let lp = &self.problem;
        let idx = &self.index;
        if solution.primal.len() != lp.num_cols() {
            return Err(Error::Dimension(format!(
                "solution has {} values for {} columns",
                solution.primal.len(),
                lp.num_cols()
            )));
        }
        let x = &solution.primal;
        let w = &idx.weights;
        let n = w.len();
        let check = |col: usize, expected: &str| -> Result<()> {
            if lp.col_labels[col] != expected {
                return Err(Error::Internal(format!(
                    "column {col} labelled '{}', expected '{expected}'",
                    lp.col_labels[col]
                )));
            }
            Ok(())
        };
        let carrier_of = |bus: &str| -> String { network.bus_carrier(bus).unwrap_or("?").to_string() };

        let mut res =
            DispatchResult { year: idx.year, weights: w.clone(), fixed_cost: idx.fixed_cost, ..Default::default() };
        for (asset, &(col, cost)) in &idx.capacity {
            check(col, &format!("cap:{asset}"))?;
            res.new_capacity.insert(asset.clone(), x[col]);
            res.capital_cost += cost * x[col];
        }

        let mut flows: BTreeMap<(String, String), f64> = BTreeMap::new();
        let atm = idx.atmosphere_bus.clone();
        for inst in &idx.instances {
            let mut dispatch = Vec::with_capacity(n);
            for (t, &col) in inst.dispatch.iter().enumerate() {
                check(col, &format!("p:{}:{t}", inst.id))?;
                dispatch.push(x[col]);
            }
            let mut levels = Vec::with_capacity(inst.levels.len());
            for (t, &col) in inst.levels.iter().enumerate() {
                check(col, &format!("e:{}:{t}", inst.id))?;
                levels.push(x[col]);
            }
            let energy: f64 = dispatch.iter().zip(w).map(|(p, w)| p * w).sum();
            for at in &inst.attachments {
                *flows.entry((at.bus.clone(), inst.asset.clone())).or_default() += at.efficiency * energy;
            }
            if inst.kind != AssetKind::Store {
                res.operating_cost += inst.marginal_cost * energy;
                let ef: f64 = inst
                    .attachments
                    .iter()
                    .filter(|a| a.efficiency < 0.0)
                    .map(|a| -a.efficiency * network.bus_intensity(&a.bus))
                    .sum();
                if ef > 0.0 {
                    let atm = atm.clone().ok_or_else(|| Error::Internal("emissions without atmosphere bus".into()))?;
                    *flows.entry((atm, inst.asset.clone())).or_default() += ef * energy;
                }
            }
            res.electrolysis_mwh += inst.target_yield * energy;
            if inst.import_yield > 0.0 {
                for at in inst.attachments.iter().filter(|a| a.efficiency > 0.0) {
                    if network
                        .bus(&at.bus)
                        .and_then(|b| network.carrier(&b.carrier))
                        .is_some_and(|c| c.kind == crate::network::CarrierKind::Energy)
                    {
                        *res.imports.entry(carrier_of(&at.bus)).or_default() += at.efficiency * energy;
                    }
                }
            }
            let built = inst.capacity_col.map_or(0.0, |c| x[c]);
            res.instances.push(InstanceResult {
                id: inst.id.clone(),
                asset: inst.asset.clone(),
                build_year: inst.build_year,
                capacity: inst.fixed_capacity + built,
                marginal_cost: inst.marginal_cost,
                dispatch,
                levels,
            });
        }
        for load in &idx.loads {
            let energy: f64 = load.demand.iter().zip(w).map(|(d, w)| d * w).sum();
            *flows.entry((load.bus.clone(), load.asset.clone())).or_default() -= energy;
            let intensity = network.bus_intensity(&load.bus);
            if intensity > 0.0 {
                let emitted: f64 = load.demand.iter().zip(w).map(|(d, w)| d.max(0.0) * w).sum();
                if let Some(atm) = &atm {
                    *flows.entry((atm.clone(), load.asset.clone())).or_default() += intensity * emitted;
                }
            }
        }
        if let Some(atm) = &atm {
            for (t, &col) in idx.release.iter().enumerate() {
                check(col, &format!("release:{t}"))?;
            }
            res.net_emissions = idx.release.iter().zip(w).map(|(&c, w)| x[c] * w).sum();
            *flows.entry((atm.clone(), "atmosphere".into())).or_default() -= res.net_emissions;
        }
        if let Some(perm) = &idx.permanent_bus {
            for (t, &col) in idx.sequestered.iter().enumerate() {
                check(col, &format!("seq:{t}"))?;
            }
            res.sequestered = idx.sequestered.iter().zip(w).map(|(&c, w)| x[c] * w).sum();
            *flows.entry((perm.clone(), "sequestration".into())).or_default() -= res.sequestered;
        }
        res.flows = flows
            .into_iter()
            .map(|((bus, source), energy)| FlowEntry { carrier: carrier_of(&bus), bus, source, energy })
            .collect();
        res.h2_mt = mwh_to_mt(res.electrolysis_mwh);
        res.objective = res.capital_cost + res.operating_cost;
        Ok(res)
    }
}
