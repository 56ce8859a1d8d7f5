//! Network + fleet → standard-form LP, and LP solution → domain quantities.
//!
//! Layout is canonical: columns for CO₂ sinks first, then assets sorted by id (new capacity,
//! then one block per instance); rows for bus balances sorted by bus id, then asset rows
//! sorted by asset id, then global limits sorted by name.
//!
//! | label                  | meaning                                                      |
//! |------------------------|--------------------------------------------------------------|
//! | `cap:{asset}`          | capacity built this horizon, MW                              |
//! | `p:{instance}:{t}`     | dispatch (store discharge, may be negative), MW              |
//! | `e:{instance}:{t}`     | store level, MWh                                             |
//! | `release:{t}`          | net flow into the atmosphere, t/h (free)                     |
//! | `seq:{t}`              | flow into permanent storage, t/h                             |
//! | `bal:{bus}:{t}`        | injections − withdrawals = fixed load                        |
//! | `cap:{instance}:{t}`   | dispatch ≤ availability · (existing + built)                 |
//! | `lvl:{instance}:{t}`   | level ≤ existing + built                                     |
//! | `dyn:{instance}:{t}`   | `e_t − e_{t−1} + w_t·p_t = 0`, cyclic                        |
//! | `lim:{name}`           | global limit                                                 |
//!
//! A fleet instance is named `{asset}@{build_year}:{expiry}`; the instance built this horizon
//! carries the bare asset id.

mod extract;

pub use extract::{DispatchResult, FlowEntry, InstanceResult};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fleet::Fleet;
use crate::lp::{LpProblem, RowSense};
use crate::network::{AssetKind, Attachment, CarrierKind, Co2Role, LimitKind, Network, TAG_ELECTROLYSIS};

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub id: String,
    pub asset: String,
    pub kind: AssetKind,
    /// `None` for the instance built in this horizon.
    pub build_year: Option<i32>,
    pub attachments: Vec<Attachment>,
    pub marginal_cost: f64,
    /// Capacity that exists regardless of this horizon's decision.
    pub fixed_capacity: f64,
    pub capacity_col: Option<usize>,
    pub dispatch: Vec<usize>,
    pub levels: Vec<usize>,
    /// Annual MWh of hydrogen per MW·h of dispatch (0 unless electrolysis).
    pub target_yield: f64,
    /// Energy delivered per unit dispatch, for import accounting.
    pub import_yield: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadTerm {
    pub asset: String,
    pub bus: String,
    pub demand: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslationIndex {
    pub year: i32,
    pub weights: Vec<f64>,
    pub instances: Vec<Instance>,
    pub loads: Vec<LoadTerm>,
    /// Asset id → its `cap:` column and annualised capital cost.
    pub capacity: BTreeMap<String, (usize, f64)>,
    pub release: Vec<usize>,
    pub sequestered: Vec<usize>,
    pub atmosphere_bus: Option<String>,
    pub permanent_bus: Option<String>,
    pub limit_rows: BTreeMap<String, usize>,
    /// Annualised capital of active fleet entries, EUR/a. Sunk, so not part of the objective.
    pub fixed_cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Translation {
    pub problem: LpProblem,
    pub index: TranslationIndex,
}

impl Translation {
    /// Coefficients of `h·x`: annual electrolytic hydrogen output in MWh.
    pub fn target_coefficients(&self) -> Vec<f64> {
        let mut h = vec![0.0; self.problem.num_cols()];
        for inst in &self.index.instances {
            if inst.target_yield != 0.0 {
                for (t, &col) in inst.dispatch.iter().enumerate() {
                    h[col] += self.index.weights[t] * inst.target_yield;
                }
            }
        }
        h
    }
}

/// Emission factor on the atmosphere bus for one unit of dispatch through `attachments`.
fn emission_factor(net: &Network, attachments: &[Attachment]) -> f64 {
    attachments.iter().filter(|a| a.efficiency < 0.0).map(|a| -a.efficiency * net.bus_intensity(&a.bus)).sum()
}

fn is_energy_bus(net: &Network, bus: &str) -> bool {
    net.bus(bus).and_then(|b| net.carrier(&b.carrier)).is_some_and(|c| c.kind == CarrierKind::Energy)
}

fn positive_energy_yield(net: &Network, attachments: &[Attachment]) -> f64 {
    attachments.iter().filter(|a| a.efficiency > 0.0 && is_energy_bus(net, &a.bus)).map(|a| a.efficiency).sum()
}

/// Instance id of every fleet entry at `year`; `None` for inactive entries.
pub fn fleet_instance_ids(fleet: &Fleet, year: i32) -> Vec<Option<String>> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    fleet
        .entries
        .iter()
        .map(|e| {
            if !e.active_at(year) {
                return None;
            }
            let base = format!("{}@{}:{}", e.asset, e.build_year, e.expiry());
            let k = seen.entry(base.clone()).or_insert(0);
            let id = if *k == 0 { base } else { format!("{base}#{k}") };
            *k += 1;
            Some(id)
        })
        .collect()
}

pub fn translate(network: &Network, fleet: &Fleet) -> Result<Translation> {
    network.validate()?;
    let n = network.snapshots.len();
    if n == 0 {
        return Err(Error::Structure("network has no snapshots".into()));
    }
    let w = &network.snapshots.weights;
    let year = network.year;
    let rate = network.discount_rate;

    let atmosphere = network.co2_bus(Co2Role::Atmosphere).map(|b| b.id.clone());
    let permanent = network.co2_bus(Co2Role::Permanent).map(|b| b.id.clone());
    let emissions_present = network.assets.iter().any(|a| {
        a.kind != AssetKind::Load && a.kind != AssetKind::Store && emission_factor(network, &a.attachments) > 0.0
    }) || network
        .assets
        .iter()
        .any(|a| a.kind == AssetKind::Load && a.attachments.iter().any(|at| network.bus_intensity(&at.bus) > 0.0));
    if emissions_present && atmosphere.is_none() {
        return Err(Error::Structure("emitting carriers present but no atmosphere CO₂ bus".into()));
    }
    let needs_seq = network.limits.iter().any(|l| l.enabled && l.kind == LimitKind::SequestrationCap);
    if needs_seq && permanent.is_none() {
        return Err(Error::Structure("sequestration cap without a permanent CO₂ bus".into()));
    }

    for e in &fleet.entries {
        match network.asset(&e.asset) {
            None => {
                return Err(Error::Structure(format!("fleet entry references unknown asset '{}'", e.asset)));
            }
            Some(a) if a.kind == AssetKind::Load || a.unlimited => {
                return Err(Error::Structure(format!("fleet entry for '{}': asset has no capacity", e.asset)));
            }
            Some(a) if a.kind == AssetKind::Store && e.params.attachments.len() != 1 => {
                return Err(Error::Structure(format!("fleet entry for store '{}' needs one attachment", e.asset)));
            }
            _ => {}
        }
    }

    let mut lp = LpProblem::new();
    let mut release = Vec::new();
    let mut sequestered = Vec::new();
    if atmosphere.is_some() {
        for t in 0..n {
            release.push(lp.add_column(format!("release:{t}"), 0.0, f64::NEG_INFINITY, f64::INFINITY));
        }
    }
    if permanent.is_some() {
        for t in 0..n {
            sequestered.push(lp.add_column(format!("seq:{t}"), 0.0, 0.0, f64::INFINITY));
        }
    }

    let mut assets: Vec<_> = network.assets.iter().collect();
    assets.sort_by(|a, b| a.id.cmp(&b.id));

    let fleet_ids = fleet_instance_ids(fleet, year);
    let mut instances: Vec<Instance> = Vec::new();
    let mut loads = Vec::new();
    let mut capacity = BTreeMap::new();
    let mut fixed_cost = 0.0;

    for asset in &assets {
        if asset.kind == AssetKind::Load {
            loads.push(LoadTerm {
                asset: asset.id.clone(),
                bus: asset.attachments[0].bus.clone(),
                demand: (0..n).map(|t| asset.demand_at(t)).collect(),
            });
            continue;
        }
        let cap_col = if asset.expandable {
            let cost = asset.annualized_capital(rate)?;
            let col = lp.add_column(format!("cap:{}", asset.id), cost, 0.0, f64::INFINITY);
            capacity.insert(asset.id.clone(), (col, cost));
            Some(col)
        } else {
            None
        };
        let electrolysis = asset.has_tag(TAG_ELECTROLYSIS);
        let is_import = asset.kind == AssetKind::Import;

        let mut blocks: Vec<(String, Option<i32>, Vec<Attachment>, f64, f64, Option<usize>)> = Vec::new();
        if asset.expandable || asset.unlimited || asset.existing_capacity > 0.0 {
            blocks.push((
                asset.id.clone(),
                None,
                asset.attachments.clone(),
                asset.marginal_cost,
                asset.existing_capacity,
                cap_col,
            ));
        }
        for (e, id) in fleet.entries.iter().zip(&fleet_ids) {
            let Some(id) = id else { continue };
            if e.asset != asset.id {
                continue;
            }
            fixed_cost += e.fixed_cost;
            blocks.push((
                id.clone(),
                Some(e.build_year),
                e.params.attachments.clone(),
                e.params.marginal_cost,
                e.capacity,
                None,
            ));
        }

        for (id, build_year, attachments, marginal, fixed, cap) in blocks {
            let target_yield = if electrolysis { positive_energy_yield(network, &attachments) } else { 0.0 };
            let import_yield = if is_import { positive_energy_yield(network, &attachments) } else { 0.0 };
            let mut inst = Instance {
                id: id.clone(),
                asset: asset.id.clone(),
                kind: asset.kind,
                build_year,
                attachments,
                marginal_cost: marginal,
                fixed_capacity: fixed,
                capacity_col: cap,
                dispatch: Vec::with_capacity(n),
                levels: Vec::new(),
                target_yield,
                import_yield,
            };
            if asset.kind == AssetKind::Store {
                for t in 0..n {
                    inst.dispatch.push(lp.add_column(format!("p:{id}:{t}"), 0.0, f64::NEG_INFINITY, f64::INFINITY));
                }
                let upper = if cap.is_some() { f64::INFINITY } else { fixed };
                for t in 0..n {
                    inst.levels.push(lp.add_column(format!("e:{id}:{t}"), 0.0, 0.0, upper));
                }
            } else {
                for t in 0..n {
                    let upper = if cap.is_some() || (asset.unlimited && build_year.is_none()) {
                        f64::INFINITY
                    } else {
                        asset.availability_at(t) * fixed
                    };
                    inst.dispatch.push(lp.add_column(format!("p:{id}:{t}"), marginal * w[t], 0.0, upper));
                }
            }
            instances.push(inst);
        }
    }

    // Bus balances.
    let mut bus_ids: Vec<&str> = network.buses.iter().map(|b| b.id.as_str()).collect();
    bus_ids.sort_unstable();
    let bus_pos: BTreeMap<&str, usize> = bus_ids.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let mut balance: Vec<Vec<Vec<(usize, f64)>>> = vec![vec![Vec::new(); n]; bus_ids.len()];
    let mut balance_rhs = vec![vec![0.0; n]; bus_ids.len()];
    for inst in &instances {
        let ef = if inst.kind == AssetKind::Store { 0.0 } else { emission_factor(network, &inst.attachments) };
        for t in 0..n {
            let col = inst.dispatch[t];
            for at in &inst.attachments {
                balance[bus_pos[at.bus.as_str()]][t].push((col, at.efficiency));
            }
            if ef > 0.0 {
                if let Some(atm) = &atmosphere {
                    balance[bus_pos[atm.as_str()]][t].push((col, ef));
                }
            }
        }
    }
    for load in &loads {
        let b = bus_pos[load.bus.as_str()];
        let intensity = network.bus_intensity(&load.bus);
        for t in 0..n {
            balance_rhs[b][t] += load.demand[t];
            if intensity > 0.0 && load.demand[t] > 0.0 {
                let atm = bus_pos[atmosphere.as_deref().expect("checked above")];
                balance_rhs[atm][t] -= intensity * load.demand[t];
            }
        }
    }
    if let Some(atm) = &atmosphere {
        for t in 0..n {
            balance[bus_pos[atm.as_str()]][t].push((release[t], -1.0));
        }
    }
    if let Some(perm) = &permanent {
        for t in 0..n {
            balance[bus_pos[perm.as_str()]][t].push((sequestered[t], -1.0));
        }
    }
    for (b, bus) in bus_ids.iter().enumerate() {
        for t in 0..n {
            lp.add_row(format!("bal:{bus}:{t}"), RowSense::Eq, balance_rhs[b][t], &balance[b][t]);
        }
    }

    // Asset rows, already in asset-id order.
    for inst in &instances {
        let asset = network.asset(&inst.asset).expect("instance of known asset");
        let Some(cap) = inst.capacity_col else { continue };
        if inst.kind == AssetKind::Store {
            for t in 0..n {
                lp.add_row(
                    format!("lvl:{}:{t}", inst.id),
                    RowSense::Le,
                    inst.fixed_capacity,
                    &[(inst.levels[t], 1.0), (cap, -1.0)],
                );
            }
        } else {
            for t in 0..n {
                let a = asset.availability_at(t);
                lp.add_row(
                    format!("cap:{}:{t}", inst.id),
                    RowSense::Le,
                    a * inst.fixed_capacity,
                    &[(inst.dispatch[t], 1.0), (cap, -a)],
                );
            }
        }
    }
    for inst in instances.iter().filter(|i| i.kind == AssetKind::Store) {
        for t in 0..n {
            let prev = if t == 0 { n - 1 } else { t - 1 };
            let coefs = [(inst.levels[t], 1.0), (inst.levels[prev], -1.0), (inst.dispatch[t], w[t])];
            lp.add_row(format!("dyn:{}:{t}", inst.id), RowSense::Eq, 0.0, &coefs);
        }
    }

    // Global limits.
    let mut limits: Vec<_> = network.limits.iter().filter(|l| l.enabled).collect();
    limits.sort_by(|a, b| a.name.cmp(&b.name));
    let mut limit_rows = BTreeMap::new();
    for l in limits {
        let mut coefs = Vec::new();
        let (sense, rhs) = match l.kind {
            LimitKind::NetEmissionCap => {
                if atmosphere.is_none() {
                    return Err(Error::Structure(format!("limit '{}' needs an atmosphere CO₂ bus", l.name)));
                }
                coefs.extend(release.iter().enumerate().map(|(t, &c)| (c, w[t])));
                (RowSense::Le, l.bound)
            }
            LimitKind::SequestrationCap => {
                coefs.extend(sequestered.iter().enumerate().map(|(t, &c)| (c, w[t])));
                (RowSense::Le, l.bound)
            }
            LimitKind::ImportCoupling => {
                for inst in &instances {
                    let k = inst.import_yield - inst.target_yield;
                    if k != 0.0 {
                        coefs.extend(inst.dispatch.iter().enumerate().map(|(t, &c)| (c, w[t] * k)));
                    }
                }
                (RowSense::Le, 0.0)
            }
            LimitKind::GenericLinear => {
                for inst in &instances {
                    if let Some(&k) = l.coefficients.get(&inst.asset) {
                        coefs.extend(inst.dispatch.iter().enumerate().map(|(t, &c)| (c, w[t] * k)));
                    }
                }
                (l.sense, l.bound)
            }
        };
        let row = lp.add_row(format!("lim:{}", l.name), sense, rhs, &coefs);
        limit_rows.insert(l.name.clone(), row);
    }

    lp.check_dimensions()?;
    lp.check_finite()?;
    Ok(Translation {
        problem: lp,
        index: TranslationIndex {
            year,
            weights: w.clone(),
            instances,
            loads,
            capacity,
            release,
            sequestered,
            atmosphere_bus: atmosphere,
            permanent_bus: permanent,
            limit_rows,
            fixed_cost,
        },
    })
}

#[cfg(test)]
mod tests;
