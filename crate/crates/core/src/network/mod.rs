//! Single-horizon energy-system model with explicit CO₂ accounting.
//!
//! A [`Network`] is a fully resolved, immutable description of one planning horizon: carriers,
//! buses, assets with per-snapshot availability, snapshot weights and global limits. Networks
//! are built from a [`ModelDocument`] (which may hold year-dependent schedules) by
//! [`build_network_at`].
//!
//! Flows are powers in MW (t/h on CO₂ buses); annual quantities are snapshot-weighted sums.
//! An asset with attachments `(bus_k, η_k)` and dispatch `p` injects `η_k·p` into `bus_k`;
//! negative efficiencies consume.

mod document;

pub use document::{
    AssetDoc, AttachmentDoc, BusDoc, CarrierDoc, InitialFleetDoc, LimitDoc, ModelDocument, Param, Scaling, SnapshotDoc,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::RowSense;

/// Lower heating value of hydrogen, TWh per Mt (equivalently kWh per kg).
pub const LHV_TWH_PER_MT: f64 = 33.33;

/// Kilograms of hydrogen per MWh at [`LHV_TWH_PER_MT`].
pub const KG_PER_MWH: f64 = 1000.0 / LHV_TWH_PER_MT;

/// Tag marking assets whose hydrogen output is the target functional.
pub const TAG_ELECTROLYSIS: &str = "electrolysis";

/// Capital recovery factor `r / (1 − (1 + r)^−n)`, or `1/n` at zero rate.
pub fn annuity(rate: f64, lifetime: f64) -> Result<f64> {
    if !rate.is_finite() || !lifetime.is_finite() {
        return Err(Error::InvalidArgument(format!("annuity({rate}, {lifetime}): non-finite input")));
    }
    if rate < 0.0 || lifetime < 1.0 {
        return Err(Error::InvalidArgument(format!("annuity({rate}, {lifetime}): need rate ≥ 0 and lifetime ≥ 1")));
    }
    if rate == 0.0 {
        return Ok(1.0 / lifetime);
    }
    Ok(rate / (1.0 - (1.0 + rate).powf(-lifetime)))
}

pub fn lhv_mt_to_twh(mass_mt: f64) -> Result<f64> {
    if !(mass_mt >= 0.0) || !mass_mt.is_finite() {
        return Err(Error::InvalidArgument(format!("hydrogen mass must be finite and ≥ 0, got {mass_mt}")));
    }
    Ok(mass_mt * LHV_TWH_PER_MT)
}

pub fn lhv_twh_to_mt(energy_twh: f64) -> Result<f64> {
    if !(energy_twh >= 0.0) || !energy_twh.is_finite() {
        return Err(Error::InvalidArgument(format!("hydrogen energy must be finite and ≥ 0, got {energy_twh}")));
    }
    Ok(energy_twh / LHV_TWH_PER_MT)
}

/// Hydrogen mass in Mt from an energy in MWh.
pub fn mwh_to_mt(energy_mwh: f64) -> f64 {
    energy_mwh / 1e6 / LHV_TWH_PER_MT
}

/// Piecewise-linear interpolation through `anchors`, holding end values. `None` when empty.
pub(crate) fn interpolate(anchors: &BTreeMap<i32, f64>, year: i32) -> Option<f64> {
    let (&first_year, &first) = anchors.iter().next()?;
    let (&last_year, &last) = anchors.iter().next_back()?;
    if year <= first_year {
        return Some(first);
    }
    if year >= last_year {
        return Some(last);
    }
    let (&y0, &v0) = anchors.range(..=year).next_back()?;
    let (&y1, &v1) = anchors.range(year..).next()?;
    if y0 == y1 {
        return Some(v0);
    }
    let t = f64::from(year - y0) / f64::from(y1 - y0);
    Some(v0 + t * (v1 - v0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierKind {
    #[default]
    Energy,
    Co2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Co2Role {
    Atmosphere,
    Temporary,
    Permanent,
    Process,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetKind {
    Generator,
    Link,
    Store,
    Load,
    Import,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    NetEmissionCap,
    SequestrationCap,
    ImportCoupling,
    GenericLinear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Carrier {
    pub name: String,
    pub kind: CarrierKind,
    /// t CO₂ released per MWh consumed.
    pub co2_intensity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bus {
    pub id: String,
    pub carrier: String,
    pub node: String,
    pub co2_role: Option<Co2Role>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub bus: String,
    pub efficiency: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Asset {
    pub id: String,
    pub kind: AssetKind,
    pub attachments: Vec<Attachment>,
    /// Overnight investment, EUR/MW (EUR/MWh of energy capacity for stores).
    pub capital_cost: f64,
    /// EUR per MWh of dispatch.
    pub marginal_cost: f64,
    pub lifetime: u32,
    /// Per-snapshot capacity factor; empty means 1 everywhere.
    pub availability: Vec<f64>,
    pub availability_variants: BTreeMap<String, Vec<f64>>,
    pub expandable: bool,
    pub existing_capacity: f64,
    pub unlimited: bool,
    pub tags: BTreeSet<String>,
    pub capture_reference: Option<String>,
    /// Base load profile in MW (loads only).
    pub demand: Vec<f64>,
    pub demand_scale: f64,
}

impl Asset {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.contains(tag)
    }

    /// Annualised capital cost, EUR/MW/a.
    pub fn annualized_capital(&self, rate: f64) -> Result<f64> {
        Ok(self.capital_cost * annuity(rate, f64::from(self.lifetime))?)
    }

    pub fn availability_at(&self, t: usize) -> f64 {
        self.availability.get(t).copied().unwrap_or(1.0)
    }

    /// Effective load in MW at snapshot `t`.
    pub fn demand_at(&self, t: usize) -> f64 {
        self.demand.get(t).copied().unwrap_or(0.0) * self.demand_scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotSet {
    /// Hours represented by each snapshot.
    pub weights: Vec<f64>,
    /// Modelled hours of the year; the weights sum to this.
    pub hours: f64,
}

impl SnapshotSet {
    pub fn uniform(count: usize, hours: f64) -> Self {
        SnapshotSet { weights: vec![hours / count as f64; count], hours }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalLimit {
    pub name: String,
    pub kind: LimitKind,
    /// Resolved bound (template bound × year scale).
    pub bound: f64,
    pub sense: RowSense,
    pub coefficients: BTreeMap<String, f64>,
    pub tag: Option<String>,
    pub enabled: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub name: String,
    pub year: i32,
    pub discount_rate: f64,
    pub scaling: Scaling,
    pub carriers: Vec<Carrier>,
    pub buses: Vec<Bus>,
    pub assets: Vec<Asset>,
    pub snapshots: SnapshotSet,
    pub limits: Vec<GlobalLimit>,
    pub aggregation_exempt_tags: BTreeSet<String>,
}

impl Network {
    pub fn carrier(&self, name: &str) -> Option<&Carrier> {
        self.carriers.iter().find(|c| c.name == name)
    }

    pub fn bus(&self, id: &str) -> Option<&Bus> {
        self.buses.iter().find(|b| b.id == id)
    }

    pub fn asset(&self, id: &str) -> Option<&Asset> {
        self.assets.iter().find(|a| a.id == id)
    }

    pub fn asset_mut(&mut self, id: &str) -> Option<&mut Asset> {
        self.assets.iter_mut().find(|a| a.id == id)
    }

    pub fn limit_mut(&mut self, name: &str) -> Option<&mut GlobalLimit> {
        self.limits.iter_mut().find(|l| l.name == name)
    }

    pub fn nodes(&self) -> BTreeSet<&str> {
        self.buses.iter().map(|b| b.node.as_str()).collect()
    }

    pub fn co2_bus(&self, role: Co2Role) -> Option<&Bus> {
        self.buses.iter().find(|b| b.co2_role == Some(role))
    }

    /// CO₂ intensity of the carrier on `bus`, 0 when unknown.
    pub fn bus_intensity(&self, bus: &str) -> f64 {
        self.bus(bus).and_then(|b| self.carrier(&b.carrier)).map_or(0.0, |c| c.co2_intensity)
    }

    pub fn bus_carrier(&self, bus: &str) -> Option<&str> {
        self.bus(bus).map(|b| b.carrier.as_str())
    }

    pub fn assets_tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a Asset> + 'a {
        self.assets.iter().filter(move |a| a.has_tag(tag))
    }

    /// Whether the model consumes an emitting carrier anywhere.
    fn emits(&self) -> bool {
        self.assets.iter().any(|a| match a.kind {
            AssetKind::Load => {
                a.attachments.iter().any(|at| self.bus_intensity(&at.bus) > 0.0)
                    && a.demand.iter().any(|&d| d * a.demand_scale > 0.0)
            }
            AssetKind::Store => false,
            _ => a.attachments.iter().any(|at| at.efficiency < 0.0 && self.bus_intensity(&at.bus) > 0.0),
        })
    }

    /// Check every structural invariant and report all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let n = self.snapshots.len();

        if !(self.discount_rate >= 0.0) || !self.discount_rate.is_finite() {
            errs.push(format!("discount rate {} must be finite and ≥ 0", self.discount_rate));
        }
        for (t, &w) in self.snapshots.weights.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                errs.push(format!("snapshot {t}: weight {w} must be positive"));
            }
        }
        if n > 0 {
            let total: f64 = self.snapshots.weights.iter().sum();
            if (total - self.snapshots.hours).abs() > 1e-6 * self.snapshots.hours.max(1.0) {
                errs.push(format!("snapshot weights sum to {total}, expected {}", self.snapshots.hours));
            }
        }

        let mut seen = BTreeSet::new();
        for c in &self.carriers {
            if !seen.insert(c.name.as_str()) {
                errs.push(format!("carrier '{}': duplicate name", c.name));
            }
            if !(c.co2_intensity >= 0.0) || !c.co2_intensity.is_finite() {
                errs.push(format!("carrier '{}': co2_intensity {} must be finite and ≥ 0", c.name, c.co2_intensity));
            }
        }

        let mut seen = BTreeSet::new();
        let mut placed = BTreeSet::new();
        let mut roles: BTreeMap<Co2Role, usize> = BTreeMap::new();
        for b in &self.buses {
            if !seen.insert(b.id.as_str()) {
                errs.push(format!("bus '{}': duplicate id", b.id));
            }
            match self.carrier(&b.carrier) {
                None => errs.push(format!("bus '{}': unknown carrier '{}'", b.id, b.carrier)),
                Some(c) => {
                    if b.co2_role.is_some() && c.kind != CarrierKind::Co2 {
                        errs.push(format!("bus '{}': co2_role on non-CO₂ carrier '{}'", b.id, c.name));
                    }
                }
            }
            if !placed.insert((b.carrier.as_str(), b.node.as_str(), b.co2_role)) {
                errs.push(format!("bus '{}': another bus already carries '{}' at node '{}'", b.id, b.carrier, b.node));
            }
            if let Some(role) = b.co2_role {
                *roles.entry(role).or_default() += 1;
            }
        }
        for (role, count) in &roles {
            if *count > 1 {
                errs.push(format!("{count} buses share co2_role {role:?}; at most one allowed"));
            }
        }

        let mut seen = BTreeSet::new();
        for a in &self.assets {
            let who = format!("asset '{}'", a.id);
            if !seen.insert(a.id.as_str()) {
                errs.push(format!("{who}: duplicate id"));
            }
            if a.attachments.is_empty() {
                errs.push(format!("{who}: no attached bus"));
            }
            for at in &a.attachments {
                if self.bus(&at.bus).is_none() {
                    errs.push(format!("{who}: unknown bus '{}'", at.bus));
                }
                if !at.efficiency.is_finite() {
                    errs.push(format!("{who}: non-finite efficiency at bus '{}'", at.bus));
                }
            }
            if matches!(a.kind, AssetKind::Load | AssetKind::Store) && a.attachments.len() > 1 {
                errs.push(format!("{who}: {:?} must attach to exactly one bus", a.kind));
            }
            if a.lifetime < 1 {
                errs.push(format!("{who}: lifetime must be ≥ 1"));
            }
            for (label, v) in [
                ("capital_cost", a.capital_cost),
                ("marginal_cost", a.marginal_cost),
                ("existing_capacity", a.existing_capacity),
                ("demand_scale", a.demand_scale),
            ] {
                if !v.is_finite() {
                    errs.push(format!("{who}: {label} is not finite"));
                }
            }
            if a.capital_cost < 0.0 || a.existing_capacity < 0.0 {
                errs.push(format!("{who}: capital_cost and existing_capacity must be ≥ 0"));
            }
            let profiles = std::iter::once(("availability", &a.availability))
                .chain(a.availability_variants.iter().map(|(k, v)| (k.as_str(), v)));
            for (label, p) in profiles {
                if !p.is_empty() && p.len() != n {
                    errs.push(format!("{who}: {label} has {} values for {n} snapshots", p.len()));
                }
                if let Some(v) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    errs.push(format!("{who}: {label} value {v} outside [0, 1]"));
                }
            }
            match a.kind {
                AssetKind::Load => {
                    if a.demand.len() != n {
                        errs.push(format!("{who}: demand has {} values for {n} snapshots", a.demand.len()));
                    }
                    if a.demand.iter().any(|d| !d.is_finite()) {
                        errs.push(format!("{who}: non-finite demand"));
                    }
                    if a.expandable || a.unlimited {
                        errs.push(format!("{who}: a load has no capacity variable"));
                    }
                }
                _ => {
                    if !a.demand.is_empty() {
                        errs.push(format!("{who}: only loads carry a demand profile"));
                    }
                }
            }
            if a.unlimited && (a.expandable || a.kind == AssetKind::Store) {
                errs.push(format!("{who}: unlimited assets cannot be expandable stores or capacity-built"));
            }
            if let Some(r) = &a.capture_reference {
                if self.asset(r).is_none() {
                    errs.push(format!("{who}: capture_reference '{r}' not found"));
                }
            }
        }

        let mut seen = BTreeSet::new();
        for l in &self.limits {
            let who = format!("limit '{}'", l.name);
            if !seen.insert(l.name.as_str()) {
                errs.push(format!("{who}: duplicate name"));
            }
            if l.kind != LimitKind::ImportCoupling && !l.bound.is_finite() {
                errs.push(format!("{who}: bound must be finite"));
            }
            for id in l.coefficients.keys() {
                if self.asset(id).is_none() {
                    errs.push(format!("{who}: unknown asset '{id}'"));
                }
            }
            if l.kind == LimitKind::GenericLinear && l.coefficients.is_empty() {
                errs.push(format!("{who}: generic limit without coefficients"));
            }
        }

        let co2_limits = self
            .limits
            .iter()
            .any(|l| l.enabled && matches!(l.kind, LimitKind::NetEmissionCap | LimitKind::SequestrationCap));
        let co2_buses = self.buses.iter().any(|b| self.carrier(&b.carrier).is_some_and(|c| c.kind == CarrierKind::Co2));
        if self.emits() || co2_limits || co2_buses {
            for role in [Co2Role::Atmosphere, Co2Role::Temporary, Co2Role::Permanent] {
                if !roles.contains_key(&role) {
                    errs.push(format!("missing CO₂ bus with role {role:?}"));
                }
            }
            if let Some(tmp) = self.co2_bus(Co2Role::Temporary) {
                let stores = self
                    .assets
                    .iter()
                    .filter(|a| a.kind == AssetKind::Store && a.attachments.iter().any(|at| at.bus == tmp.id))
                    .count();
                if stores != 1 {
                    errs.push(format!("temporary CO₂ bus '{}' needs exactly one store, found {stores}", tmp.id));
                }
            }
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// Build the network for the document's own year.
pub fn build_network(doc: &ModelDocument) -> Result<Network> {
    build_network_at(doc, doc.year)
}

/// Resolve all schedules at `year`, then validate.
pub fn build_network_at(doc: &ModelDocument, year: i32) -> Result<Network> {
    let mut errs = Vec::new();
    let mut resolve = |who: &str, what: &str, p: &Param| -> f64 {
        if !p.is_finite() {
            errs.push(format!("{who}: {what} schedule is empty or non-finite"));
            return 0.0;
        }
        p.at(year)
    };

    let carriers = doc
        .carriers
        .iter()
        .map(|c| Carrier { name: c.name.clone(), kind: c.kind, co2_intensity: c.co2_intensity })
        .collect();
    let buses = doc
        .buses
        .iter()
        .map(|b| Bus { id: b.id.clone(), carrier: b.carrier.clone(), node: b.node.clone(), co2_role: b.co2_role })
        .collect();
    let mut assets = Vec::with_capacity(doc.assets.len());
    for a in &doc.assets {
        let who = format!("asset '{}'", a.id);
        let lifetime = resolve(&who, "lifetime", &a.lifetime);
        let attachments = a
            .buses
            .iter()
            .map(|at| Attachment { bus: at.bus.clone(), efficiency: resolve(&who, "efficiency", &at.efficiency) })
            .collect();
        assets.push(Asset {
            id: a.id.clone(),
            kind: a.kind,
            attachments,
            capital_cost: resolve(&who, "capital_cost", &a.capital_cost),
            marginal_cost: resolve(&who, "marginal_cost", &a.marginal_cost),
            lifetime: if lifetime >= 1.0 { lifetime.round() as u32 } else { 0 },
            availability: a.availability.clone(),
            availability_variants: a.availability_variants.clone(),
            expandable: a.expandable,
            existing_capacity: a.existing_capacity,
            unlimited: a.unlimited,
            tags: a.tags.iter().cloned().collect(),
            capture_reference: a.capture_reference.clone(),
            demand: a.demand.clone(),
            demand_scale: resolve(&who, "demand_scale", &a.demand_scale),
        });
    }
    let mut limits = Vec::with_capacity(doc.limits.len());
    for l in &doc.limits {
        let who = format!("limit '{}'", l.name);
        let scale = resolve(&who, "scale_by_year", &l.scale_by_year);
        limits.push(GlobalLimit {
            name: l.name.clone(),
            kind: l.kind,
            bound: l.bound * scale,
            sense: l.sense,
            coefficients: l.coefficients.clone(),
            tag: l.tag.clone(),
            enabled: l.enabled,
        });
    }
    for f in &doc.initial_fleet {
        if !doc.assets.iter().any(|a| a.id == f.asset) {
            errs.push(format!("initial fleet entry: unknown asset '{}'", f.asset));
        }
        if !(f.capacity >= 0.0) || f.lifetime < 1 {
            errs.push(format!("initial fleet entry '{}': capacity ≥ 0 and lifetime ≥ 1 required", f.asset));
        }
    }

    let net = Network {
        name: doc.name.clone(),
        year,
        discount_rate: doc.discount_rate,
        scaling: doc.scaling,
        carriers,
        buses,
        assets,
        snapshots: SnapshotSet { weights: doc.snapshots.weights.clone(), hours: doc.snapshots.hours },
        limits,
        aggregation_exempt_tags: doc.aggregation_exempt_tags.iter().cloned().collect(),
    };
    match net.validate() {
        Ok(()) if errs.is_empty() => Ok(net),
        Ok(()) => Err(Error::Validation(errs)),
        Err(Error::Validation(more)) => {
            errs.extend(more);
            Err(Error::Validation(errs))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form_oracle(rate: f64, n: u32) -> f64 {
        // Sum of discount factors, inverted: independent of the closed form used above.
        let pv: f64 = (1..=n).map(|k| (1.0 + rate).powi(-(k as i32))).sum();
        1.0 / pv
    }

    #[test]
    fn annuity_examples() {
        assert!((annuity(0.0, 10.0).unwrap() - 0.1).abs() < 1e-15);
        let a = annuity(0.07, 20.0).unwrap();
        assert!((a - 0.09439).abs() < 1e-5, "{a}");
        assert!((a - closed_form_oracle(0.07, 20)).abs() < 1e-14);
        assert!((annuity(0.07, 1.0).unwrap() - 1.07).abs() < 1e-14);
    }

    #[test]
    fn annuity_rejects_bad_inputs() {
        assert!(annuity(f64::NAN, 10.0).is_err());
        assert!(annuity(0.05, f64::INFINITY).is_err());
        assert!(annuity(-0.01, 10.0).is_err());
        assert!(annuity(0.05, 0.5).is_err());
    }

    #[test]
    fn annuity_monotone_on_grid() {
        for n in 1..60 {
            let mut prev = annuity(0.0, f64::from(n)).unwrap();
            for k in 1..40 {
                let r = f64::from(k) * 0.005;
                let a = annuity(r, f64::from(n)).unwrap();
                assert!(a > prev, "rate sweep n={n} r={r}");
                prev = a;
            }
        }
        for k in 0..40 {
            let r = f64::from(k) * 0.005;
            let mut prev = annuity(r, 1.0).unwrap();
            for n in 2..60 {
                let a = annuity(r, f64::from(n)).unwrap();
                assert!(a < prev, "lifetime sweep r={r} n={n}");
                prev = a;
            }
        }
    }

    #[test]
    fn lhv_examples() {
        assert_eq!(lhv_mt_to_twh(1.0).unwrap(), 33.33);
        assert_eq!(lhv_mt_to_twh(0.0).unwrap(), 0.0);
        assert!((lhv_mt_to_twh(30.0).unwrap() - 999.9).abs() < 1e-9);
        assert!(lhv_mt_to_twh(-1.0).is_err());
        assert!(lhv_twh_to_mt(-1.0).is_err());
        assert!((mwh_to_mt(33_330_000.0) - 1.0).abs() < 1e-12);
        assert!((KG_PER_MWH - 30.003).abs() < 1e-3);
    }

    #[test]
    fn interpolation_holds_ends() {
        let a: BTreeMap<i32, f64> = [(2030, 25.0), (2040, 125.0), (2050, 275.0)].into();
        assert_eq!(interpolate(&a, 2035), Some(75.0));
        assert_eq!(interpolate(&a, 2045), Some(200.0));
        assert_eq!(interpolate(&a, 2020), Some(25.0));
        assert_eq!(interpolate(&a, 2060), Some(275.0));
        assert_eq!(interpolate(&BTreeMap::new(), 2030), None);
    }

    pub(crate) fn tiny_doc() -> ModelDocument {
        serde_json::from_str(
            r#"{
              "name": "tiny",
              "carriers": [{"name": "electricity"}],
              "buses": [{"id": "el", "carrier": "electricity", "node": "n"}],
              "snapshots": {"weights": [8760.0]},
              "assets": [
                {"id": "gen", "kind": "generator", "buses": [{"bus": "el"}],
                 "capital_cost": 1000.0, "marginal_cost": 10.0, "lifetime": 20, "expandable": true},
                {"id": "demand", "kind": "load", "buses": [{"bus": "el"}], "demand": [5.0]}
              ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn empty_asset_list_is_valid() {
        let mut doc = tiny_doc();
        doc.assets.clear();
        let net = build_network(&doc).unwrap();
        assert!(net.assets.is_empty());
    }

    #[test]
    fn unknown_bus_names_the_asset() {
        let mut doc = tiny_doc();
        doc.assets[0].buses[0].bus = "nowhere".into();
        doc.assets[1].buses[0].bus = "elsewhere".into();
        let err = build_network(&doc).unwrap_err().to_string();
        assert!(err.contains("asset 'gen'") && err.contains("nowhere"), "{err}");
        assert!(err.contains("asset 'demand'") && err.contains("elsewhere"), "{err}");
    }

    #[test]
    fn duplicate_ids_and_missing_co2_buses_reported_together() {
        let mut doc = tiny_doc();
        doc.assets.push(doc.assets[0].clone());
        doc.carriers.push(CarrierDoc { name: "gas".into(), kind: CarrierKind::Energy, co2_intensity: 0.2 });
        doc.buses.push(BusDoc { id: "gas".into(), carrier: "gas".into(), node: "n".into(), co2_role: None });
        let mut ocgt = doc.assets[0].clone();
        ocgt.id = "ocgt".into();
        ocgt.kind = AssetKind::Link;
        ocgt.buses = vec![
            AttachmentDoc { bus: "gas".into(), efficiency: Param::Scalar(-1.0) },
            AttachmentDoc { bus: "el".into(), efficiency: Param::Scalar(0.4) },
        ];
        doc.assets.push(ocgt);
        let Err(Error::Validation(errs)) = build_network(&doc) else { panic!("expected validation error") };
        assert!(errs.iter().any(|e| e.contains("asset 'gen': duplicate id")), "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("Atmosphere")), "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("Permanent")), "{errs:?}");
    }

    #[test]
    fn schedules_resolve_per_year() {
        let mut doc = tiny_doc();
        doc.assets[0].capital_cost = Param::Schedule([(2030, 1000.0), (2040, 500.0)].into());
        let n35 = build_network_at(&doc, 2035).unwrap();
        assert_eq!(n35.asset("gen").unwrap().capital_cost, 750.0);
        let n50 = build_network_at(&doc, 2050).unwrap();
        assert_eq!(n50.asset("gen").unwrap().capital_cost, 500.0);
    }

    #[test]
    fn build_is_deterministic() {
        let doc = tiny_doc();
        assert_eq!(build_network(&doc).unwrap(), build_network(&doc).unwrap());
    }
}
