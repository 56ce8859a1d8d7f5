//! Built capacity carried between planning horizons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{build_network_at, Asset, Attachment, ModelDocument};

/// Operational parameters fixed when an entry is built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenParams {
    pub attachments: Vec<Attachment>,
    pub marginal_cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FleetEntry {
    pub asset: String,
    pub build_year: i32,
    /// MW (MWh of energy capacity for stores).
    pub capacity: f64,
    pub lifetime: u32,
    pub params: FrozenParams,
    /// Annualised capital of the whole entry, EUR/a; sunk once built.
    pub fixed_cost: f64,
}

impl FleetEntry {
    /// Entry built from `asset` as resolved in its build year.
    pub fn from_asset(asset: &Asset, rate: f64, build_year: i32, capacity: f64, lifetime: u32) -> Result<Self> {
        if !(capacity >= 0.0) || !capacity.is_finite() {
            return Err(Error::Internal(format!("asset '{}': built capacity {capacity}", asset.id)));
        }
        let annuity = crate::network::annuity(rate, f64::from(lifetime.max(1)))?;
        Ok(FleetEntry {
            asset: asset.id.clone(),
            build_year,
            capacity,
            lifetime,
            params: FrozenParams { attachments: asset.attachments.clone(), marginal_cost: asset.marginal_cost },
            fixed_cost: capacity * asset.capital_cost * annuity,
        })
    }

    pub fn expiry(&self) -> i32 {
        self.build_year + self.lifetime as i32
    }

    pub fn active_at(&self, year: i32) -> bool {
        self.build_year <= year && year < self.expiry()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Fleet {
    pub entries: Vec<FleetEntry>,
}

impl Fleet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_capacity(&self, asset: &str) -> f64 {
        self.entries.iter().filter(|e| e.asset == asset).map(|e| e.capacity).sum()
    }

    /// Legacy capacity declared in the document, with parameters resolved at each build year.
    pub fn from_document(doc: &ModelDocument) -> Result<Fleet> {
        let mut entries = Vec::with_capacity(doc.initial_fleet.len());
        for f in &doc.initial_fleet {
            let net = build_network_at(doc, f.build_year)?;
            let asset = net
                .asset(&f.asset)
                .ok_or_else(|| Error::Config(format!("initial fleet: unknown asset '{}'", f.asset)))?;
            entries.push(FleetEntry::from_asset(asset, net.discount_rate, f.build_year, f.capacity, f.lifetime)?);
        }
        Ok(Fleet { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(build: i32, life: u32) -> FleetEntry {
        FleetEntry {
            asset: "wind".into(),
            build_year: build,
            capacity: 1.0,
            lifetime: life,
            params: FrozenParams { attachments: vec![], marginal_cost: 0.0 },
            fixed_cost: 0.0,
        }
    }

    #[test]
    fn activity_window_is_half_open() {
        let e = entry(2025, 20);
        assert!(!e.active_at(2024));
        assert!(e.active_at(2025));
        assert!(e.active_at(2040));
        assert!(!e.active_at(2045));
    }
}
