use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::fleet::{Fleet, FleetEntry};
use crate::network::Network;
use crate::translate::{fleet_instance_ids, DispatchResult, InstanceResult};

/// Grouping of an original fleet into an aggregated one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregationMap {
    pub original: Fleet,
    pub aggregated: Fleet,
    /// Original entry indices behind each aggregated entry.
    pub groups: Vec<Vec<usize>>,
    pub exempt: Vec<bool>,
}

/// Asset ids carrying any of the network's aggregation-exempt tags.
pub fn exempt_assets(network: &Network) -> BTreeSet<String> {
    network
        .assets
        .iter()
        .filter(|a| a.tags.iter().any(|t| network.aggregation_exempt_tags.contains(t)))
        .map(|a| a.id.clone())
        .collect()
}

fn same_group(a: &FleetEntry, b: &FleetEntry) -> bool {
    a.asset == b.asset && a.expiry() == b.expiry() && a.params == b.params
}

/// Merge entries of the same asset whose frozen parameters and expiry year coincide.
/// Entries of `exempt` assets pass through unchanged.
pub fn aggregate_build_years(fleet: &Fleet, exempt: &BTreeSet<String>) -> (Fleet, AggregationMap) {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut flags = Vec::new();
    for (i, e) in fleet.entries.iter().enumerate() {
        let is_exempt = exempt.contains(&e.asset);
        let home = if is_exempt {
            None
        } else {
            groups
                .iter()
                .zip(&flags)
                .position(|(g, &ex): (&Vec<usize>, &bool)| !ex && same_group(&fleet.entries[g[0]], e))
        };
        match home {
            Some(g) => groups[g].push(i),
            None => {
                groups.push(vec![i]);
                flags.push(is_exempt);
            }
        }
    }
    let entries = groups
        .iter()
        .map(|g| {
            let first = &fleet.entries[g[0]];
            let build_year = g.iter().map(|&i| fleet.entries[i].build_year).min().expect("non-empty group");
            FleetEntry {
                asset: first.asset.clone(),
                build_year,
                capacity: g.iter().map(|&i| fleet.entries[i].capacity).sum(),
                lifetime: (first.expiry() - build_year) as u32,
                params: first.params.clone(),
                fixed_cost: g.iter().map(|&i| fleet.entries[i].fixed_cost).sum(),
            }
        })
        .collect();
    let aggregated = Fleet { entries };
    let map = AggregationMap { original: fleet.clone(), aggregated: aggregated.clone(), groups, exempt: flags };
    (aggregated, map)
}

fn scaled(v: &[f64], k: f64) -> Vec<f64> {
    v.iter().map(|x| x * k).collect()
}

/// Split each aggregated instance of `result` back onto its members, proportionally to
/// member capacity. Fields other than the instance list are unchanged.
pub fn disaggregate(result: &DispatchResult, map: &AggregationMap) -> DispatchResult {
    let agg_ids = fleet_instance_ids(&map.aggregated, result.year);
    let orig_ids = fleet_instance_ids(&map.original, result.year);
    let mut out = result.clone();
    let mut instances: Vec<(usize, InstanceResult)> = Vec::with_capacity(result.instances.len());
    for inst in &result.instances {
        let group = agg_ids.iter().position(|id| id.as_deref() == Some(inst.id.as_str()));
        let Some(g) = group else {
            instances.push((0, inst.clone()));
            continue;
        };
        let members = &map.groups[g];
        let total: f64 = members.iter().map(|&i| map.original.entries[i].capacity).sum();
        for &i in members {
            let e = &map.original.entries[i];
            let share = if total > 0.0 { e.capacity / total } else { 1.0 / members.len() as f64 };
            instances.push((
                i + 1,
                InstanceResult {
                    id: orig_ids[i].clone().expect("member active when its group is"),
                    asset: e.asset.clone(),
                    build_year: Some(e.build_year),
                    capacity: e.capacity,
                    marginal_cost: inst.marginal_cost,
                    dispatch: scaled(&inst.dispatch, share),
                    levels: scaled(&inst.levels, share),
                },
            ));
        }
    }
    // Restore the order an unaggregated translation would produce.
    let asset_rank = |a: &str| result.instances.iter().position(|i| i.asset == a).unwrap_or(usize::MAX);
    instances.sort_by_key(|(k, inst)| (asset_rank(&inst.asset), *k));
    out.instances = instances.into_iter().map(|(_, i)| i).collect();
    out
}

/// Inverse of [`disaggregate`]: sum members back into their aggregated instances.
pub fn aggregate_result(result: &DispatchResult, map: &AggregationMap) -> DispatchResult {
    let agg_ids = fleet_instance_ids(&map.aggregated, result.year);
    let orig_ids = fleet_instance_ids(&map.original, result.year);
    let mut out = result.clone();
    let mut instances: Vec<InstanceResult> = Vec::with_capacity(result.instances.len());
    for inst in &result.instances {
        let member = orig_ids.iter().position(|id| id.as_deref() == Some(inst.id.as_str()));
        let group = member.and_then(|i| map.groups.iter().position(|g| g.contains(&i)));
        let Some(g) = group else {
            instances.push(inst.clone());
            continue;
        };
        let id = agg_ids[g].clone().expect("active group");
        match instances.iter_mut().find(|i| i.id == id) {
            Some(acc) => {
                acc.capacity += inst.capacity;
                acc.dispatch.iter_mut().zip(&inst.dispatch).for_each(|(a, b)| *a += b);
                acc.levels.iter_mut().zip(&inst.levels).for_each(|(a, b)| *a += b);
            }
            None => {
                let e = &map.aggregated.entries[g];
                instances.push(InstanceResult { id, build_year: Some(e.build_year), ..inst.clone() });
            }
        }
    }
    out.instances = instances;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fleet::FrozenParams;
    use crate::network::Attachment;

    fn entry(asset: &str, build: i32, life: u32, cap: f64, eff: f64) -> FleetEntry {
        FleetEntry {
            asset: asset.into(),
            build_year: build,
            capacity: cap,
            lifetime: life,
            params: FrozenParams {
                attachments: vec![Attachment { bus: "el".into(), efficiency: eff }],
                marginal_cost: 0.0,
            },
            fixed_cost: cap * 10.0,
        }
    }

    #[test]
    fn identical_entries_with_same_expiry_merge() {
        let fleet = Fleet { entries: vec![entry("wind", 2020, 30, 100.0, 1.0), entry("wind", 2025, 25, 150.0, 1.0)] };
        let (agg, map) = aggregate_build_years(&fleet, &BTreeSet::new());
        assert_eq!(agg.len(), 1);
        assert_eq!(agg.entries[0].capacity, 250.0);
        assert_eq!(agg.entries[0].expiry(), 2050);
        assert_eq!(agg.entries[0].fixed_cost, 2500.0);
        assert_eq!(map.groups, vec![vec![0, 1]]);
    }

    #[test]
    fn different_expiry_or_params_do_not_merge() {
        let fleet = Fleet { entries: vec![entry("wind", 2020, 30, 100.0, 1.0), entry("wind", 2025, 30, 150.0, 1.0)] };
        assert_eq!(aggregate_build_years(&fleet, &BTreeSet::new()).0.len(), 2);
        let fleet = Fleet { entries: vec![entry("ely", 2020, 30, 100.0, 0.6), entry("ely", 2025, 25, 150.0, 0.65)] };
        assert_eq!(aggregate_build_years(&fleet, &BTreeSet::new()).0.len(), 2);
    }

    #[test]
    fn exempt_entries_untouched() {
        let fleet = Fleet { entries: vec![entry("ely", 2020, 30, 100.0, 0.6), entry("ely", 2025, 25, 150.0, 0.6)] };
        let exempt: BTreeSet<String> = ["ely".to_string()].into();
        let (agg, map) = aggregate_build_years(&fleet, &exempt);
        assert_eq!(agg, fleet);
        assert_eq!(map.exempt, vec![true, true]);
    }

    fn result_for(map: &AggregationMap, year: i32, dispatch: &[f64]) -> DispatchResult {
        let ids = fleet_instance_ids(&map.aggregated, year);
        let instances = map
            .aggregated
            .entries
            .iter()
            .zip(ids)
            .map(|(e, id)| InstanceResult {
                id: id.unwrap(),
                asset: e.asset.clone(),
                build_year: Some(e.build_year),
                capacity: e.capacity,
                marginal_cost: 0.0,
                dispatch: dispatch.to_vec(),
                levels: vec![],
            })
            .collect();
        DispatchResult { year, weights: vec![1.0; dispatch.len()], instances, ..Default::default() }
    }

    #[test]
    fn disaggregation_splits_by_capacity() {
        let fleet = Fleet { entries: vec![entry("wind", 2020, 30, 100.0, 1.0), entry("wind", 2025, 25, 150.0, 1.0)] };
        let (_, map) = aggregate_build_years(&fleet, &BTreeSet::new());
        let res = result_for(&map, 2030, &[50.0]);
        let split = disaggregate(&res, &map);
        assert_eq!(split.instances.len(), 2);
        assert_eq!(split.instances[0].id, "wind@2020:2050");
        assert_eq!(split.instances[1].id, "wind@2025:2050");
        assert!((split.instances[0].dispatch[0] - 20.0).abs() < 1e-12);
        assert!((split.instances[1].dispatch[0] - 30.0).abs() < 1e-12);
        let back = aggregate_result(&split, &map);
        assert_eq!(back.instances.len(), 1);
        assert!((back.instances[0].dispatch[0] - 50.0).abs() < 1e-12);
        assert_eq!(back.instances[0].capacity, 250.0);
    }

    #[test]
    fn group_of_one_is_identity() {
        let fleet = Fleet { entries: vec![entry("wind", 2020, 30, 100.0, 1.0)] };
        let (_, map) = aggregate_build_years(&fleet, &BTreeSet::new());
        let res = result_for(&map, 2030, &[7.0, 3.0]);
        assert_eq!(disaggregate(&res, &map), res);
    }
}
