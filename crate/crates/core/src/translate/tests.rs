use super::*;
use crate::fleet::{FleetEntry, FrozenParams};
use crate::network::{build_network, ModelDocument};
use crate::solver::{LpBackend, LpSolution, RevisedSimplex, SolveOptions};

fn doc(json: &str) -> ModelDocument {
    serde_json::from_str(json).unwrap()
}

fn tiny() -> Network {
    build_network(&doc(r#"{
        "name": "tiny",
        "carriers": [{"name": "electricity"}],
        "buses": [{"id": "el", "carrier": "electricity", "node": "n"}],
        "snapshots": {"weights": [8760.0]},
        "assets": [
            {"id": "gen", "kind": "generator", "buses": [{"bus": "el"}],
             "capital_cost": 1000.0, "marginal_cost": 10.0, "lifetime": 20, "expandable": true},
            {"id": "demand", "kind": "load", "buses": [{"bus": "el"}], "demand": [5.0]}
        ]
    }"#))
    .unwrap()
}

#[test]
fn one_bus_one_generator_one_load() {
    let net = tiny();
    let tr = translate(&net, &Fleet::new()).unwrap();
    assert_eq!(tr.problem.num_rows(), 2);
    assert_eq!(tr.problem.num_cols(), 2);
    assert_eq!(tr.problem.row_labels, vec!["bal:el:0", "cap:gen:0"]);
    let sol = RevisedSimplex.solve(&tr.problem, &SolveOptions::default());
    assert!(sol.is_optimal());
    let res = tr.extract(&net, &sol).unwrap();
    assert!((res.new_capacity["gen"] - 5.0).abs() < 1e-9);
    let expected = 5.0 * 1000.0 * crate::network::annuity(0.07, 20.0).unwrap() + 5.0 * 8760.0 * 10.0;
    assert!((res.objective - expected).abs() < 1e-8 * expected);
    assert!((sol.objective - expected).abs() < 1e-8 * expected);
}

#[test]
fn expired_fleet_entry_contributes_nothing() {
    let net = tiny();
    let params = FrozenParams { attachments: net.asset("gen").unwrap().attachments.clone(), marginal_cost: 10.0 };
    let fleet = Fleet {
        entries: vec![FleetEntry {
            asset: "gen".into(),
            build_year: 2000,
            capacity: 3.0,
            lifetime: 20,
            params,
            fixed_cost: 99.0,
        }],
    };
    let with = translate(&net, &fleet).unwrap();
    let without = translate(&net, &Fleet::new()).unwrap();
    assert_eq!(with.problem, without.problem);

    let mut active = fleet.clone();
    active.entries[0].lifetime = 40;
    let tr = translate(&net, &active).unwrap();
    assert_eq!(tr.problem.num_cols(), 3);
    assert_eq!(tr.problem.col_labels[2], "p:gen@2000:2040:0");
    assert_eq!(tr.problem.col_upper[2], 3.0);
    assert_eq!(tr.problem.objective_offset, 0.0);
    assert_eq!(tr.index.fixed_cost, 99.0);
}

#[test]
fn zero_snapshots_rejected() {
    let mut d = doc(r#"{"name": "e", "carriers": [{"name": "electricity"}],
        "buses": [{"id": "el", "carrier": "electricity", "node": "n"}],
        "snapshots": {"weights": [], "hours": 0}}"#);
    d.assets.clear();
    let net = build_network(&d).unwrap();
    assert!(matches!(translate(&net, &Fleet::new()), Err(Error::Structure(_))));
}

#[test]
fn demandless_zero_solution_extracts_to_zero() {
    let mut net = tiny();
    net.assets.retain(|a| a.kind != AssetKind::Load);
    let tr = translate(&net, &Fleet::new()).unwrap();
    let sol = LpSolution {
        status: crate::solver::SolveStatus::Optimal,
        primal: vec![0.0; tr.problem.num_cols()],
        duals: vec![0.0; tr.problem.num_rows()],
        reduced_costs: vec![0.0; tr.problem.num_cols()],
        objective: 0.0,
        iterations: 0,
        residuals: None,
    };
    let res = tr.extract(&net, &sol).unwrap();
    assert_eq!(res.objective, 0.0);
    assert_eq!(res.h2_mt, 0.0);
    assert!(res.new_capacity.values().all(|&v| v == 0.0));
    assert!(res.flows.iter().all(|f| f.energy == 0.0));
    assert!(res.instances.iter().all(|i| i.dispatch.iter().all(|&p| p == 0.0)));
}

#[test]
fn electrolysis_output_converts_to_megatonnes() {
    let net = build_network(&doc(r#"{
        "name": "h2",
        "carriers": [{"name": "electricity"}, {"name": "hydrogen"}],
        "buses": [{"id": "el", "carrier": "electricity", "node": "n"},
                  {"id": "h2", "carrier": "hydrogen", "node": "n"}],
        "snapshots": {"weights": [8760.0]},
        "assets": [
            {"id": "grid", "kind": "generator", "buses": [{"bus": "el"}], "unlimited": true, "marginal_cost": 1.0},
            {"id": "electrolysis", "kind": "link", "tags": ["electrolysis"],
             "buses": [{"bus": "el", "efficiency": -1.0}, {"bus": "h2", "efficiency": 0.5}],
             "capital_cost": 0.0, "expandable": true},
            {"id": "h2_demand", "kind": "load", "buses": [{"bus": "h2"}], "demand": [3804.794520547945]}
        ]
    }"#))
    .unwrap();
    let tr = translate(&net, &Fleet::new()).unwrap();
    let sol = RevisedSimplex.solve(&tr.problem, &SolveOptions::default());
    assert!(sol.is_optimal());
    let res = tr.extract(&net, &sol).unwrap();
    // 33 330 GWh of hydrogen in one year.
    assert!((res.electrolysis_mwh - 33_330_000.0).abs() < 1e-3);
    assert!((res.h2_mt - 1.0).abs() < 1e-9);
    let h = tr.target_coefficients();
    let hx: f64 = h.iter().zip(&sol.primal).map(|(a, b)| a * b).sum();
    assert!((hx - res.electrolysis_mwh).abs() < 1e-6);
}

#[test]
fn label_mismatch_is_internal_error() {
    let net = tiny();
    let mut tr = translate(&net, &Fleet::new()).unwrap();
    let sol = RevisedSimplex.solve(&tr.problem, &SolveOptions::default());
    tr.problem.col_labels[1] = "p:other:0".into();
    assert!(matches!(tr.extract(&net, &sol), Err(Error::Internal(_))));
}

#[test]
fn translation_is_pure() {
    let net = tiny();
    assert_eq!(translate(&net, &Fleet::new()).unwrap(), translate(&net, &Fleet::new()).unwrap());
}
