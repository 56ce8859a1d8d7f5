use proptest::prelude::*;

use super::*;
use crate::network::KG_PER_MWH;
use crate::pathway::RecordStatus;
use crate::scenarios::ScenarioSet;

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

#[test]
fn corridor_examples() {
    assert_eq!(corridor(&[iv(0., 10.), iv(5., 15.), iv(8., 20.)]).unwrap(), Some(iv(8., 10.)));
    assert_eq!(corridor(&[iv(0., 1.), iv(2., 3.)]).unwrap(), None);
    assert_eq!(corridor(&[iv(2., 3.)]).unwrap(), Some(iv(2., 3.)));
    assert!(corridor(&[]).is_err());
}

#[test]
fn quantile_examples() {
    let set = [iv(0., 10.), iv(5., 15.), iv(8., 20.)];
    assert_eq!(quantile_corridor(&set, 2.0 / 3.0).unwrap(), vec![iv(5., 15.)]);
    assert_eq!(quantile_corridor(&set, 1.0).unwrap(), vec![iv(8., 10.)]);
    assert_eq!(quantile_corridor(&set, 1e-9).unwrap(), vec![iv(0., 20.)]);
    assert_eq!(quantile_corridor(&[iv(0., 1.), iv(2., 3.)], 0.5).unwrap(), vec![iv(0., 1.), iv(2., 3.)]);
    assert!(quantile_corridor(&set, 0.0).is_err());
    assert!(quantile_corridor(&set, 1.5).is_err());
}

#[test]
fn touching_intervals_share_a_point() {
    let set = [iv(0., 1.), iv(1., 2.)];
    assert_eq!(quantile_corridor(&set, 1.0).unwrap(), vec![iv(1., 1.)]);
    assert_eq!(tapering_point(&set).unwrap(), 1.0);
}

#[test]
fn tapering_examples() {
    assert_eq!(tapering_point(&[iv(0., 1.), iv(2., 3.)]).unwrap(), 0.0);
    assert_eq!(tapering_point(&[iv(0., 2.), iv(1., 3.), iv(5., 6.)]).unwrap(), 1.0);
}

#[test]
fn coverage_counts() {
    let c = coverage(&[iv(0., 10.), iv(5., 15.), iv(8., 20.)]);
    assert_eq!(c.points, vec![0., 5., 8., 10., 15., 20.]);
    assert_eq!(c.at_point, vec![1, 2, 3, 3, 2, 1]);
    assert_eq!(c.in_gap, vec![1, 2, 3, 2, 1]);
}

fn rec(id: &str, horizon: i32, sense: RecordSense, epsilon: Option<f64>, h: Option<f64>) -> PathwayRecord {
    PathwayRecord {
        scenario_id: id.into(),
        horizon,
        sense,
        epsilon,
        status: if h.is_some() { RecordStatus::Optimal } else { RecordStatus::Infeasible },
        cost: h.map(|_| 1.0),
        h2_mt: h,
        mu_raw: None,
    }
}

#[test]
fn interval_set_excludes_failures() {
    let records = vec![
        rec("a", 2030, RecordSense::Min, Some(0.1), Some(1.0)),
        rec("a", 2030, RecordSense::Max, Some(0.1), Some(3.0)),
        rec("b", 2030, RecordSense::Min, Some(0.1), None),
        rec("b", 2030, RecordSense::Max, Some(0.1), Some(3.0)),
        rec("c", 2030, RecordSense::Min, Some(0.1), Some(4.0)),
        rec("c", 2030, RecordSense::Max, Some(0.1), Some(3.0)),
        rec("d", 2030, RecordSense::Max, Some(0.1), Some(3.0)),
    ];
    let set = IntervalSet::from_records(&records, 2030, 0.1);
    assert_eq!(set.intervals, vec![("a".to_string(), iv(1., 3.))]);
    assert_eq!(set.failed, vec!["b".to_string(), "d".to_string()]);
    assert_eq!(set.inverted, vec!["c".to_string()]);
}

#[test]
fn corridor_table_marks_tapering_only_when_empty() {
    let records = vec![
        rec("a", 2030, RecordSense::Min, Some(0.1), Some(0.0)),
        rec("a", 2030, RecordSense::Max, Some(0.1), Some(1.0)),
        rec("b", 2030, RecordSense::Min, Some(0.1), Some(2.0)),
        rec("b", 2030, RecordSense::Max, Some(0.1), Some(3.0)),
        rec("a", 2035, RecordSense::Min, Some(0.1), Some(0.0)),
        rec("a", 2035, RecordSense::Max, Some(0.1), Some(2.0)),
        rec("b", 2035, RecordSense::Min, Some(0.1), Some(1.0)),
        rec("b", 2035, RecordSense::Max, Some(0.1), Some(3.0)),
    ];
    let table = corridor_table(&records, 0.1, &[2030, 2035, 2040], &[0.5]).unwrap();
    assert_eq!(table.len(), 3);
    assert_eq!((table[0].robust, table[0].tapering), (None, Some(0.0)));
    assert_eq!((table[1].robust, table[1].tapering), (Some(iv(1., 2.)), None));
    assert_eq!(table[2].scenarios, 0);
}

fn three_category_set() -> ScenarioSet {
    ScenarioSet::from_json(
        r#"{
        "categories": [
            {"name": "x", "levels": [{"label": "a"}, {"label": "b"}, {"label": "c"}]},
            {"name": "y", "levels": [{"label": "a"}, {"label": "b"}]},
            {"name": "z", "levels": [{"label": "a"}, {"label": "b"}]}
        ],
        "transport_shares": {}
    }"#,
    )
    .unwrap()
}

fn planted(set: &ScenarioSet, f: impl Fn(&[f64]) -> f64) -> Vec<PathwayRecord> {
    set.enumerate()
        .iter()
        .map(|s| {
            let x: Vec<f64> =
                s.levels.iter().zip(&set.categories).map(|(&(_, l), c)| level_value(l, c.levels.len())).collect();
            rec(&s.id, 2040, RecordSense::Optimal, None, Some(f(&x)))
        })
        .collect()
}

fn optimal_fit(intercept: bool) -> SensitivityOptions {
    SensitivityOptions { sense: RecordSense::Optimal, epsilon: None, horizons: vec![2040], intercept }
}

#[test]
fn planted_model_is_recovered() {
    let set = three_category_set();
    let records = planted(&set, |x| 3.0 * x[0] - 2.0 * x[1]);
    for intercept in [false, true] {
        let fit = sensitivity(&records, &set, &optimal_fit(intercept)).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-10);
        assert!((fit.coefficients[1] + 2.0).abs() < 1e-10);
        assert!(fit.coefficients[2].abs() < 1e-10);
        assert_eq!(fit.observations, 12);
    }
}

#[test]
fn constant_response_goes_to_intercept() {
    let set = three_category_set();
    let fit = sensitivity(&planted(&set, |_| 7.5), &set, &optimal_fit(true)).unwrap();
    assert!(fit.coefficients.iter().all(|c| c.abs() < 1e-12));
    assert!((fit.intercept.unwrap() - 7.5).abs() < 1e-12);
}

#[test]
fn single_level_categories_are_left_out_and_failures_counted() {
    let set = three_category_set();
    let mut records: Vec<PathwayRecord> =
        planted(&set, |x| x[0] + 4.0 * x[2]).into_iter().filter(|r| r.scenario_id.contains("y-a")).collect();
    records.push(rec("x-a_y-a_z-a", 2040, RecordSense::Optimal, None, None));
    let fit = sensitivity(&records, &set, &optimal_fit(true)).unwrap();
    assert_eq!(fit.categories, vec!["x", "z"]);
    assert_eq!(fit.constant_categories, vec!["y"]);
    assert_eq!(fit.dropped, 1);
    assert!((fit.coefficient("z").unwrap() - 4.0).abs() < 1e-10);
}

#[test]
fn collinear_design_names_categories() {
    let set = three_category_set();
    let records: Vec<PathwayRecord> = planted(&set, |x| x[0])
        .into_iter()
        .filter(|r| {
            (r.scenario_id.contains("y-a") && r.scenario_id.contains("z-a"))
                || (r.scenario_id.contains("y-b") && r.scenario_id.contains("z-b"))
        })
        .collect();
    match sensitivity(&records, &set, &optimal_fit(true)) {
        Err(crate::Error::RankDeficient(names)) => assert_eq!(names, vec!["z"]),
        other => panic!("expected rank deficiency, got {other:?}"),
    }
}

fn rung(epsilon: f64, m_mt: f64, eur_per_kg: f64) -> Rung {
    let mu_raw = if epsilon == 0.0 { None } else { Some(1.0 / (eur_per_kg * KG_PER_MWH)) };
    Rung { epsilon, m_mt, mu_raw }
}

#[test]
fn subsidy_examples() {
    let ladder = [rung(0.0, 15.0, 0.0), rung(0.02, 20.0, 0.2), rung(0.05, 30.0, 0.8), rung(0.10, 40.0, 1.4)];
    let mid = subsidy(25.0, &ladder).unwrap();
    assert!((mid.eur_per_kg - 0.5).abs() < 1e-12);
    assert!((mid.volume_eur - 12.5e9).abs() < 1e-3);
    assert!(!mid.fallback);
    assert!((subsidy(20.0, &ladder).unwrap().eur_per_kg - 0.2).abs() < 1e-12);
    assert_eq!(subsidy(10.0, &ladder).unwrap().eur_per_kg, 0.0);
    assert_eq!(subsidy(15.0, &ladder).unwrap().eur_per_kg, 0.0);
    let beyond = subsidy(41.0, &ladder).unwrap();
    assert!(beyond.fallback && (beyond.eur_per_kg - 1.4).abs() < 1e-12);
    assert!(!subsidy(40.0, &ladder).unwrap().fallback);
}

#[test]
fn subsidy_rejects_bad_ladders() {
    assert!(subsidy(1.0, &[rung(0.0, 2.0, 0.0), rung(0.02, 1.0, 0.1)]).is_err());
    assert!(subsidy(1.0, &[rung(0.02, 2.0, 0.1)]).is_err());
    assert!(subsidy(1.0, &[]).is_err());
    assert!(subsidy(-1.0, &[rung(0.0, 2.0, 0.0)]).is_err());
}

fn dense_coverage(set: &[Interval], x: f64) -> usize {
    set.iter().filter(|i| i.contains(x)).count()
}

fn arb_intervals() -> impl Strategy<Value = Vec<Interval>> {
    prop::collection::vec((0i32..40, 0i32..15), 1..=10)
        .prop_map(|v| v.into_iter().map(|(a, w)| iv(a as f64 / 2.0, (a + w) as f64 / 2.0)).collect())
}

proptest! {
    #[test]
    fn quantile_sets_are_nested(set in arb_intervals(), q1 in 0.01f64..1.0, q2 in 0.01f64..1.0) {
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let wide = quantile_corridor(&set, lo).unwrap();
        let narrow = quantile_corridor(&set, hi).unwrap();
        for i in &narrow {
            prop_assert!(wide.iter().any(|w| w.lo <= i.lo && i.hi <= w.hi));
        }
        if let Some(r) = corridor(&set).unwrap() {
            prop_assert!(narrow.iter().any(|w| w.lo <= r.lo && r.hi <= w.hi));
        }
    }

    #[test]
    fn quantile_endpoints_are_input_endpoints(set in arb_intervals(), q in 0.01f64..=1.0) {
        for i in quantile_corridor(&set, q).unwrap() {
            prop_assert!(set.iter().any(|s| s.lo == i.lo || s.hi == i.lo));
            prop_assert!(set.iter().any(|s| s.lo == i.hi || s.hi == i.hi));
        }
    }

    #[test]
    fn coverage_matches_dense_grid(set in arb_intervals()) {
        let c = coverage(&set);
        for k in 0..80 {
            let x = k as f64 / 4.0;
            let from_sweep = match c.points.iter().position(|&p| p == x) {
                Some(j) => c.at_point[j],
                None => {
                    let j = c.points.partition_point(|&p| p < x);
                    if j == 0 || j == c.points.len() { 0 } else { c.in_gap[j - 1] }
                }
            };
            prop_assert_eq!(from_sweep, dense_coverage(&set, x));
        }
    }

    #[test]
    fn subsidy_stays_between_rungs(target in 0.0f64..50.0, a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let ladder = [rung(0.0, 10.0, 0.0), rung(0.02, 20.0, a.min(b) + 0.01), rung(0.05, 35.0, a.max(b) + 0.01)];
        let s = subsidy(target, &ladder).unwrap();
        let inv: Vec<f64> = ladder.iter().map(|r| r.mu_raw.map_or(0.0, |m| 1.0 / m / KG_PER_MWH)).collect();
        let k = ladder.iter().position(|r| target <= r.m_mt).unwrap_or(ladder.len() - 1);
        let (lo, hi) = if k == 0 { (0.0, 0.0) } else { (inv[k - 1].min(inv[k]), inv[k - 1].max(inv[k])) };
        prop_assert!(s.eur_per_kg >= lo - 1e-12 && s.eur_per_kg <= hi + 1e-12);
        prop_assert_eq!(s.fallback, target > 35.0);
    }
}
