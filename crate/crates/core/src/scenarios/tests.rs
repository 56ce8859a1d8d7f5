use super::*;
use proptest::prelude::*;

fn cat(name: &str, n: usize) -> SettingCategory {
    SettingCategory {
        name: name.into(),
        levels: (0..n)
            .map(|i| Level { label: ["a", "b", "c"][i].into(), description: None, payload: LevelPayload::default() })
            .collect(),
    }
}

fn shares() -> ShareTable {
    [
        (2025, [0.938, 0.0, 0.062]),
        (2030, [0.873, 0.004, 0.123]),
        (2035, [0.511, 0.039, 0.45]),
        (2040, [0.434, 0.073, 0.493]),
        (2045, [0.267, 0.127, 0.606]),
        (2050, [0.101, 0.180, 0.719]),
    ]
    .into_iter()
    .collect()
}

#[test]
fn enumerate_counts() {
    let six = [
        cat("ccs", 3),
        cat("biomass", 3),
        cat("imports", 2),
        cat("electrolyser", 2),
        cat("transport", 3),
        cat("weather", 2),
    ];
    assert_eq!(enumerate_scenarios(&six).len(), 216);
    assert_eq!(enumerate_scenarios(&[cat("x", 2), cat("y", 2)]).len(), 4);
    let single = enumerate_scenarios(&[cat("x", 3)]);
    assert_eq!(single.iter().map(|s| s.id.as_str()).collect::<Vec<_>>(), ["x-a", "x-b", "x-c"]);
    assert!(enumerate_scenarios(&[]).is_empty());
}

#[test]
fn ids_parse_back() {
    let set = ScenarioSet { categories: vec![cat("ccs", 3), cat("weather", 2)], transport_shares: ShareTable::new() };
    for s in set.enumerate() {
        assert_eq!(Scenario::from_id(&set, &s.id).unwrap(), s);
    }
    assert!(Scenario::from_id(&set, "ccs-a").is_err());
    assert!(Scenario::from_id(&set, "ccs-z_weather-a").is_err());
}

#[test]
fn selection() {
    let set = ScenarioSet { categories: vec![cat("ccs", 3), cat("weather", 2)], transport_shares: ShareTable::new() };
    let all = set.enumerate();
    let picked = select(&set, &all, "ccs=a+c, weather=b").unwrap();
    assert_eq!(picked.iter().map(|s| s.id.as_str()).collect::<Vec<_>>(), ["ccs-a_weather-b", "ccs-c_weather-b"]);
    assert_eq!(select(&set, &all, "").unwrap().len(), 6);
    assert!(select(&set, &all, "ccs=d").is_err());
    assert!(select(&set, &all, "nope=a").is_err());
}

#[test]
fn schedule_examples() {
    let seq = Schedule::new([(2030, 25.0), (2040, 125.0), (2050, 275.0)], Some(0.0)).unwrap();
    assert_eq!(seq.value(2035), 75.0);
    assert_eq!(seq.value(2025), 0.0);
    assert_eq!(seq.value(2045), 200.0);
    assert_eq!(seq.value(2060), 275.0);
    let cap = Schedule::new([(2025, 0.65), (2030, 0.45), (2040, 0.10), (2050, 0.0)], None).unwrap();
    assert!((cap.value(2035) - 0.275).abs() < 1e-15);
    assert_eq!(cap.value(2020), 0.65);
    assert!(Schedule::new([], None).is_err());
}

#[test]
fn transport_shift_examples() {
    let base = shares();
    let delayed = shift_transport(&base, TransportShift::Delay).unwrap();
    assert_eq!(delayed[&2040][0], 0.511);
    assert_eq!(delayed[&2030], base[&2025]);
    assert_eq!(delayed[&2025], base[&2025]);
    let acc = shift_transport(&base, TransportShift::Accelerate).unwrap();
    assert_eq!(acc[&2050], [0.101, 0.180, 0.719]);
    assert_eq!(acc[&2025], base[&2025]);
    assert_eq!(acc[&2030], base[&2035]);
    assert_eq!(shift_transport(&base, TransportShift::Baseline).unwrap(), base);
    for t in [delayed, acc] {
        for row in t.values() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }
    let mut bad = base.clone();
    bad.insert(2055, [0.5, 0.4, 0.0]);
    assert!(shift_transport(&bad, TransportShift::Delay).is_err());
}

proptest! {
    #[test]
    fn enumerate_is_a_bijection(sizes in proptest::collection::vec(2usize..=3, 1..5)) {
        let cats: Vec<_> = sizes.iter().enumerate().map(|(i, &n)| cat(&format!("c{i}"), n)).collect();
        let all = enumerate_scenarios(&cats);
        prop_assert_eq!(all.len(), sizes.iter().product::<usize>());
        let ids: std::collections::BTreeSet<_> = all.iter().map(|s| s.id.clone()).collect();
        prop_assert_eq!(ids.len(), all.len());
        let tuples: std::collections::BTreeSet<Vec<usize>> =
            all.iter().map(|s| s.levels.iter().map(|l| l.1).collect()).collect();
        prop_assert_eq!(tuples.len(), all.len());
    }

    #[test]
    fn schedule_monotone_between_monotone_anchors(
        start in -10.0f64..10.0,
        steps in proptest::collection::vec(0.0f64..5.0, 1..5),
        y in 2020i32..2060,
    ) {
        let mut v = start;
        let anchors: Vec<(i32, f64)> = std::iter::once((2025, start))
            .chain(steps.iter().enumerate().map(|(i, s)| { v += s; (2030 + 5 * i as i32, v) }))
            .collect();
        let s = Schedule::new(anchors, None).unwrap();
        prop_assert!(s.value(y) <= s.value(y + 1) + 1e-12);
    }
}
