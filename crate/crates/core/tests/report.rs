use std::fs;
use std::path::Path;

use corridor_core::analysis::{report, ReportOptions, CORRIDOR_FILE, FLOW_REPORT_FILE, RANGES_FILE, SENSITIVITY_FILE};
use corridor_core::fixture;
use corridor_core::reduction::{apply_segmentation_doc, document_series, segment};
use corridor_core::scenarios::{run_matrix, select, MatrixConfig, ResultsStore};
use corridor_core::RevisedSimplex;
use tempfile::TempDir;

const FILES: [&str; 4] = [RANGES_FILE, CORRIDOR_FILE, FLOW_REPORT_FILE, SENSITIVITY_FILE];

fn lines(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn empty_store_gives_header_only_files() {
    let dir = TempDir::new().unwrap();
    let store = ResultsStore::create(dir.path().join("store")).unwrap();
    store.write_records(&[]).unwrap();
    let out = dir.path().join("report");
    report(&store, None, &ReportOptions::default(), &out).unwrap();
    for f in FILES {
        assert_eq!(lines(&out.join(f)), 1, "{f}");
    }
}

#[test]
fn small_run_reports_and_round_trips() {
    let doc = fixture::desk_europe().unwrap();
    let seg = segment(&document_series(&doc), &doc.snapshots.weights, 8).unwrap();
    let doc = apply_segmentation_doc(&doc, &seg).unwrap();
    let set = fixture::scenario_set().unwrap();
    let scenarios =
        select(&set, &set.enumerate(), "ccs=a+c,biomass=b,transport=b,weather=a,imports=a,electrolyser=a").unwrap();
    assert_eq!(scenarios.len(), 2);
    let horizons = vec![2030, 2035];
    let mut config = MatrixConfig::new(vec![0.05], horizons.clone());
    config.flows = true;
    let run = run_matrix(&doc, &set, &scenarios, &config, &RevisedSimplex).unwrap();

    let dir = TempDir::new().unwrap();
    let store = ResultsStore::create(dir.path().join("a")).unwrap();
    store.write_records(&run.records).unwrap();
    store.write_flows(&run.flows).unwrap();
    assert_eq!(store.read_records().unwrap(), run.records);

    let out_a = dir.path().join("report_a");
    report(&store, Some(&set), &ReportOptions::default(), &out_a).unwrap();
    assert_eq!(lines(&out_a.join(CORRIDOR_FILE)), 1 + horizons.len());
    assert_eq!(lines(&out_a.join(RANGES_FILE)), 1 + scenarios.len() * horizons.len());
    assert!(lines(&out_a.join(FLOW_REPORT_FILE)) > 1);

    let copy = ResultsStore::create(dir.path().join("b")).unwrap();
    copy.write_records(&store.read_records().unwrap()).unwrap();
    copy.write_flows(&store.read_flows().unwrap()).unwrap();
    let out_b = dir.path().join("report_b");
    report(&copy, Some(&set), &ReportOptions::default(), &out_b).unwrap();
    for f in FILES {
        assert_eq!(fs::read(out_a.join(f)).unwrap(), fs::read(out_b.join(f)).unwrap(), "{f}");
    }
}
