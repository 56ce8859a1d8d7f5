use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathway::{PathwayRecord, RecordSense, RecordStatus};
use crate::translate::FlowEntry;

pub const RECORDS_FILE: &str = "records.csv";
pub const FLOWS_FILE: &str = "flows.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORD_HEADER: [&str; 8] =
    ["scenario_id", "horizon", "sense", "epsilon", "status", "cost_eur", "h2_mt", "mu_raw"];

/// Everything needed to reproduce a run. Written before the first solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub model: PathBuf,
    pub scenarios: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<String>,
    pub epsilons: Vec<f64>,
    pub horizons: Vec<i32>,
    pub jobs: usize,
    /// Number of temporal segments the model was reduced to before running, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<usize>,
    #[serde(default = "default_true")]
    pub aggregate: bool,
    #[serde(default)]
    pub flows: bool,
    /// Runs use no randomness; identical manifests give identical stores.
    pub deterministic: bool,
    pub out: PathBuf,
    pub tool_version: String,
}

impl RunManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

fn default_true() -> bool {
    true
}

/// One row of the long-format flow table, keyed by the record it belongs to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRow {
    pub scenario_id: String,
    pub horizon: i32,
    pub sense: RecordSense,
    pub epsilon: Option<f64>,
    pub carrier: String,
    pub bus: String,
    pub source: String,
    pub energy_mwh: f64,
}

impl FlowRow {
    pub fn new(record: &PathwayRecord, flow: &FlowEntry) -> Self {
        FlowRow {
            scenario_id: record.scenario_id.clone(),
            horizon: record.horizon,
            sense: record.sense,
            epsilon: record.epsilon,
            carrier: flow.carrier.clone(),
            bus: flow.bus.clone(),
            source: flow.source.clone(),
            energy_mwh: flow.energy,
        }
    }
}

fn key_order(a: (&str, RecordSense, Option<f64>, i32), b: (&str, RecordSense, Option<f64>, i32)) -> Ordering {
    a.0.cmp(b.0).then(a.1.cmp(&b.1)).then(a.2.unwrap_or(-1.0).total_cmp(&b.2.unwrap_or(-1.0))).then(a.3.cmp(&b.3))
}

/// Canonical order: scenario, sense, ε, horizon.
pub fn sort_records(records: &mut [PathwayRecord]) {
    records.sort_by(|a, b| {
        key_order((&a.scenario_id, a.sense, a.epsilon, a.horizon), (&b.scenario_id, b.sense, b.epsilon, b.horizon))
    });
}

pub fn sort_flows(flows: &mut [FlowRow]) {
    flows.sort_by(|a, b| {
        key_order((&a.scenario_id, a.sense, a.epsilon, a.horizon), (&b.scenario_id, b.sense, b.epsilon, b.horizon))
            .then_with(|| (&a.carrier, &a.bus, &a.source).cmp(&(&b.carrier, &b.bus, &b.source)))
    });
}

/// Shortest round-trip form; switches to exponent notation for very small or large values.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn parse_opt(s: &str, what: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|_| Error::Parse(format!("line {line}: bad {what} '{s}'")))
}

/// A directory holding `manifest.json`, `records.csv` and optionally `flows.csv`.
#[derive(Clone, Debug)]
pub struct ResultsStore {
    pub root: PathBuf,
}

impl ResultsStore {
    pub fn create(root: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(root.as_ref())?;
        Ok(ResultsStore { root: root.as_ref().to_path_buf() })
    }

    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        if !root.join(RECORDS_FILE).is_file() {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{} has no {RECORDS_FILE}", root.display()),
            )));
        }
        Ok(ResultsStore { root: root.to_path_buf() })
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.root.join(file)
    }

    pub fn write_manifest(&self, manifest: &RunManifest) -> Result<()> {
        fs::write(self.path(MANIFEST_FILE), serde_json::to_string_pretty(manifest)? + "\n")?;
        Ok(())
    }

    pub fn read_manifest(&self) -> Result<RunManifest> {
        Ok(serde_json::from_str(&fs::read_to_string(self.path(MANIFEST_FILE))?)?)
    }

    /// Write records in canonical order.
    pub fn write_records(&self, records: &[PathwayRecord]) -> Result<()> {
        let mut records = records.to_vec();
        sort_records(&mut records);
        let mut w = csv::Writer::from_path(self.path(RECORDS_FILE))?;
        w.write_record(RECORD_HEADER)?;
        for r in &records {
            w.write_record([
                r.scenario_id.clone(),
                r.horizon.to_string(),
                r.sense.to_string(),
                fmt_opt(r.epsilon),
                r.status.to_string(),
                fmt_opt(r.cost),
                fmt_opt(r.h2_mt),
                fmt_opt(r.mu_raw),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_records(&self) -> Result<Vec<PathwayRecord>> {
        let mut rd = csv::Reader::from_path(self.path(RECORDS_FILE))?;
        if rd.headers()?.iter().ne(RECORD_HEADER) {
            return Err(Error::Parse(format!("{RECORDS_FILE}: unexpected header")));
        }
        let mut out = Vec::new();
        for (i, row) in rd.records().enumerate() {
            let row = row?;
            let line = i + 2;
            let horizon = row[1].parse().map_err(|_| Error::Parse(format!("line {line}: bad horizon")))?;
            let sense = RecordSense::parse(&row[2]).ok_or_else(|| Error::Parse(format!("line {line}: bad sense")))?;
            let status =
                RecordStatus::parse(&row[4]).ok_or_else(|| Error::Parse(format!("line {line}: bad status")))?;
            out.push(PathwayRecord {
                scenario_id: row[0].to_string(),
                horizon,
                sense,
                epsilon: parse_opt(&row[3], "epsilon", line)?,
                status,
                cost: parse_opt(&row[5], "cost", line)?,
                h2_mt: parse_opt(&row[6], "h2_mt", line)?,
                mu_raw: parse_opt(&row[7], "mu_raw", line)?,
            });
        }
        Ok(out)
    }

    pub fn write_flows(&self, flows: &[FlowRow]) -> Result<()> {
        let mut flows = flows.to_vec();
        sort_flows(&mut flows);
        let mut w = csv::Writer::from_path(self.path(FLOWS_FILE))?;
        if flows.is_empty() {
            w.write_record(["scenario_id", "horizon", "sense", "epsilon", "carrier", "bus", "source", "energy_mwh"])?;
        }
        for f in &flows {
            w.serialize(f)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Flow rows, or an empty list if the run did not record flows.
    pub fn read_flows(&self) -> Result<Vec<FlowRow>> {
        if !self.path(FLOWS_FILE).is_file() {
            return Ok(Vec::new());
        }
        let mut rd = csv::Reader::from_path(self.path(FLOWS_FILE))?;
        Ok(rd.deserialize().collect::<std::result::Result<_, _>>()?)
    }
}
