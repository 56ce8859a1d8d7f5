use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use super::store::FlowRow;
use super::{apply_scenario, Scenario, ScenarioSet};
use crate::error::{Error, Result};
use crate::fleet::Fleet;
use crate::mga::{run_extremal_pathway, MgaSense, SlackSpec};
use crate::network::{build_network_at, ModelDocument};
use crate::pathway::{check_horizons, PathwayOptions, PathwayRecord, PathwayRun, Planner, RecordSense, RecordStatus};
use crate::solver::LpBackend;

#[derive(Clone, Debug)]
pub struct MatrixConfig {
    pub epsilons: Vec<f64>,
    pub horizons: Vec<i32>,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
    pub options: PathwayOptions,
    /// Also collect the annual flow table of every solved record.
    pub flows: bool,
}

impl MatrixConfig {
    pub fn new(epsilons: Vec<f64>, horizons: Vec<i32>) -> Self {
        MatrixConfig { epsilons, horizons, jobs: 0, options: PathwayOptions::default(), flows: false }
    }

    pub fn validate(&self) -> Result<()> {
        check_horizons(&self.horizons)?;
        for &e in &self.epsilons {
            SlackSpec::new(e, MgaSense::Max)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScenarioOutput {
    pub records: Vec<PathwayRecord>,
    pub flows: Vec<FlowRow>,
}

impl ScenarioOutput {
    fn push_run(&mut self, run: &PathwayRun, flows: bool) {
        for o in &run.outcomes {
            if let (true, Some(res)) = (flows, &o.result) {
                self.flows.extend(res.flows.iter().map(|f| FlowRow::new(&o.record, f)));
            }
            self.records.push(o.record.clone());
        }
    }
}

/// Optimal pathway, then a min and a max lineage per ε. Extremal lineages stop where the
/// optimal pathway failed, since they have no budget beyond it.
pub fn run_scenario(
    doc: &ModelDocument,
    set: &ScenarioSet,
    scenario: &Scenario,
    config: &MatrixConfig,
    backend: &dyn LpBackend,
) -> Result<ScenarioOutput> {
    let source = |y: i32| apply_scenario(&build_network_at(doc, y)?, set, scenario, y);
    let planner = Planner {
        networks: &source,
        initial_fleet: Fleet::from_document(doc)?,
        backend,
        options: config.options.clone(),
        scenario_id: scenario.id.clone(),
    };
    let mut out = ScenarioOutput::default();
    let optimal = planner.run_optimal(&config.horizons)?;
    out.push_run(&optimal, config.flows);
    let solved: Vec<i32> =
        optimal.outcomes.iter().filter(|o| o.record.is_optimal()).map(|o| o.record.horizon).collect();
    if solved.is_empty() {
        return Ok(out);
    }
    for &eps in &config.epsilons {
        for sense in [MgaSense::Min, MgaSense::Max] {
            let run = run_extremal_pathway(&planner, &solved, SlackSpec::new(eps, sense)?, &optimal)?;
            out.push_run(&run, config.flows);
        }
    }
    Ok(out)
}

/// Run every scenario on a pool of `config.jobs` workers. A scenario whose worker errors or
/// panics yields `crashed` records for its optimal sense at every horizon; the rest of the
/// matrix is unaffected.
pub fn run_matrix(
    doc: &ModelDocument,
    set: &ScenarioSet,
    scenarios: &[Scenario],
    config: &MatrixConfig,
    backend: &dyn LpBackend,
) -> Result<ScenarioOutput> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
    let outputs: Vec<ScenarioOutput> = pool.install(|| {
        scenarios
            .par_iter()
            .map(|sc| {
                let attempt = catch_unwind(AssertUnwindSafe(|| run_scenario(doc, set, sc, config, backend)));
                match attempt {
                    Ok(Ok(out)) => out,
                    Ok(Err(e)) => {
                        log::warn!("scenario {} failed: {e}", sc.id);
                        crashed(sc, config)
                    }
                    Err(_) => {
                        log::warn!("scenario {} panicked", sc.id);
                        crashed(sc, config)
                    }
                }
            })
            .collect()
    });
    let mut all = ScenarioOutput::default();
    for o in outputs {
        all.records.extend(o.records);
        all.flows.extend(o.flows);
    }
    super::store::sort_records(&mut all.records);
    Ok(all)
}

fn crashed(sc: &Scenario, config: &MatrixConfig) -> ScenarioOutput {
    ScenarioOutput {
        records: config
            .horizons
            .iter()
            .map(|&y| PathwayRecord::failed(&sc.id, y, RecordSense::Optimal, None, RecordStatus::Crashed))
            .collect(),
        flows: Vec::new(),
    }
}
