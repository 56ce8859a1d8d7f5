//! Myopic multi-horizon planning: solve each horizon in turn, phasing out expired capacity
//! and carrying new builds forward.

use std::fmt;

use serde::{Deserialize, Serialize};

pub use crate::fleet::{Fleet, FleetEntry};

use crate::error::{Error, Result};
use crate::lp::LpProblem;
use crate::network::Network;
use crate::reduction::{aggregate_build_years, disaggregate, exempt_assets};
use crate::solver::{LpBackend, LpSolution, SolveOptions, SolveStatus};
use crate::translate::{translate, DispatchResult, Translation};

/// Built capacity below this many MW is not carried forward.
pub const CARRY_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordSense {
    Optimal,
    Min,
    Max,
}

impl RecordSense {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordSense::Optimal => "optimal",
            RecordSense::Min => "min",
            RecordSense::Max => "max",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "optimal" => Some(RecordSense::Optimal),
            "min" => Some(RecordSense::Min),
            "max" => Some(RecordSense::Max),
            _ => None,
        }
    }
}

impl fmt::Display for RecordSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one horizon solve. Solver statuses plus `crashed` for a worker that panicked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
    Timeout,
    Crashed,
}

impl From<SolveStatus> for RecordStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Optimal => RecordStatus::Optimal,
            SolveStatus::Infeasible => RecordStatus::Infeasible,
            SolveStatus::Unbounded => RecordStatus::Unbounded,
            SolveStatus::NumericalFailure => RecordStatus::NumericalFailure,
            SolveStatus::Timeout => RecordStatus::Timeout,
        }
    }
}

impl RecordStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordStatus::Optimal => "optimal",
            RecordStatus::Infeasible => "infeasible",
            RecordStatus::Unbounded => "unbounded",
            RecordStatus::NumericalFailure => "numerical_failure",
            RecordStatus::Timeout => "timeout",
            RecordStatus::Crashed => "crashed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "crashed" {
            return Some(RecordStatus::Crashed);
        }
        SolveStatus::parse(s).map(Into::into)
    }
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathwayRecord {
    pub scenario_id: String,
    pub horizon: i32,
    pub sense: RecordSense,
    /// Cost slack; `None` for the cost-optimal sense.
    pub epsilon: Option<f64>,
    pub status: RecordStatus,
    /// System cost of the horizon, EUR/a: annualised new capital plus operation.
    pub cost: Option<f64>,
    /// Electrolytic hydrogen, Mt/a.
    pub h2_mt: Option<f64>,
    /// d(h*)/d(budget) in MWh per EUR; extremal senses only.
    pub mu_raw: Option<f64>,
}

impl PathwayRecord {
    pub fn failed(
        scenario_id: &str,
        horizon: i32,
        sense: RecordSense,
        epsilon: Option<f64>,
        status: RecordStatus,
    ) -> Self {
        PathwayRecord {
            scenario_id: scenario_id.to_string(),
            horizon,
            sense,
            epsilon,
            status,
            cost: None,
            h2_mt: None,
            mu_raw: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == RecordStatus::Optimal
    }
}

/// Entries active at `horizon`.
pub fn phase_out(fleet: &Fleet, horizon: i32) -> Fleet {
    Fleet { entries: fleet.entries.iter().filter(|e| e.active_at(horizon)).cloned().collect() }
}

/// Append capacity built in `previous` (with parameters frozen from `network`, the network of
/// that horizon), then phase out at `horizon`.
pub fn carry_over(previous: &DispatchResult, network: &Network, fleet: &Fleet, horizon: i32) -> Result<Fleet> {
    let mut next = fleet.clone();
    for (asset_id, &built) in &previous.new_capacity {
        if built < -CARRY_THRESHOLD || !built.is_finite() {
            return Err(Error::Internal(format!("asset '{asset_id}': negative built capacity {built}")));
        }
        if built <= CARRY_THRESHOLD {
            continue;
        }
        let asset = network
            .asset(asset_id)
            .ok_or_else(|| Error::Internal(format!("built asset '{asset_id}' not in network")))?;
        next.entries.push(FleetEntry::from_asset(asset, network.discount_rate, previous.year, built, asset.lifetime)?);
    }
    Ok(phase_out(&next, horizon))
}

pub type NetworkSource<'a> = dyn Fn(i32) -> Result<Network> + Send + Sync + 'a;

#[derive(Clone, Debug, PartialEq)]
pub struct PathwayOptions {
    pub solve: SolveOptions,
    /// Merge parameter- and expiry-identical fleet entries before each solve.
    pub aggregate: bool,
}

impl Default for PathwayOptions {
    fn default() -> Self {
        PathwayOptions { solve: SolveOptions::default(), aggregate: true }
    }
}

#[derive(Clone, Debug)]
pub struct HorizonOutcome {
    pub record: PathwayRecord,
    pub result: Option<DispatchResult>,
    /// Fleet in place at this horizon, before its own builds.
    pub fleet: Fleet,
}

#[derive(Clone, Debug, Default)]
pub struct PathwayRun {
    pub outcomes: Vec<HorizonOutcome>,
}

impl PathwayRun {
    pub fn records(&self) -> Vec<PathwayRecord> {
        self.outcomes.iter().map(|o| o.record.clone()).collect()
    }

    /// First horizon whose solve failed.
    pub fn failed_at(&self) -> Option<i32> {
        self.outcomes.iter().find(|o| !o.record.is_optimal()).map(|o| o.record.horizon)
    }

    pub fn outcome(&self, horizon: i32) -> Option<&HorizonOutcome> {
        self.outcomes.iter().find(|o| o.record.horizon == horizon)
    }

    /// Optimal cost at `horizon`, if that horizon solved.
    pub fn optimum(&self, horizon: i32) -> Option<f64> {
        self.outcome(horizon).filter(|o| o.record.is_optimal()).and_then(|o| o.record.cost)
    }
}

/// What a lineage solves at one horizon, given that horizon's translation.
pub(crate) struct StepSolve {
    pub solution: LpSolution,
    pub mu: Option<f64>,
}

/// Everything needed to run lineages for one scenario.
pub struct Planner<'a> {
    pub networks: &'a NetworkSource<'a>,
    pub initial_fleet: Fleet,
    pub backend: &'a dyn LpBackend,
    pub options: PathwayOptions,
    pub scenario_id: String,
}

pub(crate) fn check_horizons(horizons: &[i32]) -> Result<()> {
    if horizons.is_empty() {
        return Err(Error::InvalidArgument("no planning horizons given".into()));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!("horizons must be strictly increasing: {horizons:?}")));
    }
    Ok(())
}

impl Planner<'_> {
    pub fn solve(&self, problem: &LpProblem) -> LpSolution {
        self.backend.solve(problem, &self.options.solve)
    }

    /// Solve one lineage. `step` turns each horizon's translation into a solution; the chain
    /// stops at the first non-optimal horizon.
    pub(crate) fn run_chain(
        &self,
        horizons: &[i32],
        sense: RecordSense,
        epsilon: Option<f64>,
        mut step: impl FnMut(i32, &Translation) -> Result<StepSolve>,
    ) -> Result<PathwayRun> {
        check_horizons(horizons)?;
        let mut run = PathwayRun::default();
        let mut fleet = self.initial_fleet.clone();
        let mut previous: Option<(DispatchResult, Network)> = None;
        for &year in horizons {
            fleet = match &previous {
                Some((res, net)) => carry_over(res, net, &fleet, year)?,
                None => phase_out(&fleet, year),
            };
            let network = (self.networks)(year)?;
            let (solve_fleet, map) = if self.options.aggregate {
                let (agg, map) = aggregate_build_years(&fleet, &exempt_assets(&network));
                (agg, Some(map))
            } else {
                (fleet.clone(), None)
            };
            let tr = translate(&network, &solve_fleet)?;
            let StepSolve { solution, mu } = step(year, &tr)?;
            if !solution.is_optimal() {
                log::info!("{} {sense} ε={epsilon:?}: horizon {year} {}", self.scenario_id, solution.status);
                run.outcomes.push(HorizonOutcome {
                    record: PathwayRecord::failed(&self.scenario_id, year, sense, epsilon, solution.status.into()),
                    result: None,
                    fleet,
                });
                break;
            }
            let mut result = tr.extract(&network, &solution)?;
            if let Some(map) = &map {
                result = disaggregate(&result, map);
            }
            run.outcomes.push(HorizonOutcome {
                record: PathwayRecord {
                    scenario_id: self.scenario_id.clone(),
                    horizon: year,
                    sense,
                    epsilon,
                    status: RecordStatus::Optimal,
                    cost: Some(tr.problem.objective_value(&solution.primal)),
                    h2_mt: Some(result.h2_mt),
                    mu_raw: mu,
                },
                result: Some(result.clone()),
                fleet: fleet.clone(),
            });
            previous = Some((result, network));
        }
        Ok(run)
    }

    /// Cost-optimal myopic pathway.
    pub fn run_optimal(&self, horizons: &[i32]) -> Result<PathwayRun> {
        self.run_chain(horizons, RecordSense::Optimal, None, |_, tr| {
            Ok(StepSolve { solution: self.solve(&tr.problem), mu: None })
        })
    }
}
