//! Near-optimal pathway analysis for linear capacity-expansion energy models.
//!
//! The crate is organised bottom-up:
//!
//! - [`network`]: single-horizon model types, the JSON model document and unit helpers.
//! - [`lp`]: the standard-form [`LpProblem`] and MPS interchange.
//! - [`solver`]: the reference bounded revised simplex and KKT verification.
//! - [`translate`]: network + fleet to LP, and LP solution back to a [`DispatchResult`].
//! - [`pathway`]: myopic multi-horizon cost optimisation with capacity carry-over.
//! - [`mga`]: ε-near-optimal extremisation of electrolytic hydrogen output along lineages.
//! - [`scenarios`]: setting categories, schedules, scenario application and the matrix runner.
//! - [`analysis`]: robust corridors, sensitivity regression, subsidy estimation and reports.
//! - [`reduction`]: temporal segmentation and build-year aggregation.

pub mod analysis;
pub mod error;
pub mod fixture;
pub mod fleet;
pub mod lp;
pub mod mga;
pub mod network;
pub mod pathway;
pub mod reduction;
pub mod scenarios;
pub mod solver;
pub mod translate;

pub use analysis::{corridor, quantile_corridor, sensitivity, subsidy, tapering_point, Interval, IntervalSet};
pub use error::{Error, Result};
pub use fleet::{Fleet, FleetEntry, FrozenParams};
pub use lp::{LpProblem, RowSense};
pub use mga::{MgaSense, SlackSpec};
pub use network::{annuity, build_network, build_network_at, lhv_mt_to_twh, lhv_twh_to_mt, ModelDocument, Network};
pub use pathway::{PathwayRecord, PathwayRun, Planner, RecordSense, RecordStatus};
pub use scenarios::{
    enumerate_scenarios, run_matrix, MatrixConfig, ResultsStore, RunManifest, Scenario, ScenarioSet, Schedule,
};
pub use solver::{LpBackend, LpSolution, RevisedSimplex, SolveOptions, SolveStatus};
pub use translate::{translate, DispatchResult, Translation};
