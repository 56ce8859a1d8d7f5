//! `corridor-kit`: run scenario matrices of near-optimal hydrogen pathways and analyse them.
//!
//! Exit codes: 0 on success, 1 for user errors (bad flags, unreadable or invalid input),
//! 2 for internal errors.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use corridor_core::analysis::{
    corridor_table, sensitivity, subsidy_table, write_corridor, write_sensitivity, write_subsidy, ReportOptions,
    SensitivityOptions, CORRIDOR_FILE, SENSITIVITY_FILE, SUBSIDY_FILE,
};
use corridor_core::network::build_network_at;
use corridor_core::pathway::{PathwayOptions, RecordSense};
use corridor_core::reduction::{apply_segmentation_doc, document_series, segment};
use corridor_core::scenarios::{run_matrix, select, MatrixConfig, ResultsStore, RunManifest};
use corridor_core::{Fleet, ModelDocument, RevisedSimplex, ScenarioSet};

#[derive(Parser, Debug)]
#[command(name = "corridor-kit", version, about = "Near-optimal hydrogen pathway matrices and robust corridors")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model (and optionally a scenario file) and print its size.
    Validate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        scenarios: Option<PathBuf>,
    },
    /// Run the optimal pathway and the min/max lineages of every selected scenario.
    Run(RunArgs),
    /// Robust and quantile corridors per horizon from a results store.
    Corridor {
        #[arg(long)]
        store: PathBuf,
        /// Slack to use; defaults to the largest in the store.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.75")]
        quantiles: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regress hydrogen output on the scenario settings.
    Sensitivity {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        scenarios: PathBuf,
        /// Horizons pooled in each fit.
        #[arg(long, value_delimiter = ',', default_value = "2040,2045,2050")]
        horizons: Vec<i32>,
        /// Fit without an intercept term.
        #[arg(long)]
        no_intercept: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Subsidy that makes a hydrogen target cost-optimal, per scenario and on average.
    Subsidy {
        #[arg(long)]
        store: PathBuf,
        /// Target production in Mt/a.
        #[arg(long)]
        target: f64,
        #[arg(long)]
        horizon: i32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce a model to fewer time segments and write it as JSON.
    Reduce {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        segments: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// All report tables (ranges, corridor, flows, sensitivity) for a results store.
    Report {
        #[arg(long)]
        store: PathBuf,
        /// Needed for the sensitivity table.
        #[arg(long)]
        scenarios: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.75")]
        quantiles: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Re-run a manifest written by an earlier run. Other run flags are ignored except --out.
    #[arg(long, conflicts_with_all = ["model", "scenarios"])]
    manifest: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    model: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    scenarios: Option<PathBuf>,
    /// Scenario filter such as `ccs=a+c,weather=a`; all scenarios when absent.
    #[arg(long)]
    select: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.10")]
    epsilons: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2030,2035,2040,2045,2050")]
    horizons: Vec<i32>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Reduce the model to this many time segments first.
    #[arg(long)]
    segments: Option<usize>,
    /// Solve with one fleet entry per build year instead of merging identical ones.
    #[arg(long)]
    no_aggregate: bool,
    /// Also write the annual energy flows of every solved record.
    #[arg(long)]
    flows: bool,
    #[arg(long, required_unless_present = "manifest")]
    out: Option<PathBuf>,
}

fn load_model(path: &Path) -> anyhow::Result<ModelDocument> {
    ModelDocument::load(path).with_context(|| format!("cannot load model {}", path.display()))
}

fn load_scenarios(path: &Path) -> anyhow::Result<ScenarioSet> {
    ScenarioSet::load(path).with_context(|| format!("cannot load scenarios {}", path.display()))
}

fn open_store(path: &Path) -> anyhow::Result<ResultsStore> {
    ResultsStore::open(path).with_context(|| format!("cannot open results store {}", path.display()))
}

fn validate(model: &Path, scenarios: Option<&Path>) -> anyhow::Result<()> {
    let doc = load_model(model)?;
    let net = build_network_at(&doc, doc.year).context("model is invalid")?;
    let fleet = Fleet::from_document(&doc).context("initial fleet is invalid")?;
    println!("model {} (base year {})", doc.name, doc.year);
    println!("  carriers   {}", net.carriers.len());
    println!("  buses      {}", net.buses.len());
    println!("  assets     {}", net.assets.len());
    println!("  limits     {}", net.limits.len());
    println!("  snapshots  {}", net.snapshots.len());
    println!("  fleet      {}", fleet.len());
    if let Some(path) = scenarios {
        let set = load_scenarios(path)?;
        println!("scenarios: {} categories, {} combinations", set.categories.len(), set.enumerate().len());
    }
    Ok(())
}

fn manifest_from(args: &RunArgs) -> anyhow::Result<RunManifest> {
    if let Some(path) = &args.manifest {
        let mut m = RunManifest::load(path).with_context(|| format!("cannot read manifest {}", path.display()))?;
        if let Some(out) = &args.out {
            m.out = out.clone();
        }
        return Ok(m);
    }
    Ok(RunManifest {
        model: args.model.clone().expect("required by clap"),
        scenarios: args.scenarios.clone().expect("required by clap"),
        selection: args.select.clone(),
        epsilons: args.epsilons.clone(),
        horizons: args.horizons.clone(),
        jobs: args.jobs,
        segments: args.segments,
        aggregate: !args.no_aggregate,
        flows: args.flows,
        deterministic: true,
        out: args.out.clone().expect("required by clap"),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

fn run(args: &RunArgs) -> anyhow::Result<()> {
    let manifest = manifest_from(args)?;
    let mut doc = load_model(&manifest.model)?;
    let set = load_scenarios(&manifest.scenarios)?;
    let all = set.enumerate();
    let scenarios = match &manifest.selection {
        Some(sel) => select(&set, &all, sel)?,
        None => all,
    };
    if scenarios.is_empty() {
        bail!("the selection matches no scenario");
    }
    let config = MatrixConfig {
        epsilons: manifest.epsilons.clone(),
        horizons: manifest.horizons.clone(),
        jobs: manifest.jobs,
        options: PathwayOptions { aggregate: manifest.aggregate, ..PathwayOptions::default() },
        flows: manifest.flows,
    };
    config.validate()?;
    if let Some(n) = manifest.segments {
        let seg = segment(&document_series(&doc), &doc.snapshots.weights, n)?;
        doc = apply_segmentation_doc(&doc, &seg)?;
    }

    let store =
        ResultsStore::create(&manifest.out).with_context(|| format!("cannot create {}", manifest.out.display()))?;
    store.write_manifest(&manifest)?;
    log::info!("running {} scenarios", scenarios.len());
    let out = run_matrix(&doc, &set, &scenarios, &config, &RevisedSimplex)?;
    store.write_records(&out.records)?;
    if manifest.flows {
        store.write_flows(&out.flows)?;
    }
    let failed = out.records.iter().filter(|r| !r.is_optimal()).count();
    println!(
        "{} scenarios, {} records ({} failed) written to {}",
        scenarios.len(),
        out.records.len(),
        failed,
        manifest.out.display()
    );
    Ok(())
}

fn corridor(store: &Path, epsilon: Option<f64>, quantiles: Vec<f64>, out: &Path) -> anyhow::Result<()> {
    let records = open_store(store)?.read_records()?;
    fs::create_dir_all(out)?;
    let options = ReportOptions { epsilon, quantiles, ..ReportOptions::default() };
    write_corridor(&records, &options, &out.join(CORRIDOR_FILE))?;
    let eps = epsilon.or_else(|| records.iter().filter_map(|r| r.epsilon).max_by(f64::total_cmp));
    if let Some(eps) = eps {
        let mut horizons: Vec<i32> = records.iter().map(|r| r.horizon).collect();
        horizons.sort_unstable();
        horizons.dedup();
        for row in corridor_table(&records, eps, &horizons, &[])? {
            let robust = row.robust.map_or("empty".to_string(), |i| format!("[{:.6}, {:.6}] Mt", i.lo, i.hi));
            let taper = row.tapering.map(|t| format!(", tapering at {t:.6} Mt")).unwrap_or_default();
            println!(
                "{} ε={eps}: {} scenarios ({} excluded), corridor {robust}{taper}",
                row.horizon, row.scenarios, row.excluded
            );
        }
    }
    Ok(())
}

fn sensitivity_cmd(
    store: &Path,
    scenarios: &Path,
    horizons: Vec<i32>,
    intercept: bool,
    out: &Path,
) -> anyhow::Result<()> {
    let records = open_store(store)?.read_records()?;
    let set = load_scenarios(scenarios)?;
    fs::create_dir_all(out)?;
    let options = ReportOptions { sensitivity_horizons: horizons.clone(), intercept, ..ReportOptions::default() };
    write_sensitivity(&records, Some(&set), &options, &out.join(SENSITIVITY_FILE))?;
    let fit = sensitivity(
        &records,
        &set,
        &SensitivityOptions { sense: RecordSense::Optimal, epsilon: None, horizons, intercept },
    );
    match fit {
        Ok(fit) => {
            for (c, a) in fit.categories.iter().zip(&fit.coefficients) {
                println!("optimal  {c:<14} {a:+.6} Mt");
            }
        }
        Err(e) => println!("optimal fit unavailable: {e}"),
    }
    Ok(())
}

fn subsidy_cmd(store: &Path, target: f64, horizon: i32, out: &Path) -> anyhow::Result<()> {
    let records = open_store(store)?.read_records()?;
    let table = subsidy_table(&records, target, horizon)?;
    fs::create_dir_all(out)?;
    write_subsidy(&table, &out.join(SUBSIDY_FILE))?;
    match (table.mean_eur_per_kg, table.mean_volume_eur) {
        (Some(t), Some(v)) => println!(
            "{target} Mt at {horizon}: {t:.4} EUR/kg, {v:.4e} EUR/a over {} scenarios ({} excluded)",
            table.per_scenario.len(),
            table.excluded.len()
        ),
        _ => println!("no scenario has a complete ladder at {horizon}"),
    }
    Ok(())
}

fn reduce(model: &Path, segments: usize, out: &Path) -> anyhow::Result<()> {
    let doc = load_model(model)?;
    let seg = segment(&document_series(&doc), &doc.snapshots.weights, segments)?;
    let reduced = apply_segmentation_doc(&doc, &seg)?;
    fs::create_dir_all(out)?;
    let file = out.join(model.file_name().unwrap_or("model.json".as_ref()));
    fs::write(&file, reduced.to_json() + "\n")?;
    println!("{} snapshots -> {} segments, written to {}", doc.snapshots.weights.len(), seg.len(), file.display());
    Ok(())
}

fn report(
    store: &Path,
    scenarios: Option<&Path>,
    epsilon: Option<f64>,
    quantiles: Vec<f64>,
    out: &Path,
) -> anyhow::Result<()> {
    let store = open_store(store)?;
    let set = scenarios.map(load_scenarios).transpose()?;
    let options = ReportOptions { epsilon, quantiles, ..ReportOptions::default() };
    let files = corridor_core::analysis::report(&store, set.as_ref(), &options, out)?;
    for f in [files.ranges, files.corridor, files.flows, files.sensitivity] {
        println!("{}", f.display());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Validate { model, scenarios } => validate(&model, scenarios.as_deref()),
        Command::Run(args) => run(&args),
        Command::Corridor { store, epsilon, quantiles, out } => corridor(&store, epsilon, quantiles, &out),
        Command::Sensitivity { store, scenarios, horizons, no_intercept, out } => {
            sensitivity_cmd(&store, &scenarios, horizons, !no_intercept, &out)
        }
        Command::Subsidy { store, target, horizon, out } => subsidy_cmd(&store, target, horizon, &out),
        Command::Reduce { model, segments, out } => reduce(&model, segments, &out),
        Command::Report { store, scenarios, epsilon, quantiles, out } => {
            report(&store, scenarios.as_deref(), epsilon, quantiles, &out)
        }
    }
}

fn is_internal(err: &anyhow::Error) -> bool {
    err.chain().any(|e| matches!(e.downcast_ref::<corridor_core::Error>(), Some(corridor_core::Error::Internal(_))))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    match catch_unwind(AssertUnwindSafe(|| dispatch(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_internal(&e) { 2 } else { 1 })
        }
        Err(_) => {
            eprintln!("error: internal failure (panic)");
            ExitCode::from(2)
        }
    }
}
