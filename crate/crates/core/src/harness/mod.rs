//! Experiment orchestration: load a configuration, run the selected
//! strategies on independent random streams, write CSV reports.

mod config;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use config::{
    load_config, parse_config, BruteForceConfig, ExperimentConfig, SimulatorConfig,
    DEFAULT_BRUTE_FORCE_RUNS, DEFAULT_MASTER_SEED, DEFAULT_OUT_DIR,
};

use crate::alloc::{
    run_brute_force, run_greedy, run_model_greedy, AllocationTrace, Strategy, StrategyReport,
};
use crate::error::{Error, Result};
use crate::sim::{FactorGrid, OudSimulator, Simulator, StreamKey, TreatmentCondition};

#[derive(Debug, Clone)]
pub struct StrategyOutcome {
    pub strategy: Strategy,
    pub report: StrategyReport,
    /// Present for the adaptive strategies.
    pub trace: Option<AllocationTrace>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    /// Active conditions, in report row order.
    pub conditions: Vec<TreatmentCondition>,
    pub outcomes: Vec<StrategyOutcome>,
}

impl ReportBundle {
    pub fn outcome(&self, strategy: Strategy) -> Option<&StrategyOutcome> {
        self.outcomes.iter().find(|o| o.strategy == strategy)
    }
}

pub fn build_simulator(config: &SimulatorConfig, grid: &FactorGrid) -> Result<Box<dyn Simulator>> {
    Ok(match config {
        SimulatorConfig::Oud(params) => Box::new(OudSimulator::new(*params, grid)?),
        SimulatorConfig::Linear(lin) => Box::new(*lin),
    })
}

fn run_strategy(
    strategy: Strategy,
    sim: &dyn Simulator,
    grid: &FactorGrid,
    config: &ExperimentConfig,
) -> Result<StrategyOutcome> {
    let key = StreamKey::derive(config.master_seed, strategy.name());
    let start = Instant::now();
    let (report, trace) = match strategy {
        Strategy::BruteForce => {
            let bf = config.brute_force;
            let report = run_brute_force(sim, grid, bf.runs_per_condition, bf.confidence, key)?;
            (report, None)
        }
        Strategy::Greedy => {
            let (r, t) = run_greedy(sim, grid, &config.greedy, key)?;
            (r, Some(t))
        }
        Strategy::ModelGreedy | Strategy::ModelGreedyNoInteraction => {
            let alloc = config.allocation(strategy).expect("adaptive strategy");
            let (r, t) = run_model_greedy(sim, grid, alloc, key)?;
            (r, Some(t))
        }
    };
    Ok(StrategyOutcome {
        strategy,
        report,
        trace,
        wall_time: start.elapsed(),
    })
}

/// Runs every selected strategy without touching the filesystem.
pub fn execute(config: &ExperimentConfig) -> Result<ReportBundle> {
    config.validate()?;
    let grid = config.build_grid()?;
    let sim = build_simulator(&config.simulator, &grid)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    let outcomes = pool.install(|| -> Result<Vec<StrategyOutcome>> {
        if config.parallel_strategies {
            config
                .strategies
                .par_iter()
                .map(|&s| run_strategy(s, sim.as_ref(), &grid, config))
                .collect()
        } else {
            config
                .strategies
                .iter()
                .map(|&s| run_strategy(s, sim.as_ref(), &grid, config))
                .collect()
        }
    })?;
    Ok(ReportBundle {
        conditions: grid.active().to_vec(),
        outcomes,
    })
}

/// Writes `files` under `dir`; on any failure the files already written are
/// removed again.
fn write_all(dir: &Path, files: Vec<(String, String)>) -> Result<Vec<PathBuf>> {
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        for (rel, contents) in files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            for path in &written {
                let _ = fs::remove_file(path);
            }
            Err(e)
        }
    }
}

/// Writes the plot-data files of a bundle under `dir/plotdata/`.
pub fn emit_plot_data(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    write_all(dir, report::plot_files(bundle))
}

/// Writes per-strategy tables, traces, the summary, timings and plot data.
/// An empty bundle writes nothing.
pub fn write_bundle(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    if bundle.outcomes.is_empty() {
        return Ok(Vec::new());
    }
    let mut files = Vec::new();
    for o in &bundle.outcomes {
        files.push((
            format!("{}.csv", o.strategy),
            report::render_strategy_table(&o.report),
        ));
        if let Some(trace) = &o.trace {
            files.push((
                format!("{}_trace.csv", o.strategy),
                report::render_trace(trace, &bundle.conditions),
            ));
        }
    }
    files.push(("summary.csv".into(), report::render_summary(&bundle.outcomes)));
    files.push(("timing.txt".into(), report::render_timing(&bundle.outcomes)));
    files.extend(report::plot_files(bundle));
    write_all(dir, files)
}

/// Runs the experiment and writes its reports to `config.out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportBundle> {
    let bundle = execute(config)?;
    write_bundle(&bundle, &config.out_dir)?;
    Ok(bundle)
}

/// Expected outcome at every grid cell, `(condition, value)`. For the OUD
/// surrogate this is the cohort recursion; for the linear surface it is the
/// noiseless mean.
pub fn oracle_table(config: &ExperimentConfig) -> Result<Vec<(TreatmentCondition, f64)>> {
    let grid = config.build_grid()?;
    let conditions = grid.all_conditions();
    Ok(match &config.simulator {
        SimulatorConfig::Oud(params) => {
            let sim = OudSimulator::new(*params, &grid)?;
            conditions
                .into_iter()
                .map(|c| {
                    let v = sim.expected(&c);
                    (c, v)
                })
                .collect()
        }
        SimulatorConfig::Linear(lin) => conditions
            .into_iter()
            .map(|c| {
                let v = lin.mean(&c);
                (c, v)
            })
            .collect(),
    })
}
