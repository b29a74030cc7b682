//! TOML experiment configuration.
//!
//! Every key is optional; `configs/experiment.toml` at the repository root
//! documents each one with its default.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::alloc::{AllocationConfig, BatchMode, StoppingRule, Strategy};
use crate::error::{Error, Result};
use crate::sim::{build_grid, ActiveSet, FactorGrid, GridSpec, LinearSurfaceSimulator, SimParams};

pub const DEFAULT_MASTER_SEED: u64 = 20_160_101;
pub const DEFAULT_OUT_DIR: &str = "results";
pub const DEFAULT_BRUTE_FORCE_RUNS: u64 = 500;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    master_seed: Option<u64>,
    out_dir: Option<PathBuf>,
    strategies: Option<Vec<String>>,
    threads: Option<usize>,
    parallel_strategies: Option<bool>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    simulator: RawSimulator,
    #[serde(default)]
    brute_force: RawBruteForce,
    #[serde(default)]
    greedy: RawAllocation,
    #[serde(default)]
    model_greedy: RawAllocation,
    #[serde(default)]
    model_greedy_no_interaction: RawAllocation,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    naloxone_levels: Option<Vec<String>>,
    buprenorphine_levels: Option<Vec<String>>,
    active: Option<RawActive>,
    active_rows: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawActive {
    Keyword(String),
    Cells(Vec<String>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulator {
    kind: Option<String>,
    #[serde(default)]
    params: SimParams,
    #[serde(default)]
    linear: RawLinear,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawLinear {
    beta: [f64; 4],
    noise_sd: f64,
}

impl Default for RawLinear {
    fn default() -> Self {
        RawLinear {
            beta: [2400.0, -15.0, -7.0, 0.5],
            noise_sd: 50.0,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBruteForce {
    runs_per_condition: Option<u64>,
    confidence: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAllocation {
    initial_runs: Option<u64>,
    batch_size: Option<u64>,
    ci_threshold: Option<f64>,
    confidence: Option<f64>,
    budget_cap: Option<u64>,
    stopping: Option<String>,
    batch_mode: Option<String>,
}

/// Which simulator backs the experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum SimulatorConfig {
    Oud(SimParams),
    Linear(LinearSurfaceSimulator),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceConfig {
    pub runs_per_condition: u64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub simulator: SimulatorConfig,
    pub brute_force: BruteForceConfig,
    pub greedy: AllocationConfig,
    pub model_greedy: AllocationConfig,
    pub model_greedy_no_interaction: AllocationConfig,
    pub strategies: Vec<Strategy>,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads for replications; 0 lets rayon decide.
    pub threads: usize,
    pub parallel_strategies: bool,
}

impl ExperimentConfig {
    pub fn allocation(&self, strategy: Strategy) -> Option<&AllocationConfig> {
        match strategy {
            Strategy::BruteForce => None,
            Strategy::Greedy => Some(&self.greedy),
            Strategy::ModelGreedy => Some(&self.model_greedy),
            Strategy::ModelGreedyNoInteraction => Some(&self.model_greedy_no_interaction),
        }
    }

    pub fn build_grid(&self) -> Result<FactorGrid> {
        build_grid(&self.grid).map_err(|e| Error::config("grid", e.to_string()))
    }

    /// Re-checks every invariant; called after CLI overrides.
    pub fn validate(&self) -> Result<()> {
        let grid = self.build_grid()?;
        match &self.simulator {
            SimulatorConfig::Oud(params) => params
                .validate(grid.max_x1(), grid.max_x2())
                .map_err(|e| rekey(e, "simulator.params"))?,
            SimulatorConfig::Linear(lin) => {
                LinearSurfaceSimulator::new(lin.beta, lin.noise_sd)
                    .map_err(|e| rekey(e, "simulator.linear"))?;
            }
        }
        if self.brute_force.runs_per_condition < 2 {
            return Err(Error::config(
                "brute_force.runs_per_condition",
                "must be at least 2",
            ));
        }
        let c = self.brute_force.confidence;
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::config("brute_force.confidence", "must lie in (0, 1)"));
        }
        for strategy in Strategy::ALL.into_iter().filter(|s| s.is_adaptive()) {
            self.allocation(strategy)
                .expect("adaptive strategies carry a config")
                .validate(grid.active().len())
                .map_err(|e| rekey(e, strategy.name()))?;
        }
        let mut seen = Vec::new();
        for s in &self.strategies {
            if seen.contains(s) {
                return Err(Error::config("strategies", format!("`{s}` listed twice")));
            }
            seen.push(*s);
        }
        Ok(())
    }
}

/// Prefixes the key of a nested validation error with its section.
fn rekey(err: Error, section: &str) -> Error {
    match err {
        Error::InvalidParams { key, reason }
        | Error::InvalidAllocation { key, reason }
        | Error::InvalidConfig { key, reason } => Error::config(format!("{section}.{key}"), reason),
        other => Error::config(section, other.to_string()),
    }
}

fn resolve_allocation(raw: RawAllocation, with_interaction: bool, section: &str) -> Result<AllocationConfig> {
    let d = AllocationConfig::default();
    let stopping = match raw.stopping.as_deref() {
        None | Some("ci_width") => StoppingRule::CiWidth,
        Some("mean_discrepancy") => StoppingRule::MeanDiscrepancy,
        Some(other) => {
            return Err(Error::config(
                format!("{section}.stopping"),
                format!("`{other}` is not one of ci_width, mean_discrepancy"),
            ))
        }
    };
    let batch_mode = match raw.batch_mode.as_deref() {
        None | Some("selected") => BatchMode::Selected,
        Some("all_conditions") => BatchMode::AllConditions,
        Some(other) => {
            return Err(Error::config(
                format!("{section}.batch_mode"),
                format!("`{other}` is not one of selected, all_conditions"),
            ))
        }
    };
    Ok(AllocationConfig {
        initial_runs: raw.initial_runs.unwrap_or(d.initial_runs),
        batch_size: raw.batch_size.unwrap_or(d.batch_size),
        ci_threshold: raw.ci_threshold.unwrap_or(d.ci_threshold),
        confidence: raw.confidence.unwrap_or(d.confidence),
        budget_cap: raw.budget_cap,
        with_interaction,
        stopping,
        batch_mode,
    })
}

/// Parses and validates a configuration document. `origin` is only used in
/// error messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;

    let defaults = GridSpec::default();
    let active = match (raw.grid.active, raw.grid.active_rows) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "grid.active_rows",
                "give either grid.active or grid.active_rows, not both",
            ))
        }
        (None, Some(rows)) => ActiveSet::Rows(rows),
        (None, None) => ActiveSet::Default,
        (Some(RawActive::Cells(cells)), None) => ActiveSet::Cells(cells),
        (Some(RawActive::Keyword(k)), None) => match k.as_str() {
            "default" => ActiveSet::Default,
            "all" => ActiveSet::All,
            other => {
                return Err(Error::config(
                    "grid.active",
                    format!("`{other}` is not `default`, `all` or a list of cell labels"),
                ))
            }
        },
    };
    let grid = GridSpec {
        naloxone_levels: raw.grid.naloxone_levels.unwrap_or(defaults.naloxone_levels),
        buprenorphine_levels: raw
            .grid
            .buprenorphine_levels
            .unwrap_or(defaults.buprenorphine_levels),
        active,
    };

    let simulator = match raw.simulator.kind.as_deref() {
        None | Some("oud") => SimulatorConfig::Oud(raw.simulator.params),
        Some("linear") => SimulatorConfig::Linear(
            LinearSurfaceSimulator::new(raw.simulator.linear.beta, raw.simulator.linear.noise_sd)
                .map_err(|e| rekey(e, "simulator.linear"))?,
        ),
        Some(other) => {
            return Err(Error::config(
                "simulator.kind",
                format!("`{other}` is not one of oud, linear"),
            ))
        }
    };

    let strategies = match raw.strategies {
        None => Strategy::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| Strategy::parse(n))
            .collect::<Result<Vec<_>>>()?,
    };

    let config = ExperimentConfig {
        grid,
        simulator,
        brute_force: BruteForceConfig {
            runs_per_condition: raw
                .brute_force
                .runs_per_condition
                .unwrap_or(DEFAULT_BRUTE_FORCE_RUNS),
            confidence: raw.brute_force.confidence.unwrap_or(0.95),
        },
        greedy: resolve_allocation(raw.greedy, true, "greedy")?,
        model_greedy: resolve_allocation(raw.model_greedy, true, "model_greedy")?,
        model_greedy_no_interaction: resolve_allocation(
            raw.model_greedy_no_interaction,
            false,
            "model_greedy_no_interaction",
        )?,
        strategies,
        master_seed: raw.master_seed.unwrap_or(DEFAULT_MASTER_SEED),
        out_dir: raw.out_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        threads: raw.threads.unwrap_or(0),
        parallel_strategies: raw.parallel_strategies.unwrap_or(false),
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}
