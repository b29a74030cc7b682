//! Allocation strategies: how many replications each treatment condition
//! receives, and when to stop.

mod brute;
mod greedy;
mod model;
mod sampler;

use std::fmt;

pub use brute::run_brute_force;
pub use greedy::run_greedy;
pub use model::run_model_greedy;
pub use sampler::Sampler;

use crate::error::{Error, Result};
use crate::stats::RegressionModel;

/// The four strategies an experiment can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    BruteForce,
    Greedy,
    ModelGreedy,
    ModelGreedyNoInteraction,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::BruteForce,
        Strategy::Greedy,
        Strategy::ModelGreedy,
        Strategy::ModelGreedyNoInteraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::BruteForce => "brute_force",
            Strategy::Greedy => "greedy",
            Strategy::ModelGreedy => "model_greedy",
            Strategy::ModelGreedyNoInteraction => "model_greedy_no_interaction",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| {
                Error::config(
                    "strategies",
                    format!(
                        "unknown strategy `{name}` (expected one of brute_force, greedy, model_greedy, model_greedy_no_interaction)"
                    ),
                )
            })
    }

    pub fn is_adaptive(self) -> bool {
        self != Strategy::BruteForce
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What the model-based loop compares against `ci_threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StoppingRule {
    /// Largest model-based interval width.
    #[default]
    CiWidth,
    /// Largest absolute gap between the model mean and the sample mean of a
    /// condition.
    MeanDiscrepancy,
}

/// Where the model-based loop puts each batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchMode {
    /// One batch to the condition with the widest model interval.
    #[default]
    Selected,
    /// One batch to every condition per iteration.
    AllConditions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationConfig {
    /// Replications per condition in the initial sweep.
    pub initial_runs: u64,
    pub batch_size: u64,
    pub ci_threshold: f64,
    pub confidence: f64,
    /// Upper bound on total replications, sweep included.
    pub budget_cap: Option<u64>,
    /// Model-based only.
    pub with_interaction: bool,
    /// Model-based only.
    pub stopping: StoppingRule,
    /// Model-based only.
    pub batch_mode: BatchMode,
}

impl Default for AllocationConfig {
    fn default() -> Self {
        AllocationConfig {
            initial_runs: 100,
            batch_size: 50,
            ci_threshold: 4.0,
            confidence: 0.95,
            budget_cap: None,
            with_interaction: true,
            stopping: StoppingRule::CiWidth,
            batch_mode: BatchMode::Selected,
        }
    }
}

impl AllocationConfig {
    pub fn validate(&self, n_conditions: usize) -> Result<()> {
        if self.initial_runs < 2 {
            return Err(Error::alloc("initial_runs", "must be at least 2"));
        }
        if self.batch_size < 1 {
            return Err(Error::alloc("batch_size", "must be at least 1"));
        }
        if !(self.ci_threshold.is_finite() && self.ci_threshold > 0.0) {
            return Err(Error::alloc("ci_threshold", "must be positive and finite"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::alloc("confidence", "must lie in (0, 1)"));
        }
        if let Some(cap) = self.budget_cap {
            let sweep = n_conditions as u64 * self.initial_runs;
            if cap < sweep {
                return Err(Error::alloc(
                    "budget_cap",
                    format!("{cap} is smaller than the initial sweep of {sweep} runs"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    Converged,
    BudgetExhausted,
}

impl fmt::Display for TerminalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalStatus::Converged => "converged",
            TerminalStatus::BudgetExhausted => "budget_exhausted",
        })
    }
}

/// One batch assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 1-based loop iteration.
    pub iteration: usize,
    /// Index into the active conditions; `None` when the batch went to every
    /// condition.
    pub condition: Option<usize>,
    pub label: String,
    /// Replications added by this record.
    pub batch_size: u64,
    /// Per-condition widths after the batch.
    pub widths: Vec<f64>,
    /// Stopping metric after the batch.
    pub metric: f64,
    pub total_runs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationTrace {
    /// Total runs after the initial sweep.
    pub sweep_total: u64,
    /// Per-condition widths after the initial sweep.
    pub sweep_widths: Vec<f64>,
    pub sweep_metric: f64,
    pub records: Vec<TraceRecord>,
    pub status: TerminalStatus,
}

impl AllocationTrace {
    /// Widths the decision of record `i` was based on.
    pub fn pre_batch_widths(&self, i: usize) -> &[f64] {
        if i == 0 {
            &self.sweep_widths
        } else {
            &self.records[i - 1].widths
        }
    }

    pub fn final_widths(&self) -> &[f64] {
        self.records
            .last()
            .map_or(&self.sweep_widths, |r| &r.widths)
    }

    pub fn total_runs(&self) -> u64 {
        self.records.last().map_or(self.sweep_total, |r| r.total_runs)
    }
}

/// One table row: a condition's estimate and its replication count.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub mean: f64,
    pub ci_width: f64,
    pub runs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    pub strategy: Strategy,
    /// Active conditions in grid order.
    pub rows: Vec<ReportRow>,
    pub total_runs: u64,
    pub model: Option<RegressionModel>,
    /// `None` for brute force, which has no stopping rule.
    pub status: Option<TerminalStatus>,
}

impl StrategyReport {
    pub fn max_ci_width(&self) -> f64 {
        self.rows.iter().map(|r| r.ci_width).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_ci_width(&self) -> f64 {
        self.rows.iter().map(|r| r.ci_width).sum::<f64>() / self.rows.len() as f64
    }
}

/// Index of the widest interval; ties go to the lowest index and NaN
/// (undefined) widths count as +inf.
pub fn select_max_ci(widths: &[f64]) -> Result<usize> {
    let key = |w: f64| if w.is_nan() { f64::INFINITY } else { w };
    let (first, rest) = widths.split_first().ok_or(Error::EmptyEstimates)?;
    let mut best = (0, key(*first));
    for (i, &w) in rest.iter().enumerate() {
        if key(w) > best.1 {
            best = (i + 1, key(w));
        }
    }
    Ok(best.0)
}
