use crate::error::{Error, Result};
use crate::sim::{FactorGrid, Simulator, StreamKey};

use super::{ReportRow, Sampler, Strategy, StrategyReport};

/// Equal allocation: every active condition gets `runs_per_condition`
/// replications.
pub fn run_brute_force<S: Simulator + ?Sized>(
    sim: &S,
    grid: &FactorGrid,
    runs_per_condition: u64,
    confidence: f64,
    key: StreamKey,
) -> Result<StrategyReport> {
    if runs_per_condition < 2 {
        return Err(Error::alloc("runs_per_condition", "must be at least 2"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::alloc("confidence", "must lie in (0, 1)"));
    }
    let mut sampler = Sampler::new(sim, key, grid.active());
    sampler.run_all(runs_per_condition);

    let rows = grid
        .active()
        .iter()
        .zip(sampler.estimates())
        .map(|(cond, est)| {
            Ok(ReportRow {
                label: cond.label.clone(),
                mean: est.mean(),
                ci_width: est.ci_width(confidence)?,
                runs: est.count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StrategyReport {
        strategy: Strategy::BruteForce,
        rows,
        total_runs: sampler.total_runs(),
        model: None,
        status: None,
    })
}
