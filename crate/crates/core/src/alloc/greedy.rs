use crate::error::Result;
use crate::sim::{FactorGrid, Simulator, StreamKey};

use super::{
    select_max_ci, AllocationConfig, AllocationTrace, ReportRow, Sampler, Strategy,
    StrategyReport, TerminalStatus, TraceRecord,
};

fn max_width(widths: &[f64]) -> f64 {
    widths.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Sweep every condition with `initial_runs`, then keep giving `batch_size`
/// replications to the condition with the widest interval until every width
/// is below `ci_threshold` or the budget cap would be exceeded.
pub fn run_greedy<S: Simulator + ?Sized>(
    sim: &S,
    grid: &FactorGrid,
    config: &AllocationConfig,
    key: StreamKey,
) -> Result<(StrategyReport, AllocationTrace)> {
    config.validate(grid.active().len())?;
    let mut sampler = Sampler::new(sim, key, grid.active());
    sampler.run_all(config.initial_runs);

    let sweep_widths = sampler.widths(config.confidence);
    let mut trace = AllocationTrace {
        sweep_total: sampler.total_runs(),
        sweep_metric: max_width(&sweep_widths),
        sweep_widths,
        records: Vec::new(),
        status: TerminalStatus::Converged,
    };

    loop {
        let widths = trace.final_widths();
        if max_width(widths) < config.ci_threshold {
            trace.status = TerminalStatus::Converged;
            break;
        }
        let total = sampler.total_runs();
        if config
            .budget_cap
            .is_some_and(|cap| total + config.batch_size > cap)
        {
            trace.status = TerminalStatus::BudgetExhausted;
            break;
        }
        let chosen = select_max_ci(widths)?;
        sampler.run(&[chosen], config.batch_size);
        let widths = sampler.widths(config.confidence);
        trace.records.push(TraceRecord {
            iteration: trace.records.len() + 1,
            condition: Some(chosen),
            label: grid.active()[chosen].label.clone(),
            batch_size: config.batch_size,
            metric: max_width(&widths),
            widths,
            total_runs: sampler.total_runs(),
        });
    }

    let rows = grid
        .active()
        .iter()
        .zip(sampler.estimates())
        .zip(trace.final_widths())
        .map(|((cond, est), &w)| ReportRow {
            label: cond.label.clone(),
            mean: est.mean(),
            ci_width: w,
            runs: est.count(),
        })
        .collect();
    let report = StrategyReport {
        strategy: Strategy::Greedy,
        rows,
        total_runs: sampler.total_runs(),
        model: None,
        status: Some(trace.status),
    };
    Ok((report, trace))
}
