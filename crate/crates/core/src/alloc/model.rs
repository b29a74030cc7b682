use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sim::{FactorGrid, Simulator, StreamKey};
use crate::stats::{fit_grouped, predict_with_ci, ConditionEstimate, Prediction, RegressionModel};

use super::{
    select_max_ci, AllocationConfig, AllocationTrace, BatchMode, ReportRow, Sampler,
    StoppingRule, Strategy, StrategyReport, TerminalStatus, TraceRecord,
};

struct Evaluation {
    model: RegressionModel,
    predictions: Vec<Prediction>,
    widths: Vec<f64>,
    metric: f64,
}

fn evaluate(
    grid: &FactorGrid,
    estimates: &[ConditionEstimate],
    config: &AllocationConfig,
) -> Result<Evaluation> {
    let groups: Vec<_> = grid
        .active()
        .iter()
        .zip(estimates)
        .map(|(c, e)| (c.x1(), c.x2(), *e))
        .collect();
    let model = fit_grouped(&groups, config.with_interaction)?;
    let predictions = grid
        .active()
        .iter()
        .map(|c| predict_with_ci(&model, c, config.confidence))
        .collect::<Result<Vec<_>>>()?;
    let widths: Vec<f64> = predictions.iter().map(|p| p.ci_width).collect();
    let metric = match config.stopping {
        StoppingRule::CiWidth => widths.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        StoppingRule::MeanDiscrepancy => predictions
            .iter()
            .zip(estimates)
            .map(|(p, e)| (p.mean - e.mean()).abs())
            .fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(Evaluation {
        model,
        predictions,
        widths,
        metric,
    })
}

fn check_design(grid: &FactorGrid, with_interaction: bool) -> Result<()> {
    let distinct = |f: fn(&crate::sim::TreatmentCondition) -> usize| {
        grid.active().iter().map(f).collect::<BTreeSet<_>>().len()
    };
    if distinct(|c| c.buprenorphine_index) < 2 {
        return Err(Error::SingularDesign(
            "active conditions use a single buprenorphine level, so x1 is not identifiable".into(),
        ));
    }
    if distinct(|c| c.naloxone_index) < 2 {
        return Err(Error::SingularDesign(
            "active conditions use a single naloxone level, so x2 is not identifiable".into(),
        ));
    }
    let needed = crate::stats::n_params(with_interaction);
    if grid.active().len() < needed {
        return Err(Error::SingularDesign(format!(
            "{} active conditions cannot identify {needed} coefficients",
            grid.active().len()
        )));
    }
    Ok(())
}

/// Greedy allocation driven by a regression surface fitted across all
/// conditions. Reported means and widths are the model's; run counts are the
/// raw per-condition replications.
pub fn run_model_greedy<S: Simulator + ?Sized>(
    sim: &S,
    grid: &FactorGrid,
    config: &AllocationConfig,
    key: StreamKey,
) -> Result<(StrategyReport, AllocationTrace)> {
    config.validate(grid.active().len())?;
    check_design(grid, config.with_interaction)?;

    let n_conditions = grid.active().len();
    let mut sampler = Sampler::new(sim, key, grid.active());
    sampler.run_all(config.initial_runs);

    let mut eval = evaluate(grid, sampler.estimates(), config)?;
    let mut trace = AllocationTrace {
        sweep_total: sampler.total_runs(),
        sweep_widths: eval.widths.clone(),
        sweep_metric: eval.metric,
        records: Vec::new(),
        status: TerminalStatus::Converged,
    };

    loop {
        if eval.metric < config.ci_threshold {
            trace.status = TerminalStatus::Converged;
            break;
        }
        let (targets, label) = match config.batch_mode {
            BatchMode::Selected => {
                let chosen = select_max_ci(&eval.widths)?;
                (vec![chosen], Some(chosen))
            }
            BatchMode::AllConditions => ((0..n_conditions).collect(), None),
        };
        let added = config.batch_size * targets.len() as u64;
        if config
            .budget_cap
            .is_some_and(|cap| sampler.total_runs() + added > cap)
        {
            trace.status = TerminalStatus::BudgetExhausted;
            break;
        }
        sampler.run(&targets, config.batch_size);
        eval = evaluate(grid, sampler.estimates(), config)?;
        trace.records.push(TraceRecord {
            iteration: trace.records.len() + 1,
            condition: label,
            label: label.map_or_else(|| "ALL".to_string(), |i| grid.active()[i].label.clone()),
            batch_size: added,
            widths: eval.widths.clone(),
            metric: eval.metric,
            total_runs: sampler.total_runs(),
        });
    }

    let rows = grid
        .active()
        .iter()
        .zip(sampler.estimates())
        .zip(&eval.predictions)
        .map(|((cond, est), pred)| ReportRow {
            label: cond.label.clone(),
            mean: pred.mean,
            ci_width: pred.ci_width,
            runs: est.count(),
        })
        .collect();
    let strategy = if config.with_interaction {
        Strategy::ModelGreedy
    } else {
        Strategy::ModelGreedyNoInteraction
    };
    let report = StrategyReport {
        strategy,
        rows,
        total_runs: sampler.total_runs(),
        model: Some(eval.model),
        status: Some(trace.status),
    };
    Ok((report, trace))
}
