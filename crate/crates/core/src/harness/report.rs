//! CSV rendering. Tables round to two decimals; trace and plot files keep
//! full (shortest round-trip) precision.

use std::fmt::Write as _;

use crate::alloc::{AllocationTrace, StrategyReport};
use crate::sim::TreatmentCondition;

use super::{ReportBundle, StrategyOutcome};

pub const TABLE_HEADER: &str = "TC,Mean,CI width,number of runs";
pub const SUMMARY_HEADER: &str = "strategy,total_runs,max_ci_width,mean_ci_width,status";

/// Per-condition table with a closing total row.
pub fn render_strategy_table(report: &StrategyReport) -> String {
    let mut out = String::new();
    writeln!(out, "{TABLE_HEADER}").unwrap();
    for row in &report.rows {
        writeln!(out, "{},{:.2},{:.2},{}", row.label, row.mean, row.ci_width, row.runs).unwrap();
    }
    writeln!(out, "Total,,,{}", report.total_runs).unwrap();
    out
}

/// One row per trace point: iteration 0 is the initial sweep, then one row
/// per batch.
pub fn render_trace(trace: &AllocationTrace, conditions: &[TreatmentCondition]) -> String {
    let mut out = String::from("iteration,condition,batch_size,total_runs,metric");
    for c in conditions {
        write!(out, ",width_{}", c.label).unwrap();
    }
    out.push('\n');
    let sweep = (0, "sweep", trace.sweep_total, trace.sweep_total, trace.sweep_metric, &trace.sweep_widths);
    let batches = trace
        .records
        .iter()
        .map(|r| (r.iteration, r.label.as_str(), r.batch_size, r.total_runs, r.metric, &r.widths));
    for (it, label, batch, total, metric, widths) in std::iter::once(sweep).chain(batches) {
        write!(out, "{it},{label},{batch},{total},{metric}").unwrap();
        for w in widths {
            write!(out, ",{w}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn render_summary(outcomes: &[StrategyOutcome]) -> String {
    let mut out = String::new();
    writeln!(out, "{SUMMARY_HEADER}").unwrap();
    for o in outcomes {
        let status = o.report.status.map_or_else(|| "fixed".to_string(), |s| s.to_string());
        writeln!(
            out,
            "{},{},{:.2},{:.2},{}",
            o.strategy,
            o.report.total_runs,
            o.report.max_ci_width(),
            o.report.mean_ci_width(),
            status
        )
        .unwrap();
    }
    out
}

/// Wall-clock times; kept out of the CSV outputs, which are reproducible.
pub fn render_timing(outcomes: &[StrategyOutcome]) -> String {
    outcomes
        .iter()
        .map(|o| format!("{} {:.3}s\n", o.strategy, o.wall_time.as_secs_f64()))
        .collect()
}

/// Mean and interval endpoints per condition.
pub fn render_intervals(report: &StrategyReport, conditions: &[TreatmentCondition]) -> String {
    let mut out = String::from("TC,x1,x2,mean,lower,upper,runs\n");
    for (row, c) in report.rows.iter().zip(conditions) {
        let half = row.ci_width / 2.0;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.label,
            c.buprenorphine_index,
            c.naloxone_index,
            row.mean,
            row.mean - half,
            row.mean + half,
            row.runs
        )
        .unwrap();
    }
    out
}

/// Width against cumulative runs: the sweep point plus one point per batch.
pub fn render_trajectory(trace: &AllocationTrace, conditions: &[TreatmentCondition]) -> String {
    let mut out = String::from("point,total_runs,max_width");
    for c in conditions {
        write!(out, ",{}", c.label).unwrap();
    }
    out.push('\n');
    let points = std::iter::once((trace.sweep_total, &trace.sweep_widths))
        .chain(trace.records.iter().map(|r| (r.total_runs, &r.widths)));
    for (i, (total, widths)) in points.enumerate() {
        let max = widths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        write!(out, "{i},{total},{max}").unwrap();
        for w in widths {
            write!(out, ",{w}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// All plot files of a bundle as `(relative path, contents)`.
pub fn plot_files(bundle: &ReportBundle) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for o in &bundle.outcomes {
        files.push((
            format!("plotdata/{}_intervals.csv", o.strategy),
            render_intervals(&o.report, &bundle.conditions),
        ));
        if let Some(trace) = &o.trace {
            files.push((
                format!("plotdata/{}_trajectory.csv", o.strategy),
                render_trajectory(trace, &bundle.conditions),
            ));
        }
    }
    files
}
