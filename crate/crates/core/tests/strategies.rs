mod common;

use common::{full_grid, CellGaussian};
use simalloc::alloc::{
    run_brute_force, run_greedy, run_model_greedy, AllocationConfig, AllocationTrace,
    BatchMode, StoppingRule, TerminalStatus,
};
use simalloc::sim::{build_grid, GridSpec, LinearSurfaceSimulator, StreamKey};
use simalloc::Error;

fn check_trace_accounting(trace: &AllocationTrace, sweep: u64) {
    assert_eq!(trace.sweep_total, sweep);
    let mut prev = sweep;
    for (i, rec) in trace.records.iter().enumerate() {
        assert_eq!(rec.iteration, i + 1);
        assert_eq!(rec.total_runs, prev + rec.batch_size);
        prev = rec.total_runs;
    }
}

#[test]
fn brute_force_equal_rows() {
    let grid = build_grid(&GridSpec::default()).unwrap();
    let sim = LinearSurfaceSimulator::new([2400.0, -15.0, -7.0, 0.5], 50.0).unwrap();
    let report = run_brute_force(&sim, &grid, 2000, 0.95, StreamKey::from_seed(1)).unwrap();
    assert_eq!(report.total_runs, 20_000);
    assert_eq!(report.rows.len(), 10);
    assert!(report.rows.iter().all(|r| r.runs == 2000));
    assert_eq!(report.rows[0].label, "Aa");
    assert_eq!(report.rows[9].label, "Be");
    assert!(report.status.is_none());
}

#[test]
fn brute_force_single_condition() {
    let grid = full_grid(1, 1);
    let sim = LinearSurfaceSimulator::new([1.0, 0.0, 0.0, 0.0], 1.0).unwrap();
    let report = run_brute_force(&sim, &grid, 2, 0.95, StreamKey::from_seed(1)).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].runs, 2);
    assert!(run_brute_force(&sim, &grid, 1, 0.95, StreamKey::from_seed(1)).is_err());
}

#[test]
fn brute_force_width_tracks_standard_deviation() {
    // Variances 1 and 100 at equal n: widths differ by sqrt(100/1) = 10.
    let grid = full_grid(1, 2);
    let sim = CellGaussian {
        cells: vec![(0.0, 1.0), (0.0, 10.0)],
    };
    let report = run_brute_force(&sim, &grid, 4000, 0.95, StreamKey::from_seed(3)).unwrap();
    let ratio = report.rows[1].ci_width / report.rows[0].ci_width;
    assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
}

#[test]
fn greedy_zero_variance_stops_after_sweep() {
    let grid = build_grid(&GridSpec::default()).unwrap();
    let sim = LinearSurfaceSimulator::new([100.0, 1.0, 2.0, 0.0], 0.0).unwrap();
    let config = AllocationConfig::default();
    let (report, trace) = run_greedy(&sim, &grid, &config, StreamKey::from_seed(1)).unwrap();
    assert_eq!(report.total_runs, 10 * config.initial_runs);
    assert!(trace.records.is_empty());
    assert_eq!(trace.status, TerminalStatus::Converged);
    assert!(report.rows.iter().all(|r| r.ci_width == 0.0));
}

#[test]
fn greedy_allocates_in_proportion_to_variance() {
    let grid = full_grid(1, 2);
    let sim = CellGaussian {
        cells: vec![(10.0, 5.0), (10.0, 10.0)],
    };
    let config = AllocationConfig {
        initial_runs: 10,
        batch_size: 10,
        ci_threshold: 1.0,
        ..AllocationConfig::default()
    };
    let (report, trace) = run_greedy(&sim, &grid, &config, StreamKey::from_seed(11)).unwrap();
    assert_eq!(trace.status, TerminalStatus::Converged);
    let ratio = report.rows[1].runs as f64 / report.rows[0].runs as f64;
    assert!((ratio / 4.0 - 1.0).abs() < 0.25, "ratio {ratio}");
}

#[test]
fn greedy_trace_invariants() {
    let grid = full_grid(2, 3);
    let sim = CellGaussian {
        cells: vec![(0.0, 3.0), (1.0, 8.0), (2.0, 5.0), (3.0, 12.0), (4.0, 2.0), (5.0, 6.0)],
    };
    let config = AllocationConfig {
        initial_runs: 20,
        batch_size: 25,
        ci_threshold: 2.0,
        ..AllocationConfig::default()
    };
    let (report, trace) = run_greedy(&sim, &grid, &config, StreamKey::from_seed(5)).unwrap();
    check_trace_accounting(&trace, 6 * 20);
    assert_eq!(
        report.total_runs,
        6 * 20 + trace.records.len() as u64 * config.batch_size
    );
    assert_eq!(report.total_runs, report.rows.iter().map(|r| r.runs).sum::<u64>());
    for (i, rec) in trace.records.iter().enumerate() {
        let pre = trace.pre_batch_widths(i);
        let max = pre.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let chosen = rec.condition.unwrap();
        assert_eq!(pre[chosen], max);
        assert!(pre[..chosen].iter().all(|&w| w < max), "tie-break must pick lowest index");
    }
    assert_eq!(trace.status, TerminalStatus::Converged);
    assert!(report.rows.iter().all(|r| r.ci_width < 2.0));
}

#[test]
fn greedy_budget_cap() {
    let grid = full_grid(1, 3);
    let sim = CellGaussian {
        cells: vec![(0.0, 50.0), (0.0, 50.0), (0.0, 50.0)],
    };
    let config = AllocationConfig {
        initial_runs: 10,
        batch_size: 7,
        ci_threshold: 0.5,
        budget_cap: Some(100),
        ..AllocationConfig::default()
    };
    let (report, trace) = run_greedy(&sim, &grid, &config, StreamKey::from_seed(5)).unwrap();
    assert_eq!(trace.status, TerminalStatus::BudgetExhausted);
    assert!(report.total_runs <= 100);
    assert!(report.total_runs + 7 > 100);
    check_trace_accounting(&trace, 30);
}

#[test]
fn model_greedy_near_exact_surface_converges_at_sweep() {
    let grid = build_grid(&GridSpec::default()).unwrap();
    let sim = LinearSurfaceSimulator::new([2400.0, -15.0, -7.0, 0.5], 1e-6).unwrap();
    let config = AllocationConfig::default();
    let (report, trace) = run_model_greedy(&sim, &grid, &config, StreamKey::from_seed(1)).unwrap();
    assert_eq!(trace.status, TerminalStatus::Converged);
    assert!(trace.records.len() <= 1);
    assert!(report.total_runs <= 10 * 100 + 50);
    let model = report.model.as_ref().unwrap();
    assert!((model.beta[3] - 0.5).abs() < 1e-6);
    assert!((report.rows[0].mean - 2400.0).abs() < 1e-6);
}

#[test]
fn model_greedy_single_row_is_singular() {
    let grid = full_grid(1, 5);
    let sim = LinearSurfaceSimulator::new([1.0, 1.0, 1.0, 0.0], 1.0).unwrap();
    let err = run_model_greedy(&sim, &grid, &AllocationConfig::default(), StreamKey::from_seed(1))
        .unwrap_err();
    assert!(matches!(err, Error::SingularDesign(_)));
    assert!(err.to_string().contains("x2"), "{err}");

    let grid = full_grid(3, 1);
    let err = run_model_greedy(&sim, &grid, &AllocationConfig::default(), StreamKey::from_seed(1))
        .unwrap_err();
    assert!(err.to_string().contains("x1"), "{err}");
}

#[test]
fn model_greedy_accounting_and_convergence() {
    let grid = build_grid(&GridSpec::default()).unwrap();
    let sim = LinearSurfaceSimulator::new([2400.0, -15.0, -7.0, 0.5], 50.0).unwrap();
    for with_interaction in [true, false] {
        let config = AllocationConfig {
            with_interaction,
            ..AllocationConfig::default()
        };
        let (report, trace) =
            run_model_greedy(&sim, &grid, &config, StreamKey::from_seed(8)).unwrap();
        check_trace_accounting(&trace, 1000);
        assert_eq!(trace.status, TerminalStatus::Converged);
        assert!(report.rows.iter().all(|r| r.ci_width < 4.0));
        assert_eq!(report.total_runs, report.rows.iter().map(|r| r.runs).sum::<u64>());
        assert_eq!(report.total_runs, 1000 + trace.records.len() as u64 * 50);
        assert_eq!(
            report.model.as_ref().unwrap().beta.len(),
            if with_interaction { 4 } else { 3 }
        );
        // Each decision went to the widest model interval.
        for (i, rec) in trace.records.iter().enumerate() {
            let pre = trace.pre_batch_widths(i);
            let max = pre.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(pre[rec.condition.unwrap()], max);
        }
    }
}

#[test]
fn simpler_model_needs_no_more_runs() {
    let grid = build_grid(&GridSpec::default()).unwrap();
    let sim = LinearSurfaceSimulator::new([2400.0, -15.0, -7.0, 0.5], 50.0).unwrap();
    let key = StreamKey::from_seed(21);
    let with = AllocationConfig::default();
    let without = AllocationConfig {
        with_interaction: false,
        ..with
    };
    let (a, _) = run_model_greedy(&sim, &grid, &with, key).unwrap();
    let (b, _) = run_model_greedy(&sim, &grid, &without, key).unwrap();
    assert!(b.total_runs <= a.total_runs, "{} vs {}", b.total_runs, a.total_runs);
}

#[test]
fn model_greedy_all_conditions_mode() {
    let grid = build_grid(&GridSpec::default()).unwrap();
    let sim = LinearSurfaceSimulator::new([2400.0, -15.0, -7.0, 0.5], 50.0).unwrap();
    let config = AllocationConfig {
        batch_mode: BatchMode::AllConditions,
        ..AllocationConfig::default()
    };
    let (report, trace) = run_model_greedy(&sim, &grid, &config, StreamKey::from_seed(2)).unwrap();
    check_trace_accounting(&trace, 1000);
    assert!(trace.records.iter().all(|r| r.condition.is_none() && r.batch_size == 500));
    let runs = report.rows[0].runs;
    assert!(report.rows.iter().all(|r| r.runs == runs));
    assert!(report.rows.iter().all(|r| r.ci_width < 4.0));
}

#[test]
fn model_greedy_discrepancy_rule() {
    let grid = build_grid(&GridSpec::default()).unwrap();
    let sim = LinearSurfaceSimulator::new([2400.0, -15.0, -7.0, 0.5], 50.0).unwrap();
    let config = AllocationConfig {
        stopping: StoppingRule::MeanDiscrepancy,
        ci_threshold: 6.0,
        ..AllocationConfig::default()
    };
    let (report, trace) = run_model_greedy(&sim, &grid, &config, StreamKey::from_seed(2)).unwrap();
    assert_eq!(trace.status, TerminalStatus::Converged);
    assert!(trace.final_widths().len() == 10);
    let last_metric = trace.records.last().map_or(trace.sweep_metric, |r| r.metric);
    assert!(last_metric < 6.0);
    assert!(report.total_runs >= 1000);
}

#[test]
fn replay_is_bit_identical_across_thread_counts() {
    let grid = build_grid(&GridSpec::default()).unwrap();
    let sim = LinearSurfaceSimulator::new([2400.0, -15.0, -7.0, 0.5], 50.0).unwrap();
    let config = AllocationConfig::default();
    let key = StreamKey::derive(99, "greedy");
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                (
                    run_greedy(&sim, &grid, &config, key).unwrap(),
                    run_model_greedy(&sim, &grid, &config, key).unwrap(),
                )
            })
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    assert_eq!(one, run(1));
}
