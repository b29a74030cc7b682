use rayon::prelude::*;

use crate::sim::{Simulator, StreamKey, TreatmentCondition};
use crate::stats::ConditionEstimate;

/// Draws replications for a fixed set of conditions and keeps their running
/// estimates. Replication `k` of a condition always uses the stream at
/// `(cell, k)`, and values are folded in index order, so results do not
/// depend on the thread count.
pub struct Sampler<'a, S: ?Sized> {
    sim: &'a S,
    key: StreamKey,
    conditions: &'a [TreatmentCondition],
    estimates: Vec<ConditionEstimate>,
}

impl<'a, S: Simulator + ?Sized> Sampler<'a, S> {
    pub fn new(sim: &'a S, key: StreamKey, conditions: &'a [TreatmentCondition]) -> Self {
        Sampler {
            sim,
            key,
            conditions,
            estimates: vec![ConditionEstimate::new(); conditions.len()],
        }
    }

    pub fn conditions(&self) -> &[TreatmentCondition] {
        self.conditions
    }

    pub fn estimates(&self) -> &[ConditionEstimate] {
        &self.estimates
    }

    pub fn total_runs(&self) -> u64 {
        self.estimates.iter().map(|e| e.count()).sum()
    }

    /// Adds `count` replications to each listed condition.
    pub fn run(&mut self, targets: &[usize], count: u64) {
        let jobs: Vec<(usize, u64)> = targets
            .iter()
            .flat_map(|&i| {
                let start = self.estimates[i].count();
                (start..start + count).map(move |rep| (i, rep))
            })
            .collect();
        let (sim, key, conditions) = (self.sim, self.key, self.conditions);
        let values: Vec<f64> = jobs
            .par_iter()
            .map(|&(i, rep)| {
                let cond = &conditions[i];
                let mut rng = key.replication_rng(cond.cell, rep);
                sim.replicate(cond, &mut rng)
            })
            .collect();
        for (&(i, _), v) in jobs.iter().zip(values) {
            self.estimates[i].update(v);
        }
    }

    pub fn run_all(&mut self, count: u64) {
        let all: Vec<usize> = (0..self.conditions.len()).collect();
        self.run(&all, count);
    }

    pub fn widths(&self, confidence: f64) -> Vec<f64> {
        self.estimates
            .iter()
            .map(|e| e.ci_width_or_inf(confidence))
            .collect()
    }
}
