#![allow(dead_code)]

use rand_distr::{Distribution, StandardNormal};
use simalloc::sim::{
    build_grid, ActiveSet, FactorGrid, GridSpec, ReplicationRng, Simulator, TreatmentCondition,
};

/// Gaussian outcome with a mean and standard deviation per grid cell.
pub struct CellGaussian {
    pub cells: Vec<(f64, f64)>,
}

impl Simulator for CellGaussian {
    fn replicate(&self, cond: &TreatmentCondition, rng: &mut ReplicationRng) -> f64 {
        let (mean, sd) = self.cells[cond.cell];
        let z: f64 = StandardNormal.sample(rng);
        mean + sd * z
    }
}

pub fn labels(s: &[&str]) -> Vec<String> {
    s.iter().map(|l| l.to_string()).collect()
}

/// `rows x cols` grid with every cell active.
pub fn full_grid(rows: usize, cols: usize) -> FactorGrid {
    let up = ["A", "B", "C", "D", "E", "F"];
    let low = ["a", "b", "c", "d", "e", "f"];
    build_grid(&GridSpec {
        naloxone_levels: labels(&up[..rows]),
        buprenorphine_levels: labels(&low[..cols]),
        active: ActiveSet::All,
    })
    .unwrap()
}
