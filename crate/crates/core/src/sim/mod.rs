//! Treatment-condition grid and the stochastic simulators the allocation
//! strategies draw replications from.

mod binomial;
pub mod grid;
pub mod model;
pub mod params;
pub mod rng;

use rand_distr::{Distribution, StandardNormal};

pub use grid::{build_grid, ActiveSet, FactorGrid, GridSpec, TreatmentCondition};
pub use model::{
    expected_occupancy, expected_outcome, simulate_replication, simulate_with, simulate_with_rng,
    Occupancy, SimOutcome, State,
};
pub use params::{condition_params, SimParams, TransitionParams};
pub use rng::{ReplicationRng, StreamKey};

use crate::error::{Error, Result};

/// A black-box stochastic simulator: one call is one replication at one
/// condition, returning the scalar outcome of interest.
///
/// Implementations must be pure functions of `(cond, rng state)`; they are
/// shared across worker threads.
pub trait Simulator: Sync {
    fn replicate(&self, cond: &TreatmentCondition, rng: &mut ReplicationRng) -> f64;
}

impl<S: Simulator + ?Sized> Simulator for &S {
    fn replicate(&self, cond: &TreatmentCondition, rng: &mut ReplicationRng) -> f64 {
        (**self).replicate(cond, rng)
    }
}

impl<S: Simulator + ?Sized> Simulator for Box<S> {
    fn replicate(&self, cond: &TreatmentCondition, rng: &mut ReplicationRng) -> f64 {
        (**self).replicate(cond, rng)
    }
}

/// The OUD surrogate; the outcome is the OD-death count over the horizon.
#[derive(Debug, Clone)]
pub struct OudSimulator {
    base: SimParams,
    by_cell: Vec<TransitionParams>,
}

impl OudSimulator {
    /// Resolves transition parameters for every cell of `grid`, failing if
    /// any level pushes a probability out of range.
    pub fn new(base: SimParams, grid: &FactorGrid) -> Result<Self> {
        base.validate(grid.max_x1(), grid.max_x2())?;
        let by_cell = grid
            .all_conditions()
            .iter()
            .map(|c| condition_params(&base, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(OudSimulator { base, by_cell })
    }

    pub fn base(&self) -> &SimParams {
        &self.base
    }

    pub fn params(&self, cond: &TreatmentCondition) -> &TransitionParams {
        &self.by_cell[cond.cell]
    }

    pub fn expected(&self, cond: &TreatmentCondition) -> f64 {
        expected_outcome(self.params(cond))
    }
}

impl Simulator for OudSimulator {
    fn replicate(&self, cond: &TreatmentCondition, rng: &mut ReplicationRng) -> f64 {
        f64::from(simulate_with_rng(self.params(cond), rng).od_deaths)
    }
}

/// Synthetic response surface
/// `y = b0 + b1*x1 + b2*x2 + b3*x1*x2 + noise_sd * z` with standard normal `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSurfaceSimulator {
    pub beta: [f64; 4],
    pub noise_sd: f64,
}

impl LinearSurfaceSimulator {
    pub fn new(beta: [f64; 4], noise_sd: f64) -> Result<Self> {
        if !(noise_sd.is_finite() && noise_sd >= 0.0) {
            return Err(Error::params("noise_sd", "must be finite and non-negative"));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::params("beta", "coefficients must be finite"));
        }
        Ok(LinearSurfaceSimulator { beta, noise_sd })
    }

    pub fn mean(&self, cond: &TreatmentCondition) -> f64 {
        let (x1, x2) = (cond.x1(), cond.x2());
        self.beta[0] + self.beta[1] * x1 + self.beta[2] * x2 + self.beta[3] * x1 * x2
    }
}

impl Simulator for LinearSurfaceSimulator {
    fn replicate(&self, cond: &TreatmentCondition, rng: &mut ReplicationRng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean(cond) + self.noise_sd * z
    }
}
