//! Replication budget allocation for estimating treatment effects from a
//! costly stochastic simulator.
//!
//! * [`sim`]: the treatment-condition grid, the simulator interface and a
//!   stochastic opioid-use-disorder surrogate with an exact expected-value
//!   oracle.
//! * [`stats`]: streaming moments, Student-t intervals and least-squares
//!   response surfaces.
//! * [`alloc`]: brute-force, CI-greedy and model-based greedy allocation.
//! * [`harness`]: configuration, experiment orchestration and CSV reports.

pub mod alloc;
pub mod error;
pub mod harness;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
