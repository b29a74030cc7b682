use crate::error::{Error, Result};

use super::t_quantile;

/// Streaming sample statistics for one condition (Welford accumulation).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConditionEstimate {
    n: u64,
    mean: f64,
    m2: f64,
}

impl ConditionEstimate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let mut est = Self::new();
        est.extend(values);
        est
    }

    pub fn update(&mut self, value: f64) {
        self.n += 1;
        let delta = value - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, values: I) {
        for v in values {
            self.update(v);
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sum of squared deviations from the running mean.
    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Unbiased sample variance; `None` while fewer than two values are in.
    pub fn variance(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.m2 / (self.n - 1) as f64)
    }

    pub fn std_dev(&self) -> Option<f64> {
        self.variance().map(f64::sqrt)
    }

    /// Full width of the two-sided Student-t interval on the mean.
    pub fn ci_width(&self, confidence: f64) -> Result<f64> {
        ci_width(self, confidence)
    }

    /// [`ci_width`](Self::ci_width) with undefined widths reported as +inf.
    pub fn ci_width_or_inf(&self, confidence: f64) -> f64 {
        self.ci_width(confidence).unwrap_or(f64::INFINITY)
    }
}

/// Welford update returning the new estimate.
pub fn update_stats(est: ConditionEstimate, value: f64) -> ConditionEstimate {
    let mut est = est;
    est.update(value);
    est
}

/// `2 * t_{1-(1-confidence)/2, n-1} * s / sqrt(n)`.
pub fn ci_width(est: &ConditionEstimate, confidence: f64) -> Result<f64> {
    let variance = est.variance().ok_or_else(|| {
        Error::InsufficientData(format!("CI width needs n >= 2, have n = {}", est.n))
    })?;
    if variance == 0.0 {
        return Ok(0.0);
    }
    let t = t_quantile(confidence, (est.n - 1) as f64)?;
    Ok(2.0 * t * (variance / est.n as f64).sqrt())
}
