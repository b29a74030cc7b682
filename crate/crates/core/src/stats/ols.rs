//! Least-squares response surface over the coded covariates
//! `y = b0 + b1*x1 + b2*x2 [+ b3*x1*x2]`, solved through the normal
//! equations with a Cholesky factorisation of `X'X`.

use crate::error::{Error, Result};
use crate::sim::TreatmentCondition;

use super::{t_quantile, ConditionEstimate};

const COLUMN_NAMES: [&str; 4] = [
    "intercept",
    "x1 (buprenorphine level)",
    "x2 (naloxone level)",
    "x1*x2 interaction",
];

/// Relative pivot size below which `X'X` is treated as singular.
const PIVOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub x1: f64,
    pub x2: f64,
    pub y: f64,
}

/// Number of coefficients in the surface.
pub fn n_params(with_interaction: bool) -> usize {
    if with_interaction {
        4
    } else {
        3
    }
}

/// Design row `(1, x1, x2[, x1*x2])`, padded with zero to length four.
pub fn design_row(x1: f64, x2: f64, with_interaction: bool) -> [f64; 4] {
    [1.0, x1, x2, if with_interaction { x1 * x2 } else { 0.0 }]
}

/// Accumulated `X'X` and `X'y`.
#[derive(Debug, Clone)]
struct NormalEquations {
    p: usize,
    xtx: [[f64; 4]; 4],
    xty: [f64; 4],
    n: u64,
}

impl NormalEquations {
    fn new(with_interaction: bool) -> Self {
        NormalEquations {
            p: n_params(with_interaction),
            xtx: [[0.0; 4]; 4],
            xty: [0.0; 4],
            n: 0,
        }
    }

    /// Adds `weight` copies of a row whose responses sum to `y_sum`.
    fn add(&mut self, row: &[f64; 4], weight: f64, y_sum: f64) {
        for i in 0..self.p {
            for j in 0..self.p {
                self.xtx[i][j] += weight * row[i] * row[j];
            }
            self.xty[i] += row[i] * y_sum;
        }
    }

    /// Lower-triangular Cholesky factor of `X'X`.
    fn cholesky(&self) -> Result<[[f64; 4]; 4]> {
        let p = self.p;
        let scale = (0..p).map(|i| self.xtx[i][i]).fold(0.0, f64::max);
        let mut l = [[0.0; 4]; 4];
        for j in 0..p {
            let mut d = self.xtx[j][j];
            for k in 0..j {
                d -= l[j][k] * l[j][k];
            }
            if !(d > PIVOT_TOLERANCE * scale) {
                return Err(Error::SingularDesign(format!(
                    "column `{}` is not identifiable from the observed conditions",
                    COLUMN_NAMES[j]
                )));
            }
            l[j][j] = d.sqrt();
            for i in j + 1..p {
                let mut s = self.xtx[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                l[i][j] = s / l[j][j];
            }
        }
        Ok(l)
    }

    /// Returns `(beta, (X'X)^-1)`.
    fn solve(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let p = self.p;
        let l = self.cholesky()?;
        let solve_with = |rhs: &[f64]| -> Vec<f64> {
            let mut z = vec![0.0; p];
            for i in 0..p {
                let mut s = rhs[i];
                for k in 0..i {
                    s -= l[i][k] * z[k];
                }
                z[i] = s / l[i][i];
            }
            let mut x = vec![0.0; p];
            for i in (0..p).rev() {
                let mut s = z[i];
                for k in i + 1..p {
                    s -= l[k][i] * x[k];
                }
                x[i] = s / l[i][i];
            }
            x
        };
        let beta = solve_with(&self.xty[..p]);
        let mut inverse = vec![vec![0.0; p]; p];
        for j in 0..p {
            let mut e = vec![0.0; p];
            e[j] = 1.0;
            let col = solve_with(&e);
            for i in 0..p {
                inverse[i][j] = col[i];
            }
        }
        // Symmetrise away rounding asymmetry.
        for i in 0..p {
            for j in 0..i {
                let avg = 0.5 * (inverse[i][j] + inverse[j][i]);
                inverse[i][j] = avg;
                inverse[j][i] = avg;
            }
        }
        Ok((beta, inverse))
    }
}

/// A fitted response surface.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    pub with_interaction: bool,
    /// `(b0, b1, b2[, b3])`
    pub beta: Vec<f64>,
    pub xtx_inverse: Vec<Vec<f64>>,
    /// `RSS / (n - p)`; zero when `n == p`.
    pub sigma2_hat: f64,
    pub rss: f64,
    pub n_total: u64,
}

/// Point prediction and interval on the conditional mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    pub ci_width: f64,
}

fn check_count(n: u64, p: usize) -> Result<()> {
    if n < p as u64 {
        return Err(Error::InsufficientData(format!(
            "need at least {p} observations to fit {p} coefficients, have {n}"
        )));
    }
    Ok(())
}

/// Residual sums below this multiple of `n * (eps * |y|max)^2` are round-off
/// from an exact fit and are reported as zero.
const RSS_ROUNDOFF_FACTOR: f64 = 4096.0;

fn finish(
    eq: &NormalEquations,
    with_interaction: bool,
    y_scale: f64,
    rss_of: impl FnOnce(&[f64]) -> f64,
) -> Result<RegressionModel> {
    check_count(eq.n, eq.p)?;
    let (beta, xtx_inverse) = eq.solve()?;
    let roundoff = RSS_ROUNDOFF_FACTOR * eq.n as f64 * (f64::EPSILON * y_scale).powi(2);
    let rss = rss_of(&beta);
    let rss = if rss <= roundoff { 0.0 } else { rss };
    let dof = eq.n - eq.p as u64;
    let sigma2_hat = if dof > 0 { rss / dof as f64 } else { 0.0 };
    Ok(RegressionModel {
        with_interaction,
        beta,
        xtx_inverse,
        sigma2_hat,
        rss,
        n_total: eq.n,
    })
}

/// Ordinary least squares on individual observations.
pub fn fit_ols(observations: &[Observation], with_interaction: bool) -> Result<RegressionModel> {
    let mut eq = NormalEquations::new(with_interaction);
    for obs in observations {
        eq.add(&design_row(obs.x1, obs.x2, with_interaction), 1.0, obs.y);
    }
    eq.n = observations.len() as u64;
    let y_scale = observations.iter().fold(0.0, |m: f64, o| m.max(o.y.abs()));
    finish(&eq, with_interaction, y_scale, |beta| {
        observations
            .iter()
            .map(|o| {
                let r = o.y - dot(beta, &design_row(o.x1, o.x2, with_interaction));
                r * r
            })
            .sum()
    })
}

/// Ordinary least squares on the same observations, summarised per design
/// point. `(x1, x2, estimate)` carries the count, mean and squared-deviation
/// sum of the responses observed at that point. Gives the same fit as
/// [`fit_ols`] on the raw values.
pub fn fit_grouped(
    groups: &[(f64, f64, ConditionEstimate)],
    with_interaction: bool,
) -> Result<RegressionModel> {
    let mut eq = NormalEquations::new(with_interaction);
    for (x1, x2, est) in groups {
        let n = est.count() as f64;
        eq.add(&design_row(*x1, *x2, with_interaction), n, n * est.mean());
        eq.n += est.count();
    }
    let y_scale = groups.iter().fold(0.0, |m: f64, g| m.max(g.2.mean().abs()));
    finish(&eq, with_interaction, y_scale, |beta| {
        groups
            .iter()
            .map(|(x1, x2, est)| {
                let gap = est.mean() - dot(beta, &design_row(*x1, *x2, with_interaction));
                est.m2() + est.count() as f64 * gap * gap
            })
            .sum()
    })
}

fn dot(beta: &[f64], row: &[f64; 4]) -> f64 {
    beta.iter().zip(row).map(|(b, x)| b * x).sum()
}

impl RegressionModel {
    pub fn n_params(&self) -> usize {
        self.beta.len()
    }

    /// Residual degrees of freedom.
    pub fn dof(&self) -> u64 {
        self.n_total - self.n_params() as u64
    }

    pub fn predict(&self, x1: f64, x2: f64) -> f64 {
        dot(&self.beta, &design_row(x1, x2, self.with_interaction))
    }

    /// `x0' (X'X)^-1 x0` at a design point.
    pub fn leverage(&self, x1: f64, x2: f64) -> f64 {
        let row = design_row(x1, x2, self.with_interaction);
        let p = self.n_params();
        let mut h = 0.0;
        for i in 0..p {
            for j in 0..p {
                h += row[i] * self.xtx_inverse[i][j] * row[j];
            }
        }
        h
    }

    /// Standard errors of the coefficients.
    pub fn coefficient_std_errors(&self) -> Vec<f64> {
        (0..self.n_params())
            .map(|i| (self.sigma2_hat * self.xtx_inverse[i][i]).sqrt())
            .collect()
    }

    pub fn predict_at(&self, x1: f64, x2: f64, confidence: f64) -> Result<Prediction> {
        let mean = self.predict(x1, x2);
        let std_error = (self.sigma2_hat * self.leverage(x1, x2).max(0.0)).sqrt();
        if std_error == 0.0 {
            return Ok(Prediction {
                mean,
                std_error,
                ci_width: 0.0,
            });
        }
        if self.dof() == 0 {
            return Err(Error::InsufficientData(
                "no residual degrees of freedom for a model interval".into(),
            ));
        }
        let t = t_quantile(confidence, self.dof() as f64)?;
        Ok(Prediction {
            mean,
            std_error,
            ci_width: 2.0 * t * std_error,
        })
    }
}

/// Model mean at `cond` and the full width of the interval on it:
/// `2 * t_{n-p} * sqrt(sigma2_hat * x0' (X'X)^-1 x0)`.
pub fn predict_with_ci(
    model: &RegressionModel,
    cond: &TreatmentCondition,
    confidence: f64,
) -> Result<Prediction> {
    model.predict_at(cond.x1(), cond.x2(), confidence)
}
