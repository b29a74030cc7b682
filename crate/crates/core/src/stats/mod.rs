//! Streaming moments, Student-t intervals and the regression surface used by
//! the model-based strategies.

mod estimate;
mod ols;

use statrs::distribution::{ContinuousCDF, StudentsT};

pub use estimate::{ci_width, update_stats, ConditionEstimate};
pub use ols::{
    design_row, fit_grouped, fit_ols, n_params, predict_with_ci, Observation, Prediction,
    RegressionModel,
};

use crate::error::{Error, Result};

/// Upper `1 - (1 - confidence)/2` quantile of Student's t with `dof` degrees
/// of freedom.
pub fn t_quantile(confidence: f64, dof: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence {confidence} is not in (0, 1)"
        )));
    }
    let dist = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::InvalidArgument(format!("t distribution with {dof} dof: {e}")))?;
    Ok(dist.inverse_cdf(1.0 - (1.0 - confidence) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_table_values() {
        // Two-sided 95% critical values.
        for (dof, t) in [(1.0, 12.706205), (3.0, 3.182446), (10.0, 2.228139), (29.0, 2.045230), (1000.0, 1.962339)] {
            let got = t_quantile(0.95, dof).unwrap();
            assert!((got - t).abs() < 1e-5, "dof {dof}: {got} vs {t}");
        }
        assert!((t_quantile(0.99, 5.0).unwrap() - 4.032143).abs() < 1e-5);
    }

    #[test]
    fn confidence_bounds() {
        assert!(t_quantile(1.0, 5.0).is_err());
        assert!(t_quantile(0.0, 5.0).is_err());
    }
}
