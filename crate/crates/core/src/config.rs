use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `Λ(z)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMethod {
    /// Exact antiderivative after the substitution `x = (2/μ) sin u`.
    #[default]
    ClosedForm,
    /// Adaptive tanh-sinh quadrature of the defining integral over `x ∈ [0, 1]`.
    Quadrature,
}

/// Tolerances, cutoffs and grid densities shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on interval bisections in one adaptive integral.
    pub max_subdivisions: usize,
    /// Beyond this abscissa the Cauchy integral switches to the asymptotic split of `Ln a`.
    pub tail_cutoff_x: f64,
    /// Half-width (in `ln x`) of the symmetric window used for principal values.
    pub pv_epsilon: f64,
    pub grid_points_per_decade: usize,
    pub lambda_method: LambdaMethod,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 200,
            tail_cutoff_x: 1e6,
            pv_epsilon: 0.5,
            grid_points_per_decade: 64,
            lambda_method: LambdaMethod::ClosedForm,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("abs_tol", self.abs_tol)?;
        positive("rel_tol", self.rel_tol)?;
        positive("pv_epsilon", self.pv_epsilon)?;
        if !(self.tail_cutoff_x.is_finite() && self.tail_cutoff_x > 1.0) {
            return Err(Error::InvalidInput(format!("tail_cutoff_x must be > 1, got {}", self.tail_cutoff_x)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidInput("max_subdivisions must be >= 1".into()));
        }
        if self.grid_points_per_decade < 4 {
            return Err(Error::InvalidInput("grid_points_per_decade must be >= 4".into()));
        }
        Ok(())
    }

    /// Same configuration with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        QuadratureConfig { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        QuadratureConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let d = QuadratureConfig::default();
        assert!(QuadratureConfig { abs_tol: 0.0, ..d }.validate().is_err());
        assert!(QuadratureConfig { tail_cutoff_x: 1.0, ..d }.validate().is_err());
        assert!(QuadratureConfig { rel_tol: f64::NAN, ..d }.validate().is_err());
    }
}
