use crate::error::{Error, Result};

/// Settings for [`minimize_ambiguity`](super::minimize_ambiguity).
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationConfig {
    /// Number of starts; the first always begins at the depolarizing channel.
    pub restarts: usize,
    /// Quasi-Newton iterations allowed per restart, summed over penalty stages.
    pub max_iterations: usize,
    /// Relative central-difference step.
    pub gradient_step: f64,
    /// Gradient-norm threshold (bits per unit parameter) that ends a stage.
    pub convergence_tol: f64,
    /// Complete-positivity penalty weights, one stage each, strictly increasing.
    pub penalty_schedule: Vec<f64>,
    pub rng_seed: u64,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 20_000,
            gradient_step: 1e-5,
            convergence_tol: 1e-8,
            penalty_schedule: vec![1e1, 1e2, 1e3, 1e4, 1e5, 1e6],
            rng_seed: 0,
        }
    }
}

impl OptimizationConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("optimizer config: {what}")));
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.gradient_step > 0.0 && self.gradient_step.is_finite()) {
            return bad("gradient_step must be positive");
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return bad("convergence_tol must be positive");
        }
        if self.penalty_schedule.is_empty() {
            return bad("penalty schedule is empty");
        }
        if self.penalty_schedule.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return bad("penalty weights must be positive");
        }
        if self.penalty_schedule.windows(2).any(|w| w[1] <= w[0]) {
            return bad("penalty schedule must be strictly increasing");
        }
        Ok(())
    }
}
