//! What an optimizer needs from a problem: cost, (stochastic) gradient, and
//! the metric used by the natural-gradient updates.

use rand::RngCore;

use crate::ansatz::CostFunction;
use crate::diff::{fubini_study_metric, parameter_shift_gradient, MetricTensor};
use crate::error::Result;

pub trait Objective: Sync {
    fn n_params(&self) -> usize;

    fn cost(&self, theta: &[f64]) -> Result<f64>;

    /// Exact gradient over the whole objective.
    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>>;

    /// One draw of the stochastic gradient `∇C(θ; ξ)`. Data-free objectives
    /// return the exact gradient and leave `rng` untouched.
    fn sample_gradient(&self, theta: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let _ = rng;
        self.gradient(theta)
    }

    /// Undamped Fubini-Study metric (or its stand-in) at `theta`.
    fn metric(&self, theta: &[f64]) -> Result<MetricTensor>;
}

impl Objective for CostFunction {
    fn n_params(&self) -> usize {
        CostFunction::n_params(self)
    }

    fn cost(&self, theta: &[f64]) -> Result<f64> {
        CostFunction::cost(self, theta)
    }

    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        parameter_shift_gradient(self, theta)
    }

    fn metric(&self, theta: &[f64]) -> Result<MetricTensor> {
        fubini_study_metric(self.circuit(), theta, self.input())
    }
}
