//! Optimizers behind one stepping interface.

mod config;
mod first_order;
mod warm_start;

pub use config::{DeltaVariant, OptimizerConfig, OptimizerName, Schedule, WarmStartStrategy};
pub use first_order::{
    adagrad_step, adagrad_update, adam_step, adam_update, qng_step, qng_update, sgd_step, sgd_update,
    Moments, OptimizerState,
};
pub use warm_start::{laws_step, lr_schedule, warm_start, wssgd_step, StepReport, WarmStart};

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::objective::Objective;

/// Metrics logged after an outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub cost: f64,
    pub grad_norm: f64,
    pub wall_ms: f64,
    /// Optional named metrics such as train/validation accuracy.
    pub extra: Vec<(String, f64)>,
}

/// A configured optimizer owning its state.
#[derive(Debug, Clone)]
pub struct Optimizer {
    name: OptimizerName,
    config: OptimizerConfig,
    state: OptimizerState,
}

impl Optimizer {
    pub fn new(name: OptimizerName, config: OptimizerConfig, theta0: Vec<f64>) -> Result<Optimizer> {
        config.validate()?;
        if theta0.iter().any(|x| !x.is_finite()) {
            return Err(Error::Usage("initial parameters must be finite".into()));
        }
        Ok(Optimizer { name, config, state: OptimizerState::new(theta0) })
    }

    pub fn name(&self) -> OptimizerName {
        self.name
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn state(&self) -> &OptimizerState {
        &self.state
    }

    pub fn theta(&self) -> &[f64] {
        &self.state.theta
    }

    /// Advances one outer iteration.
    pub fn step(&mut self, objective: &dyn Objective, rng: &mut dyn RngCore) -> Result<Option<StepReport>> {
        if objective.n_params() != self.state.theta.len() {
            return Err(Error::Usage(format!(
                "objective has {} parameters, optimizer holds {}",
                objective.n_params(),
                self.state.theta.len()
            )));
        }
        let c = &self.config;
        let s = &mut self.state;
        match self.name {
            OptimizerName::Sgd => {
                let g = objective.sample_gradient(&s.theta, rng)?;
                sgd_step(s, &g, c.eta)?;
            }
            OptimizerName::Adagrad => {
                let g = objective.sample_gradient(&s.theta, rng)?;
                adagrad_step(s, &g, c.eta, c.epsilon)?;
            }
            OptimizerName::Adam => {
                let g = objective.sample_gradient(&s.theta, rng)?;
                adam_step(s, &g, c.eta, c.beta1, c.beta2, c.epsilon)?;
            }
            OptimizerName::Qng => qng_step(s, objective, c.eta, c.delta, c.cutoff, rng)?,
            OptimizerName::Laws => return laws_step(s, objective, c, rng).map(Some),
            OptimizerName::WsSgd => return wssgd_step(s, objective, c, rng).map(Some),
            OptimizerName::Lookahead => {
                let la = OptimizerConfig { delta_variant: DeltaVariant::Lookahead, ..c.clone() };
                return wssgd_step(s, objective, &la, rng).map(Some);
            }
        }
        Ok(None)
    }
}
