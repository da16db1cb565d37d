//! Look-around warm starts and the two outer updates built on them.
//!
//! Sign convention: the inner loop descends, `v_k = v_{k−1} − μ_k ∇C`, and
//! the accumulated "gradient" of the warm start is the signed sum of those
//! steps, so `θ_warm = θ_{t−1} + Σ_k s_k` with `s_k = −μ_k ∇C(v_{k−1})`.
//!
//! Outer updates, all interpolating between `θ_{t−1}` and `θ_warm`:
//!
//! ```text
//! LAWS         θ_t = θ_warm − λ pinv(F + δI) (θ_warm − θ_{t−1}),    λ = η/K
//! lookahead    θ_t = (1 − α) θ_{t−1} + α θ_warm
//! fisher       same as LAWS, with any single-step optimizer in the inner loop
//! adam-like    θ_t = d ⊙ θ_{t−1} + (1 − d) ⊙ θ_warm,  d = 1 − λ √(Σ_k g_k²)
//! ```
//!
//! `F` is evaluated at `θ_warm`.

use rand::RngCore;

use super::config::{DeltaVariant, OptimizerConfig, OptimizerName, Schedule, WarmStartStrategy};
use super::first_order::{
    adagrad_update, adam_update, check_finite, finish_outer, qng_update, sgd_update, Moments,
    OptimizerState,
};
use crate::error::{Error, Result};
use crate::objective::Objective;

/// Inner learning rate `μ_k^t`. `t` and `k` are 1-based.
pub fn lr_schedule(schedule: Schedule, t: usize, k: usize, k_total: usize, c0: f64, mu0: f64) -> f64 {
    match schedule {
        Schedule::Constant => mu0,
        Schedule::Theorem1 => {
            c0 / ((t.saturating_sub(1) * k) as f64 + k_total as f64 + 2.0)
        }
    }
}

/// Result of one look-around phase.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    pub theta: Vec<f64>,
    /// Sampled gradients `∇C(·; ξ_k)`, one per inner step.
    pub gradients: Vec<Vec<f64>>,
}

/// Produces `θ_warm` from `θ_{t−1}` with `rates[k−1] = μ_k`.
pub fn warm_start<G>(
    theta_prev: &[f64],
    strategy: WarmStartStrategy,
    rates: &[f64],
    beta: f64,
    mut gradient: G,
) -> Result<WarmStart>
where
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if rates.is_empty() {
        return Err(Error::Usage("warm start needs K ≥ 1".into()));
    }
    let n = theta_prev.len();
    let mut gradients = Vec::with_capacity(rates.len());
    let theta = match strategy {
        WarmStartStrategy::InnerSgd => {
            let mut v = theta_prev.to_vec();
            for &mu in rates {
                let g = gradient(&v)?;
                sgd_update(&mut v, &g, mu)?;
                gradients.push(g);
            }
            v
        }
        WarmStartStrategy::AveragedAtTheta => {
            let k_total = rates.len() as f64;
            let mut w = theta_prev.to_vec();
            for &mu in rates {
                let g = gradient(theta_prev)?;
                check_finite("gradient", &g)?;
                for i in 0..n {
                    w[i] -= mu / k_total * g[i];
                }
                gradients.push(g);
            }
            w
        }
        WarmStartStrategy::Ema => {
            let k_total = rates.len() as i32;
            let mut v = theta_prev.to_vec();
            let mut w = theta_prev.to_vec();
            for (idx, &mu) in rates.iter().enumerate() {
                let g = gradient(&v)?;
                sgd_update(&mut v, &g, mu)?;
                let weight = (1.0 - beta) * beta.powi(k_total - 1 - idx as i32);
                for i in 0..n {
                    w[i] -= weight * mu * g[i];
                }
                gradients.push(g);
            }
            w
        }
    };
    check_finite("warm-start point", &theta)?;
    Ok(WarmStart { theta, gradients })
}

/// Diagnostics from one outer step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub theta_warm: Vec<f64>,
    /// Largest sampled gradient norm seen in the look-around phase.
    pub max_inner_grad_norm: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn inner_rates(config: &OptimizerConfig, t: usize) -> Vec<f64> {
    (1..=config.k)
        .map(|k| lr_schedule(config.schedule, t, k, config.k, config.c0, config.mu))
        .collect()
}

/// `θ_warm − λ pinv(F(θ_warm) + δI)(θ_warm − θ_{t−1})`.
fn natural_interpolation(
    objective: &dyn Objective,
    config: &OptimizerConfig,
    theta_prev: &[f64],
    theta_warm: &[f64],
) -> Result<Vec<f64>> {
    let g: Vec<f64> = theta_warm.iter().zip(theta_prev).map(|(w, p)| w - p).collect();
    let metric = objective.metric(theta_warm)?.with_damping(config.delta);
    let d = metric.solve(&g, config.cutoff)?;
    let lambda = config.lambda();
    Ok(theta_warm.iter().zip(&d).map(|(w, di)| w - lambda * di).collect())
}

fn commit(state: &mut OptimizerState, theta: Vec<f64>, warm: WarmStart) -> Result<StepReport> {
    check_finite("parameters", &theta)?;
    state.theta = theta;
    finish_outer(state);
    Ok(StepReport {
        max_inner_grad_norm: warm.gradients.iter().map(|g| norm(g)).fold(0.0, f64::max),
        theta_warm: warm.theta,
    })
}

/// One outer iteration of LAWS: look around with K inner SGD steps, then a
/// natural-gradient step on the accumulated displacement from `θ_warm`.
pub fn laws_step(
    state: &mut OptimizerState,
    objective: &dyn Objective,
    config: &OptimizerConfig,
    rng: &mut dyn RngCore,
) -> Result<StepReport> {
    let t = state.t + 1;
    let rates = inner_rates(config, t);
    let theta_prev = state.theta.clone();
    let warm = warm_start(&theta_prev, config.warm_start, &rates, config.beta, |v| {
        objective.sample_gradient(v, rng)
    })?;
    state.fast.clone_from(&warm.theta);
    state.k = config.k;
    let theta = natural_interpolation(objective, config, &theta_prev, &warm.theta)?;
    commit(state, theta, warm)
}

fn inner_update(
    name: OptimizerName,
    v: &mut [f64],
    grad: &[f64],
    rate: f64,
    config: &OptimizerConfig,
    moments: &mut Moments,
    objective: &dyn Objective,
) -> Result<()> {
    match name {
        OptimizerName::Sgd => sgd_update(v, grad, rate),
        OptimizerName::Adagrad => adagrad_update(v, grad, rate, config.epsilon, moments),
        OptimizerName::Adam => {
            adam_update(v, grad, rate, config.beta1, config.beta2, config.epsilon, moments)
        }
        OptimizerName::Qng => qng_update(v, grad, objective, rate, config.delta, config.cutoff),
        other => Err(Error::Config(format!("{other} cannot be used as a warm-start optimizer"))),
    }
}

/// One outer iteration of generalized warm-start SGD with warm-start
/// optimizer `config.inner` and mixing rule `config.delta_variant`.
/// Inner-optimizer moments persist across outer iterations.
pub fn wssgd_step(
    state: &mut OptimizerState,
    objective: &dyn Objective,
    config: &OptimizerConfig,
    rng: &mut dyn RngCore,
) -> Result<StepReport> {
    let t = state.t + 1;
    let rates = inner_rates(config, t);
    let theta_prev = state.theta.clone();
    let warm = if config.inner == OptimizerName::Sgd {
        warm_start(&theta_prev, config.warm_start, &rates, config.beta, |v| {
            objective.sample_gradient(v, rng)
        })?
    } else {
        if config.warm_start != WarmStartStrategy::InnerSgd {
            return Err(Error::Config(format!(
                "warm-start strategy {} needs an sgd inner loop",
                config.warm_start
            )));
        }
        let mut v = theta_prev.clone();
        let mut gradients = Vec::with_capacity(config.k);
        for &rate in &rates {
            let g = objective.sample_gradient(&v, rng)?;
            inner_update(config.inner, &mut v, &g, rate, config, &mut state.moments, objective)?;
            gradients.push(g);
        }
        WarmStart { theta: v, gradients }
    };
    state.fast.clone_from(&warm.theta);
    state.k = config.k;

    let theta = match config.delta_variant {
        DeltaVariant::Lookahead => {
            let a = config.alpha;
            theta_prev
                .iter()
                .zip(&warm.theta)
                .map(|(p, w)| (1.0 - a) * p + a * w)
                .collect()
        }
        DeltaVariant::Fisher => natural_interpolation(objective, config, &theta_prev, &warm.theta)?,
        DeltaVariant::AdamLike => {
            let lambda = config.lambda();
            (0..theta_prev.len())
                .map(|i| {
                    let sq: f64 = warm.gradients.iter().map(|g| g[i] * g[i]).sum();
                    let d = 1.0 - lambda * sq.sqrt();
                    d * theta_prev[i] + (1.0 - d) * warm.theta[i]
                })
                .collect()
        }
    };
    commit(state, theta, warm)
}
