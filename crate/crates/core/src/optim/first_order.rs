//! Single-step updates: SGD, AdaGrad, Adam (moving-average form without
//! bias correction), and quantum natural gradient.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::objective::Objective;

/// Per-coordinate accumulators of AdaGrad and Adam.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Moments {
    pub first: Vec<f64>,
    /// Sum of squares (AdaGrad) or `(1 − β₂) Σ β₂^{t−i} g_i²` (Adam).
    pub second: Vec<f64>,
    pub steps: u64,
}

impl Moments {
    fn ensure(&mut self, n: usize) {
        if self.first.len() != n {
            self.first = vec![0.0; n];
            self.second = vec![0.0; n];
            self.steps = 0;
        }
    }
}

/// Mutable state of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    /// Slow weights θ_t.
    pub theta: Vec<f64>,
    /// Inner iterate v_k^t; equals `theta` between outer steps.
    pub fast: Vec<f64>,
    /// Completed outer iterations.
    pub t: usize,
    /// Inner step within the current outer iteration.
    pub k: usize,
    pub moments: Moments,
}

impl OptimizerState {
    pub fn new(theta: Vec<f64>) -> OptimizerState {
        OptimizerState {
            fast: theta.clone(),
            theta,
            t: 0,
            k: 0,
            moments: Moments::default(),
        }
    }
}

pub(crate) fn check_finite(label: &str, v: &[f64]) -> Result<()> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Numeric(format!("{label} component {i} is {}", v[i])));
    }
    Ok(())
}

fn check_len(theta: &[f64], grad: &[f64]) -> Result<()> {
    if theta.len() != grad.len() {
        return Err(Error::Usage(format!(
            "gradient has {} entries, parameters {}",
            grad.len(),
            theta.len()
        )));
    }
    check_finite("gradient", grad)
}

/// `θ ← θ − η g`.
pub fn sgd_update(theta: &mut [f64], grad: &[f64], eta: f64) -> Result<()> {
    check_len(theta, grad)?;
    for (t, g) in theta.iter_mut().zip(grad) {
        *t -= eta * g;
    }
    check_finite("parameters", theta)
}

/// `θ ← θ − η g / (√(Σ g²) + ε)`.
pub fn adagrad_update(theta: &mut [f64], grad: &[f64], eta: f64, epsilon: f64, m: &mut Moments) -> Result<()> {
    check_len(theta, grad)?;
    m.ensure(theta.len());
    m.steps += 1;
    for i in 0..theta.len() {
        m.second[i] += grad[i] * grad[i];
        let denom = m.second[i].sqrt() + epsilon;
        if denom > 0.0 {
            theta[i] -= eta * grad[i] / denom;
        }
    }
    check_finite("parameters", theta)
}

/// `m ← β₁m + (1−β₁)g`, `s ← β₂s + (1−β₂)g²`, `θ ← θ − η m / (√s + ε)`.
pub fn adam_update(
    theta: &mut [f64],
    grad: &[f64],
    eta: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: &mut Moments,
) -> Result<()> {
    check_len(theta, grad)?;
    m.ensure(theta.len());
    m.steps += 1;
    for i in 0..theta.len() {
        m.first[i] = beta1 * m.first[i] + (1.0 - beta1) * grad[i];
        m.second[i] = beta2 * m.second[i] + (1.0 - beta2) * grad[i] * grad[i];
        let denom = m.second[i].sqrt() + epsilon;
        if denom > 0.0 {
            theta[i] -= eta * m.first[i] / denom;
        }
    }
    check_finite("parameters", theta)
}

/// `θ ← θ − η pinv(F(θ) + δI) g`.
pub fn qng_update(
    theta: &mut [f64],
    grad: &[f64],
    objective: &dyn Objective,
    eta: f64,
    delta: f64,
    cutoff: f64,
) -> Result<()> {
    check_len(theta, grad)?;
    let metric = objective.metric(theta)?.with_damping(delta);
    let direction = metric.solve(grad, cutoff)?;
    check_finite("natural gradient", &direction)?;
    sgd_update(theta, &direction, eta)
}

pub fn sgd_step(state: &mut OptimizerState, grad: &[f64], eta: f64) -> Result<()> {
    sgd_update(&mut state.theta, grad, eta)?;
    finish_outer(state);
    Ok(())
}

pub fn adagrad_step(state: &mut OptimizerState, grad: &[f64], eta: f64, epsilon: f64) -> Result<()> {
    adagrad_update(&mut state.theta, grad, eta, epsilon, &mut state.moments)?;
    finish_outer(state);
    Ok(())
}

pub fn adam_step(
    state: &mut OptimizerState,
    grad: &[f64],
    eta: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) -> Result<()> {
    adam_update(&mut state.theta, grad, eta, beta1, beta2, epsilon, &mut state.moments)?;
    finish_outer(state);
    Ok(())
}

/// Samples a gradient at the current θ and takes one natural-gradient step.
pub fn qng_step(
    state: &mut OptimizerState,
    objective: &dyn Objective,
    eta: f64,
    delta: f64,
    cutoff: f64,
    rng: &mut dyn RngCore,
) -> Result<()> {
    let grad = objective.sample_gradient(&state.theta, rng)?;
    qng_update(&mut state.theta, &grad, objective, eta, delta, cutoff)?;
    finish_outer(state);
    Ok(())
}

pub(crate) fn finish_outer(state: &mut OptimizerState) {
    state.t += 1;
    state.k = 0;
    state.fast.clone_from(&state.theta);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_examples() {
        let mut s = OptimizerState::new(vec![1.0]);
        sgd_step(&mut s, &[0.0], 0.1).unwrap();
        assert_eq!(s.theta, vec![1.0]);
        sgd_step(&mut s, &[2.0], 0.1).unwrap();
        assert!((s.theta[0] - 0.8).abs() < 1e-15);
        assert_eq!(s.fast, s.theta);
        assert_eq!(s.t, 2);

        let mut a = OptimizerState::new(vec![0.3, -0.2]);
        let mut b = a.clone();
        let g = [0.7, -1.3];
        sgd_step(&mut a, &g, 0.05).unwrap();
        sgd_step(&mut a, &g, 0.05).unwrap();
        sgd_step(&mut b, &g, 0.1).unwrap();
        for (x, y) in a.theta.iter().zip(&b.theta) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn non_finite_gradient_is_numeric_error() {
        let mut s = OptimizerState::new(vec![1.0]);
        assert!(matches!(sgd_step(&mut s, &[f64::NAN], 0.1), Err(Error::Numeric(_))));
        assert!(matches!(adam_step(&mut s, &[f64::INFINITY], 0.1, 0.9, 0.999, 1e-8), Err(Error::Numeric(_))));
        assert!(matches!(sgd_step(&mut s, &[1.0, 2.0], 0.1), Err(Error::Usage(_))));
    }

    #[test]
    fn adagrad_first_step_self_normalizes() {
        let mut s = OptimizerState::new(vec![2.0]);
        adagrad_step(&mut s, &[3.0], 1.0, 0.0).unwrap();
        assert!((s.theta[0] - 1.0).abs() < 1e-15);
        for _ in 0..5 {
            adagrad_step(&mut s, &[0.0], 1.0, 0.0).unwrap();
        }
        assert!((s.theta[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_leaves_adam_and_adagrad_fixed() {
        let mut a = OptimizerState::new(vec![0.4, -1.0]);
        let mut b = a.clone();
        for _ in 0..10 {
            adam_step(&mut a, &[0.0, 0.0], 0.1, 0.9, 0.999, 1e-8).unwrap();
            adagrad_step(&mut b, &[0.0, 0.0], 0.1, 1e-8).unwrap();
        }
        assert_eq!(a.theta, vec![0.4, -1.0]);
        assert_eq!(b.theta, vec![0.4, -1.0]);
    }
}
