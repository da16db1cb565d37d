mod common;

use common::max_abs_diff;
use laws_vqa::diff::DEFAULT_DAMPING;
use laws_vqa::gate::Gate;
use laws_vqa::optim::{
    adagrad_step, adam_step, laws_step, lr_schedule, qng_step, sgd_step, warm_start, wssgd_step,
    DeltaVariant, OptimizerState, Schedule, WarmStartStrategy,
};
use laws_vqa::{
    CostFunction, MetricTensor, Objective, Optimizer, OptimizerConfig, OptimizerName, ParameterizedCircuit,
    PauliSumHamiltonian, Result,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `½ Σ a_i θ_i²` with a metric chosen by the test.
struct Quadratic {
    a: Vec<f64>,
    metric_scale: f64,
}

impl Objective for Quadratic {
    fn n_params(&self) -> usize {
        self.a.len()
    }
    fn cost(&self, theta: &[f64]) -> Result<f64> {
        Ok(0.5 * self.a.iter().zip(theta).map(|(a, t)| a * t * t).sum::<f64>())
    }
    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(self.a.iter().zip(theta).map(|(a, t)| a * t).collect())
    }
    fn metric(&self, _theta: &[f64]) -> Result<MetricTensor> {
        let n = self.a.len();
        MetricTensor::new(nalgebra::DMatrix::identity(n, n) * self.metric_scale, 0.0)
    }
}

/// Always reports a zero gradient, but consumes randomness like a sampler.
struct Flat(usize);

impl Objective for Flat {
    fn n_params(&self) -> usize {
        self.0
    }
    fn cost(&self, _theta: &[f64]) -> Result<f64> {
        Ok(0.0)
    }
    fn gradient(&self, _theta: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0; self.0])
    }
    fn sample_gradient(&self, theta: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        rng.next_u64();
        self.gradient(theta)
    }
    fn metric(&self, _theta: &[f64]) -> Result<MetricTensor> {
        Ok(MetricTensor::identity(self.0))
    }
}

/// `cos θ`: RX(θ) on |0⟩ measured with Z. Its metric is 1/4 everywhere.
fn cos_cost() -> CostFunction {
    let c = ParameterizedCircuit::new(1, vec![Gate::rx(0, 0)]).unwrap();
    CostFunction::new(c, PauliSumHamiltonian::parse("1.0 Z0", Some(1), "inline").unwrap()).unwrap()
}

/// `1 − cos θ`.
fn one_minus_cos() -> CostFunction {
    let c = ParameterizedCircuit::new(1, vec![Gate::rx(0, 0)]).unwrap();
    CostFunction::new(c, PauliSumHamiltonian::parse("1.0\n-1.0 Z0", Some(1), "inline").unwrap()).unwrap()
}

fn quadratic() -> Quadratic {
    Quadratic { a: vec![1.0, 0.5, 2.0, 0.1], metric_scale: 1.0 }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0)
}

fn sgd_steps(obj: &dyn Objective, theta: &[f64], mu: f64, k: usize) -> Vec<f64> {
    let mut v = theta.to_vec();
    for _ in 0..k {
        let g = obj.gradient(&v).unwrap();
        for (vi, gi) in v.iter_mut().zip(g) {
            *vi -= mu * gi;
        }
    }
    v
}

#[test]
fn lookahead_variant_matches_standard_lookahead() {
    let obj = quadratic();
    let cfg = OptimizerConfig { delta_variant: DeltaVariant::Lookahead, alpha: 0.3, mu: 0.2, k: 4, ..Default::default() };
    let theta0 = vec![0.4, -1.2, 0.9, 2.0];
    let mut s = OptimizerState::new(theta0.clone());
    wssgd_step(&mut s, &obj, &cfg, &mut rng()).unwrap();
    let vk = sgd_steps(&obj, &theta0, 0.2, 4);
    let expect: Vec<f64> = theta0.iter().zip(&vk).map(|(p, v)| 0.7 * p + 0.3 * v).collect();
    assert!(max_abs_diff(&s.theta, &expect) < 1e-12);

    let mut l = Optimizer::new(OptimizerName::Lookahead, cfg.clone(), theta0).unwrap();
    l.step(&obj, &mut rng()).unwrap();
    assert!(max_abs_diff(l.theta(), &expect) < 1e-12);
}

#[test]
fn fisher_variant_with_identity_metric_is_lookahead_with_one_minus_lambda() {
    let obj = quadratic();
    let k = 4;
    let alpha = 0.3;
    // λ = η/K = 1 − α.
    let cfg = OptimizerConfig {
        delta_variant: DeltaVariant::Fisher,
        eta: (1.0 - alpha) * k as f64,
        delta: 0.0,
        mu: 0.2,
        k,
        ..Default::default()
    };
    let theta0 = vec![0.4, -1.2, 0.9, 2.0];
    let mut s = OptimizerState::new(theta0.clone());
    wssgd_step(&mut s, &obj, &cfg, &mut rng()).unwrap();
    let vk = sgd_steps(&obj, &theta0, 0.2, k);
    let expect: Vec<f64> = theta0.iter().zip(&vk).map(|(p, v)| (1.0 - alpha) * p + alpha * v).collect();
    assert!(max_abs_diff(&s.theta, &expect) < 1e-12);

    let mut laws = OptimizerState::new(theta0);
    laws_step(&mut laws, &obj, &cfg, &mut rng()).unwrap();
    assert!(max_abs_diff(&laws.theta, &expect) < 1e-12);
}

#[test]
fn delta_one_and_delta_zero() {
    let theta0 = vec![0.4, -1.2, 0.9, 2.0];
    // λF⁻¹ = I keeps θ_{t−1}.
    let obj = quadratic();
    let cfg = OptimizerConfig { eta: 5.0, k: 5, delta: 0.0, ..Default::default() };
    let mut s = OptimizerState::new(theta0.clone());
    wssgd_step(&mut s, &obj, &cfg, &mut rng()).unwrap();
    assert!(max_abs_diff(&s.theta, &theta0) < 1e-12);
    // λF⁻¹ → 0 lands on θ_warm.
    let stiff = Quadratic { metric_scale: 1e15, ..quadratic() };
    let cfg = OptimizerConfig { delta: 0.0, mu: 0.1, ..Default::default() };
    let mut s = OptimizerState::new(theta0.clone());
    let report = wssgd_step(&mut s, &stiff, &cfg, &mut rng()).unwrap();
    assert!(max_abs_diff(&s.theta, &report.theta_warm) < 1e-12);
    assert!(max_abs_diff(&report.theta_warm, &sgd_steps(&stiff, &theta0, 0.1, 5)) < 1e-12);
}

#[test]
fn laws_single_inner_step_closed_form() {
    let cf = cos_cost();
    for &(theta0, mu, eta) in &[(0.3, 0.5, 0.01), (-2.0, 0.1, 0.3), (2.5, 0.9, 1.0)] {
        let cfg = OptimizerConfig { k: 1, mu, eta, ..Default::default() };
        let mut s = OptimizerState::new(vec![theta0]);
        laws_step(&mut s, &cf, &cfg, &mut rng()).unwrap();
        let warm = theta0 + mu * f64::sin(theta0);
        let expect = warm - eta / (0.25 + DEFAULT_DAMPING) * (warm - theta0);
        assert!((s.theta[0] - expect).abs() < 1e-12, "{} vs {expect}", s.theta[0]);
    }
}

#[test]
fn laws_three_inner_steps_hand_unrolled() {
    let cf = cos_cost();
    let (mu, eta, k) = (0.5, 0.01, 3);
    let cfg = OptimizerConfig { k, mu, eta, ..Default::default() };
    let mut s = OptimizerState::new(vec![0.7]);
    let mut theta = 0.7;
    for _ in 0..3 {
        laws_step(&mut s, &cf, &cfg, &mut rng()).unwrap();
        let v1 = theta + mu * f64::sin(theta);
        let v2 = v1 + mu * f64::sin(v1);
        let v3 = v2 + mu * f64::sin(v2);
        theta = v3 - (eta / 3.0) / (0.25 + DEFAULT_DAMPING) * (v3 - theta);
        assert!((s.theta[0] - theta).abs() < 1e-12);
        assert_eq!(s.fast, s.theta);
    }
}

#[test]
fn every_optimizer_fixes_theta_at_zero_gradient() {
    let obj = Flat(3);
    let theta0 = vec![0.1, -0.5, 2.0];
    for &name in OptimizerName::ALL {
        let mut opt = Optimizer::new(name, OptimizerConfig::default(), theta0.clone()).unwrap();
        let mut r = rng();
        for _ in 0..5 {
            opt.step(&obj, &mut r).unwrap();
        }
        assert_eq!(opt.theta(), &theta0[..], "{name}");
    }
}

#[test]
fn optimizers_are_deterministic() {
    let obj = quadratic();
    for &name in OptimizerName::ALL {
        let run = || {
            let mut opt = Optimizer::new(name, OptimizerConfig::default(), vec![0.4, -1.2, 0.9, 2.0]).unwrap();
            let mut r = rng();
            (0..10).map(|_| { opt.step(&obj, &mut r).unwrap(); opt.theta().to_vec() }).collect::<Vec<_>>()
        };
        assert_eq!(run(), run(), "{name}");
    }
}

#[test]
fn descent_sanity_on_one_minus_cos() {
    let cf = one_minus_cos();
    let mut rng0 = ChaCha8Rng::seed_from_u64(17);
    let starts: Vec<f64> = (0..20).map(|_| rng0.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
    for &name in OptimizerName::ALL {
        for &t0 in &starts {
            let mut opt = Optimizer::new(name, OptimizerConfig::default(), vec![t0]).unwrap();
            let mut r = rng();
            let mut costs = Vec::new();
            for _ in 0..60 {
                opt.step(&cf, &mut r).unwrap();
                costs.push(cf.cost(opt.theta()).unwrap());
            }
            if name == OptimizerName::Adam {
                // Normalized momentum steps of size ~η oscillate around the
                // minimum, so only net progress is checked.
                assert!(costs[59] < costs[5], "{name} from {t0}");
                continue;
            }
            for w in costs[5..].windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{name} from {t0}: {} -> {}", w[0], w[1]);
            }
        }
    }
}

#[test]
fn warm_start_stays_local() {
    let cf = cos_cost();
    for &strategy in WarmStartStrategy::ALL {
        for schedule in [Schedule::Constant, Schedule::Theorem1] {
            let cfg = OptimizerConfig { warm_start: strategy, schedule, ..Default::default() };
            let mut s = OptimizerState::new(vec![1.3]);
            for t in 1..=4 {
                let prev = s.theta.clone();
                let rep = laws_step(&mut s, &cf, &cfg, &mut rng()).unwrap();
                let budget: f64 = (1..=cfg.k).map(|k| lr_schedule(schedule, t, k, cfg.k, cfg.c0, cfg.mu)).sum::<f64>()
                    * rep.max_inner_grad_norm;
                let moved = (rep.theta_warm[0] - prev[0]).abs();
                assert!(moved <= budget + 1e-15, "{strategy} {schedule}: {moved} > {budget}");
            }
        }
    }
}

#[test]
fn warm_start_strategy_examples() {
    let obj = quadratic();
    let theta = vec![0.4, -1.2, 0.9, 2.0];
    let grad = |v: &[f64]| obj.gradient(v);
    let a = warm_start(&theta, WarmStartStrategy::InnerSgd, &[0.3], 0.9, grad).unwrap();
    let b = warm_start(&theta, WarmStartStrategy::AveragedAtTheta, &[0.3], 0.9, grad).unwrap();
    assert!(max_abs_diff(&a.theta, &b.theta) < 1e-15);

    let a = warm_start(&theta, WarmStartStrategy::InnerSgd, &[0.3; 6], 0.9, grad).unwrap();
    assert!(max_abs_diff(&a.theta, &sgd_steps(&obj, &theta, 0.3, 6)) < 1e-12);

    let zero = |_: &[f64]| Ok(vec![0.0; 4]);
    for &s in WarmStartStrategy::ALL {
        assert_eq!(warm_start(&theta, s, &[0.5; 3], 0.9, zero).unwrap().theta, theta);
    }
}

#[test]
fn adagrad_matches_recomputation() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let grads: Vec<Vec<f64>> = (0..10).map(|_| (0..3).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
    let (eta, eps) = (0.1, 1e-8);
    let mut s = OptimizerState::new(vec![0.5, -0.5, 1.0]);
    for g in &grads {
        adagrad_step(&mut s, g, eta, eps).unwrap();
    }
    for i in 0..3 {
        let mut theta = [0.5, -0.5, 1.0][i];
        for t in 0..grads.len() {
            let sum: f64 = grads[..=t].iter().map(|g| g[i] * g[i]).sum();
            theta -= eta * grads[t][i] / (sum.sqrt() + eps);
        }
        assert!((s.theta[i] - theta).abs() < 1e-12);
    }
}

#[test]
fn adam_matches_recomputation() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let grads: Vec<Vec<f64>> = (0..20).map(|_| (0..3).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
    let (eta, b1, b2, eps) = (0.05, 0.9, 0.999, 1e-8);
    let mut s = OptimizerState::new(vec![0.5, -0.5, 1.0]);
    for g in &grads {
        adam_step(&mut s, g, eta, b1, b2, eps).unwrap();
    }
    for i in 0..3 {
        let mut theta = [0.5, -0.5, 1.0][i];
        for t in 0..grads.len() {
            let m: f64 = (0..=t).map(|j| (1.0 - b1) * b1.powi((t - j) as i32) * grads[j][i]).sum();
            let v: f64 = (0..=t).map(|j| (1.0 - b2) * b2.powi((t - j) as i32) * grads[j][i].powi(2)).sum();
            theta -= eta * m / (v.sqrt() + eps);
        }
        assert!((s.theta[i] - theta).abs() < 1e-12);
    }
}

#[test]
fn adam_constant_gradient_step_limit() {
    let (eta, g, eps) = (0.01, 0.3, 1e-3);
    let mut s = OptimizerState::new(vec![0.0]);
    let mut last = 0.0;
    for _ in 0..30_000 {
        last = s.theta[0];
        adam_step(&mut s, &[g], eta, 0.9, 0.999, eps).unwrap();
    }
    let step = last - s.theta[0];
    assert!((step - eta * g / (g + eps)).abs() < 1e-9, "{step}");
}

#[test]
fn qng_examples() {
    // Identity metric: plain SGD.
    let obj = quadratic();
    let mut a = OptimizerState::new(vec![0.4, -1.2, 0.9, 2.0]);
    let mut b = a.clone();
    qng_step(&mut a, &obj, 0.1, 0.0, 1e-9, &mut rng()).unwrap();
    let g = obj.gradient(&b.theta).unwrap();
    sgd_step(&mut b, &g, 0.1).unwrap();
    assert!(max_abs_diff(&a.theta, &b.theta) < 1e-15);

    // RY on |0⟩ has F = 1/4: four times the vanilla step.
    let c = ParameterizedCircuit::new(1, vec![Gate::ry(0, 0)]).unwrap();
    let cf = CostFunction::new(c, PauliSumHamiltonian::parse("1.0 Z0", Some(1), "inline").unwrap()).unwrap();
    let mut q = OptimizerState::new(vec![0.8]);
    let g = cf.gradient(&[0.8]).unwrap();
    qng_step(&mut q, &cf, 0.05, 0.0, 1e-9, &mut rng()).unwrap();
    assert!(((0.8 - q.theta[0]) - 4.0 * 0.05 * g[0]).abs() < 1e-14);

    let cf = cos_cost();
    let mut s = OptimizerState::new(vec![0.3]);
    let mut steps = 0;
    while (cf.cost(&s.theta).unwrap() + 1.0).abs() >= 1e-6 {
        qng_step(&mut s, &cf, 0.1, DEFAULT_DAMPING, 1e-9, &mut rng()).unwrap();
        steps += 1;
        assert!(steps <= 200);
    }
}

#[test]
fn adam_like_delta_uses_accumulated_squares() {
    let obj = quadratic();
    let cfg = OptimizerConfig { delta_variant: DeltaVariant::AdamLike, mu: 0.2, k: 3, eta: 0.3, ..Default::default() };
    let theta0 = vec![0.4, -1.2, 0.9, 2.0];
    let mut s = OptimizerState::new(theta0.clone());
    wssgd_step(&mut s, &obj, &cfg, &mut rng()).unwrap();
    let mut v = theta0.clone();
    let mut sq = [0.0; 4];
    for _ in 0..3 {
        let g = obj.gradient(&v).unwrap();
        for i in 0..4 {
            sq[i] += g[i] * g[i];
            v[i] -= 0.2 * g[i];
        }
    }
    for i in 0..4 {
        let d = 1.0 - 0.1 * sq[i].sqrt();
        assert!((s.theta[i] - (d * theta0[i] + (1.0 - d) * v[i])).abs() < 1e-12);
    }
}

#[test]
fn config_rejects_bad_values() {
    let bad = [
        OptimizerConfig { eta: 0.0, ..Default::default() },
        OptimizerConfig { mu: f64::NAN, ..Default::default() },
        OptimizerConfig { k: 0, ..Default::default() },
        OptimizerConfig { alpha: 1.0, ..Default::default() },
        OptimizerConfig { c0: 1.5, ..Default::default() },
        OptimizerConfig { inner: OptimizerName::Laws, ..Default::default() },
    ];
    for c in bad {
        assert!(Optimizer::new(OptimizerName::Laws, c, vec![0.0]).is_err());
    }
    assert!("lawz".parse::<OptimizerName>().unwrap_err().to_string().contains("laws"));
}
