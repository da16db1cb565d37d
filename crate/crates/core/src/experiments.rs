//! Seeded experiment pipelines. Every runner is a pure function of its
//! arguments apart from the `wall_ms` column of the trace.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::ansatz::{build_h2_ansatz, build_random_layered, build_random_pqc, CostFunction};
use crate::classifier::{ClassifierModel, ClassifierObjective, Dataset, DEFAULT_LAYERS};
use crate::diff::{bp_variance_scan, BpRow};
use crate::error::{Error, Result};
use crate::gate::Pauli;
use crate::objective::Objective;
use crate::optim::{Optimizer, OptimizerConfig, OptimizerName, TraceRecord};
use crate::pauli::{PauliString, PauliSumHamiltonian};

/// Circuit seed of the reference 3-qubit, 4-parameter random circuit.
pub const REFERENCE_PQC_SEED: u64 = 7;
pub const REFERENCE_PQC_QUBITS: usize = 3;
pub const REFERENCE_PQC_PARAMS: usize = 4;
pub const DEFAULT_PQC_ITERATIONS: usize = 400;
pub const DEFAULT_IRIS_ITERATIONS: usize = 50;
/// Exact ground energy of the bundled H₂ Hamiltonian, in Hartree.
pub const H2_GROUND_ENERGY: f64 = -1.1361894;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExperimentKind {
    #[serde(rename = "random-pqc")]
    RandomPqc,
    #[serde(rename = "h2-vqe")]
    H2Vqe,
    #[serde(rename = "iris")]
    Iris,
    #[serde(rename = "bp-scan")]
    BpScan,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::RandomPqc => "random-pqc",
            ExperimentKind::H2Vqe => "h2-vqe",
            ExperimentKind::Iris => "iris",
            ExperimentKind::BpScan => "bp-scan",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-pqc" => Ok(ExperimentKind::RandomPqc),
            "h2-vqe" => Ok(ExperimentKind::H2Vqe),
            "iris" => Ok(ExperimentKind::Iris),
            "bp-scan" => Ok(ExperimentKind::BpScan),
            other => Err(Error::Config(format!(
                "unknown experiment {other:?}; expected one of: random-pqc, h2-vqe, iris, bp-scan"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub experiment: ExperimentKind,
    pub optimizer: OptimizerName,
    pub seed: u64,
    pub iterations: usize,
    pub config: OptimizerConfig,
    pub trace: Vec<TraceRecord>,
    pub final_theta: Vec<f64>,
    /// Set when a step failed; the trace holds everything up to the failure.
    pub aborted: Option<String>,
    pub provenance: String,
}

impl ExperimentResult {
    pub fn final_cost(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.cost)
    }

    /// First logged iteration whose cost is at or below `threshold`.
    pub fn iters_to_threshold(&self, threshold: f64) -> Option<usize> {
        self.trace.iter().find(|r| r.cost <= threshold).map(|r| r.iteration)
    }

    /// `iteration,cost,grad_norm,wall_ms[,<extra>...]`.
    pub fn trace_csv(&self) -> String {
        trace_to_csv(&self.trace)
    }
}

pub fn provenance() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

pub fn trace_to_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::from("iteration,cost,grad_norm,wall_ms");
    if let Some(first) = trace.first() {
        for (name, _) in &first.extra {
            out.push(',');
            out.push_str(name);
        }
    }
    out.push('\n');
    for r in trace {
        let _ = write!(out, "{},{},{},{:.3}", r.iteration, r.cost, r.grad_norm, r.wall_ms);
        for (_, v) in &r.extra {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Logs θ₀ as iteration 0, then steps until `iterations` or the first error.
fn run_loop<E>(
    objective: &dyn Objective,
    mut optimizer: Optimizer,
    iterations: usize,
    rng: &mut ChaCha8Rng,
    extra: E,
) -> (Vec<TraceRecord>, Vec<f64>, Option<String>)
where
    E: Fn(&[f64]) -> Result<Vec<(String, f64)>>,
{
    let start = Instant::now();
    let record = |iteration: usize, theta: &[f64]| -> Result<TraceRecord> {
        Ok(TraceRecord {
            iteration,
            cost: objective.cost(theta)?,
            grad_norm: norm(&objective.gradient(theta)?),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            extra: extra(theta)?,
        })
    };
    let mut trace = Vec::with_capacity(iterations + 1);
    match record(0, optimizer.theta()) {
        Ok(r) => trace.push(r),
        Err(e) => return (trace, optimizer.theta().to_vec(), Some(e.to_string())),
    }
    for it in 1..=iterations {
        let step = optimizer
            .step(objective, rng)
            .and_then(|_| record(it, optimizer.theta()));
        match step {
            Ok(r) => trace.push(r),
            Err(e) => return (trace, optimizer.theta().to_vec(), Some(format!("iteration {it}: {e}"))),
        }
    }
    (trace, optimizer.theta().to_vec(), None)
}

fn finish(
    experiment: ExperimentKind,
    name: OptimizerName,
    config: &OptimizerConfig,
    seed: u64,
    iterations: usize,
    (trace, final_theta, aborted): (Vec<TraceRecord>, Vec<f64>, Option<String>),
) -> ExperimentResult {
    ExperimentResult {
        experiment,
        optimizer: name,
        seed,
        iterations,
        config: config.clone(),
        trace,
        final_theta,
        aborted,
        provenance: provenance(),
    }
}

/// `Z₀Z₁ + Z₁Z₂`.
pub fn random_pqc_observable() -> PauliSumHamiltonian {
    PauliSumHamiltonian::new(
        3,
        vec![
            PauliString::new(1.0, &[(Pauli::Z, 0), (Pauli::Z, 1)]),
            PauliString::new(1.0, &[(Pauli::Z, 1), (Pauli::Z, 2)]),
        ],
    )
    .expect("observable is valid")
}

pub fn random_pqc_cost() -> Result<CostFunction> {
    let circuit = build_random_pqc(REFERENCE_PQC_QUBITS, REFERENCE_PQC_PARAMS, REFERENCE_PQC_SEED)?;
    CostFunction::new(circuit, random_pqc_observable())
}

/// θ₀ uniform on `[0, 2π)^n`, drawn from the experiment seed only so every
/// optimizer starts from the same point.
pub fn uniform_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

fn step_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x005E_ED0F_57E9)
}

/// Minimizes `Z₀Z₁ + Z₁Z₂` over the reference random circuit.
pub fn run_random_pqc(
    name: OptimizerName,
    config: &OptimizerConfig,
    seed: u64,
    iterations: usize,
) -> Result<ExperimentResult> {
    let cf = random_pqc_cost()?;
    let theta0 = uniform_start(cf.n_params(), seed);
    run_vqe(ExperimentKind::RandomPqc, &cf, theta0, name, config, seed, iterations)
}

pub fn h2_cost(hamiltonian: PauliSumHamiltonian) -> Result<CostFunction> {
    CostFunction::new(build_h2_ansatz(), hamiltonian)
}

/// Minimizes an arbitrary cost from `theta0`. The built-in experiments are
/// thin wrappers that fix the circuit, observable and start.
pub fn run_vqe(
    experiment: ExperimentKind,
    cf: &CostFunction,
    theta0: Vec<f64>,
    name: OptimizerName,
    config: &OptimizerConfig,
    seed: u64,
    iterations: usize,
) -> Result<ExperimentResult> {
    let opt = Optimizer::new(name, config.clone(), theta0)?;
    let out = run_loop(cf, opt, iterations, &mut step_rng(seed), |_| Ok(Vec::new()));
    Ok(finish(experiment, name, config, seed, iterations, out))
}

/// Accepts a Hamiltonian only if it reproduces the reference ground energy
/// within 5e-4 Ha.
pub fn check_h2_hamiltonian(hamiltonian: &PauliSumHamiltonian) -> Result<()> {
    let e0 = hamiltonian.exact_ground_energy()?;
    if (e0 - H2_GROUND_ENERGY).abs() > 5e-4 {
        return Err(Error::Config(format!(
            "Hamiltonian ground energy {e0} differs from {H2_GROUND_ENERGY} by more than 5e-4"
        )));
    }
    Ok(())
}

/// H₂ ground-state search from the Hartree-Fock point θ = 0.
pub fn run_h2_vqe_with(
    hamiltonian: PauliSumHamiltonian,
    name: OptimizerName,
    config: &OptimizerConfig,
    seed: u64,
    iterations: usize,
) -> Result<ExperimentResult> {
    check_h2_hamiltonian(&hamiltonian)?;
    let cf = h2_cost(hamiltonian)?;
    run_vqe(ExperimentKind::H2Vqe, &cf, vec![0.0; cf.n_params()], name, config, seed, iterations)
}

pub fn run_h2_vqe(
    name: OptimizerName,
    config: &OptimizerConfig,
    seed: u64,
    iterations: usize,
) -> Result<ExperimentResult> {
    run_h2_vqe_with(PauliSumHamiltonian::h2_sto3g(), name, config, seed, iterations)
}

/// Small-normal circuit angles (σ = 0.01) and zero bias.
pub fn classifier_start(n_params: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<f64> = (0..n_params)
        .map(|_| 0.01 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    if let Some(b) = p.last_mut() {
        *b = 0.0;
    }
    p
}

/// Trains the classifier and logs train/validation accuracy per iteration.
pub fn run_iris_classifier(
    name: OptimizerName,
    config: &OptimizerConfig,
    seed: u64,
    iterations: usize,
    dataset: &Dataset,
    batch_size: usize,
) -> Result<ExperimentResult> {
    if batch_size == 0 {
        return Err(Error::Config("batch size must be at least 1".into()));
    }
    let objective = ClassifierObjective {
        model: ClassifierModel::standard(DEFAULT_LAYERS)?,
        dataset,
        batch_size,
    };
    let opt = Optimizer::new(name, config.clone(), classifier_start(objective.n_params(), seed))?;
    let extra = |p: &[f64]| -> Result<Vec<(String, f64)>> {
        Ok(vec![
            ("acc_train".to_string(), objective.train_accuracy(p)?),
            ("acc_val".to_string(), objective.validation_accuracy(p)?),
        ])
    };
    let out = run_loop(&objective, opt, iterations, &mut step_rng(seed), extra);
    Ok(finish(ExperimentKind::Iris, name, config, seed, iterations, out))
}

/// Gradient-variance scan over random circuits with
/// `layers_per_qubit · n` layers of rotations.
pub fn run_bp_scan(qubits: &[usize], n_samples: usize, layers_per_qubit: usize, seed: u64) -> Result<Vec<BpRow>> {
    if layers_per_qubit == 0 {
        return Err(Error::Config("layers per qubit must be at least 1".into()));
    }
    bp_variance_scan(
        |n, s| build_random_layered(n, layers_per_qubit * n, s),
        qubits,
        n_samples,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_iterations_logs_initial_cost() {
        let r = run_random_pqc(OptimizerName::Laws, &OptimizerConfig::default(), 3, 0).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.trace[0].iteration, 0);
        assert!(r.aborted.is_none());
    }

    #[test]
    fn start_is_shared_across_optimizers() {
        let cfg = OptimizerConfig::default();
        let a = run_random_pqc(OptimizerName::Sgd, &cfg, 11, 2).unwrap();
        let b = run_random_pqc(OptimizerName::Qng, &cfg, 11, 2).unwrap();
        assert_eq!(a.trace[0].cost, b.trace[0].cost);
        assert_eq!(a.trace[0].grad_norm, b.trace[0].grad_norm);
    }

    #[test]
    fn csv_layout() {
        let r = run_random_pqc(OptimizerName::Sgd, &OptimizerConfig::default(), 1, 3).unwrap();
        let csv = r.trace_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iteration,cost,grad_norm,wall_ms");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("3,"));
    }

    #[test]
    fn h2_rejects_wrong_hamiltonian() {
        let h = PauliSumHamiltonian::new(4, vec![PauliString::new(1.0, &[(Pauli::Z, 0)])]).unwrap();
        let r = run_h2_vqe_with(h, OptimizerName::Laws, &OptimizerConfig::default(), 0, 1);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn h2_initial_energy_is_hartree_fock() {
        let r = run_h2_vqe(OptimizerName::Laws, &OptimizerConfig::default(), 0, 0).unwrap();
        assert!(r.trace[0].cost > H2_GROUND_ENERGY);
        assert!((r.trace[0].cost - (-1.1173490349902797)).abs() < 1e-12);
    }

    #[test]
    fn experiment_names_parse() {
        for k in [ExperimentKind::RandomPqc, ExperimentKind::H2Vqe, ExperimentKind::Iris, ExperimentKind::BpScan] {
            assert_eq!(k.as_str().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("vqe".parse::<ExperimentKind>().is_err());
    }
}
