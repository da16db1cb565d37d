//! Two-class variational classifier on amplitude-encoded features.
//!
//! Each sample keeps its first two features, is padded with the constants
//! `(0.3, 0.0)` and L2-normalized into a 2-qubit state. The model output is
//! `f(x) = ⟨Z₀⟩ + b` after the trainable circuit, the prediction is its
//! sign, and training minimizes the square loss `(y − f(x))²`.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{build_hardware_efficient, CostFunction, Entangler, ParameterizedCircuit};
use crate::diff::{fubini_study_metric, parameter_shift_gradient, z0_observable, MetricTensor};
use crate::error::{Error, Result};
use crate::gate::Pauli;
use crate::objective::Objective;
use crate::state::StateVector;

pub const PAD: [f64; 2] = [0.3, 0.0];
pub const DEFAULT_LAYERS: usize = 6;
pub const DEFAULT_BATCH_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Padded, normalized 4-vector.
    pub features: Vec<f64>,
    pub state: StateVector,
    /// −1 or +1.
    pub label: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Encodes the first two raw features as a normalized 2-qubit state.
pub fn encode(f1: f64, f2: f64) -> Result<Sample> {
    let raw = [f1, f2, PAD[0], PAD[1]];
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let features: Vec<f64> = raw.iter().map(|v| v / norm).collect();
    let state = StateVector::from_real_normalized(&features)?;
    Ok(Sample { features, state, label: 0.0 })
}

fn parse_label(tok: &str) -> Option<f64> {
    let v: f64 = tok.trim().parse().ok()?;
    if v == 0.0 || v == -1.0 {
        Some(-1.0)
    } else if v == 1.0 {
        Some(1.0)
    } else {
        None
    }
}

/// Reads `f1,f2,f3,f4,label` rows (header optional; labels {0,1} or
/// {−1,1}), shuffles with `seed`, and splits off `train_fraction` for
/// training.
pub fn parse_iris(text: &str, seed: u64, train_fraction: f64, source_name: &str) -> Result<Dataset> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!("train fraction must lie in (0, 1), got {train_fraction}")));
    }
    let mut samples = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if lineno == 0 && fields.first().is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let err = |msg: String| Error::parse(source_name, lineno + 1, msg);
        if fields.len() != 5 {
            return Err(err(format!("expected 5 columns, found {}", fields.len())));
        }
        let mut values = [0.0; 4];
        for (i, v) in values.iter_mut().enumerate() {
            *v = fields[i]
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| err(format!("bad feature {:?}", fields[i])))?;
        }
        let label = parse_label(fields[4]).ok_or_else(|| err(format!("bad label {:?}", fields[4])))?;
        let mut s = encode(values[0], values[1]).map_err(|e| err(e.to_string()))?;
        s.label = label;
        samples.push(s);
    }
    let positives = samples.iter().filter(|s| s.label > 0.0).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::parse(source_name, 0, "both classes must be present"));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((samples.len() as f64) * train_fraction).round() as usize;
    let n_train = n_train.clamp(1, samples.len() - 1);
    let validation = order.split_off(n_train);
    Ok(Dataset { samples, train: order, validation })
}

pub fn load_iris(path: &Path, seed: u64, train_fraction: f64) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_iris(&text, seed, train_fraction, &path.display().to_string())
}

/// The bundled setosa-vs-versicolor table (100 rows, standardized features).
pub fn bundled_iris(seed: u64, train_fraction: f64) -> Result<Dataset> {
    parse_iris(
        include_str!("../data/iris_setosa_versicolor.csv"),
        seed,
        train_fraction,
        "iris_setosa_versicolor.csv",
    )
}

/// Circuit plus readout. Parameters are the circuit angles followed by the
/// bias as the last coordinate.
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    circuit: ParameterizedCircuit,
}

impl ClassifierModel {
    pub fn new(circuit: ParameterizedCircuit) -> Result<ClassifierModel> {
        if circuit.n_qubits() != 2 {
            return Err(Error::Usage("classifier circuit must act on 2 qubits".into()));
        }
        Ok(ClassifierModel { circuit })
    }

    /// 2 qubits, `layers` × ([RY, RZ] per qubit + CNOT).
    pub fn standard(layers: usize) -> Result<ClassifierModel> {
        ClassifierModel::new(build_hardware_efficient(2, layers, &[Pauli::Y, Pauli::Z], Entangler::Chain)?)
    }

    pub fn circuit(&self) -> &ParameterizedCircuit {
        &self.circuit
    }

    /// Circuit angles plus one bias.
    pub fn n_params(&self) -> usize {
        self.circuit.n_params() + 1
    }

    fn split<'a>(&self, params: &'a [f64]) -> Result<(&'a [f64], f64)> {
        if params.len() != self.n_params() {
            return Err(Error::Usage(format!(
                "classifier expects {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        let (theta, bias) = params.split_at(self.circuit.n_params());
        Ok((theta, bias[0]))
    }

    fn cost_function(&self, sample: &Sample) -> Result<CostFunction> {
        CostFunction::with_input(self.circuit.clone(), z0_observable(2), sample.state.clone())
    }

    pub fn output(&self, params: &[f64], sample: &Sample) -> Result<f64> {
        let (theta, bias) = self.split(params)?;
        Ok(self.cost_function(sample)?.cost(theta)? + bias)
    }

    pub fn predict(&self, params: &[f64], sample: &Sample) -> Result<f64> {
        Ok(if self.output(params, sample)? >= 0.0 { 1.0 } else { -1.0 })
    }

    pub fn loss(&self, params: &[f64], sample: &Sample) -> Result<f64> {
        Ok((sample.label - self.output(params, sample)?).powi(2))
    }

    /// Gradient of the square loss for one sample.
    pub fn loss_gradient(&self, params: &[f64], sample: &Sample) -> Result<Vec<f64>> {
        let (theta, bias) = self.split(params)?;
        let cf = self.cost_function(sample)?;
        let residual = sample.label - (cf.cost(theta)? + bias);
        let mut g: Vec<f64> = parameter_shift_gradient(&cf, theta)?
            .into_iter()
            .map(|d| -2.0 * residual * d)
            .collect();
        g.push(-2.0 * residual);
        Ok(g)
    }

    pub fn accuracy(&self, params: &[f64], samples: &[&Sample]) -> Result<f64> {
        if samples.is_empty() {
            return Ok(0.0);
        }
        let mut hits = 0usize;
        for s in samples {
            if self.predict(params, s)? == s.label {
                hits += 1;
            }
        }
        Ok(hits as f64 / samples.len() as f64)
    }
}

/// Mean per-sample loss gradient over `batch`.
pub fn stochastic_gradient(model: &ClassifierModel, params: &[f64], batch: &[&Sample]) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::Usage("batch is empty".into()));
    }
    let per_sample: Vec<Vec<f64>> = batch
        .par_iter()
        .map(|s| model.loss_gradient(params, s))
        .collect::<Result<_>>()?;
    let mut mean = vec![0.0; model.n_params()];
    for g in &per_sample {
        for (m, x) in mean.iter_mut().zip(g) {
            *m += x;
        }
    }
    let n = batch.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(mean)
}

/// Training objective: mean square loss over the training split, with
/// mini-batches drawn uniformly with replacement.
#[derive(Debug, Clone)]
pub struct ClassifierObjective<'a> {
    pub model: ClassifierModel,
    pub dataset: &'a Dataset,
    pub batch_size: usize,
}

impl ClassifierObjective<'_> {
    fn train_samples(&self) -> Vec<&Sample> {
        self.dataset.train.iter().map(|&i| &self.dataset.samples[i]).collect()
    }

    pub fn validation_samples(&self) -> Vec<&Sample> {
        self.dataset.validation.iter().map(|&i| &self.dataset.samples[i]).collect()
    }

    pub fn train_accuracy(&self, params: &[f64]) -> Result<f64> {
        self.model.accuracy(params, &self.train_samples())
    }

    pub fn validation_accuracy(&self, params: &[f64]) -> Result<f64> {
        self.model.accuracy(params, &self.validation_samples())
    }
}

impl Objective for ClassifierObjective<'_> {
    fn n_params(&self) -> usize {
        self.model.n_params()
    }

    fn cost(&self, params: &[f64]) -> Result<f64> {
        let train = self.train_samples();
        let mut total = 0.0;
        for s in &train {
            total += self.model.loss(params, s)?;
        }
        Ok(total / train.len() as f64)
    }

    fn gradient(&self, params: &[f64]) -> Result<Vec<f64>> {
        stochastic_gradient(&self.model, params, &self.train_samples())
    }

    fn sample_gradient(&self, params: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let train = self.dataset.train.as_slice();
        if train.is_empty() || self.batch_size == 0 {
            return Err(Error::Usage("empty training batch".into()));
        }
        let batch: Vec<&Sample> = (0..self.batch_size)
            .map(|_| &self.dataset.samples[train[rng.random_range(0..train.len())]])
            .collect();
        stochastic_gradient(&self.model, params, &batch)
    }

    /// Mean Fubini-Study metric of the circuit over the training inputs,
    /// extended with a unit entry for the bias.
    fn metric(&self, params: &[f64]) -> Result<MetricTensor> {
        let (theta, _) = self.model.split(params)?;
        let metrics: Vec<MetricTensor> = self
            .train_samples()
            .par_iter()
            .map(|s| fubini_study_metric(self.model.circuit(), theta, &s.state))
            .collect::<Result<_>>()?;
        Ok(MetricTensor::average(&metrics)?.extended_with_identity(1))
    }
}
