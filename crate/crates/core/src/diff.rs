//! Gradients, the quantum geometric tensor, and the barren-plateau probe.
//!
//! Every parameterized gate is `exp(-i θ P / 2)` with `P` a Pauli operator,
//! so both the cost derivative and the state derivative have exact
//! two-point shift formulas:
//!
//! ```text
//! ∂C/∂θ   = [C(θ + π/2) − C(θ − π/2)] / 2
//! ∂ψ/∂θ   = [ψ(θ + π/2) − ψ(θ − π/2)] / (2√2)
//! ```
//!
//! A slot shared by several gates gets the sum of the per-gate shifts.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::ansatz::{CostFunction, ParameterizedCircuit};
use crate::error::{Error, Result};
use crate::gate::Pauli;
use crate::pauli::{PauliString, PauliSumHamiltonian};
use crate::state::{zero_state, StateVector};

/// Tikhonov damping added to the metric before inversion.
pub const DEFAULT_DAMPING: f64 = 1e-6;
/// Eigenvalues of the damped metric at or below this are treated as zero.
pub const DEFAULT_CUTOFF: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-10;

/// Exact gradient by the parameter-shift rule.
pub fn parameter_shift_gradient(cf: &CostFunction, theta: &[f64]) -> Result<Vec<f64>> {
    (0..cf.n_params())
        .map(|k| parameter_shift_component(cf, theta, k))
        .collect()
}

/// A single gradient component `∂C/∂θ_k`.
pub fn parameter_shift_component(cf: &CostFunction, theta: &[f64], k: usize) -> Result<f64> {
    if k >= cf.n_params() {
        return Err(Error::Usage(format!(
            "parameter index {k} out of range for {} parameters",
            cf.n_params()
        )));
    }
    let mut d = 0.0;
    for g in cf.circuit().gates_for_slot(k) {
        let plus = cf.cost_shifted(theta, g, FRAC_PI_2)?;
        let minus = cf.cost_shifted(theta, g, -FRAC_PI_2)?;
        d += (plus - minus) / 2.0;
    }
    Ok(d)
}

/// Central finite differences with step `h`.
pub fn finite_difference_gradient(cf: &CostFunction, theta: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::Usage(format!("finite-difference step must be positive, got {h}")));
    }
    let mut shifted = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            shifted[k] = theta[k] + h;
            let plus = cf.cost(&shifted)?;
            shifted[k] = theta[k] - h;
            let minus = cf.cost(&shifted)?;
            shifted[k] = theta[k];
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

/// `∂ψ/∂θ_k` for every parameter, from shifted statevectors.
pub fn state_derivatives(
    circuit: &ParameterizedCircuit,
    theta: &[f64],
    input: &StateVector,
) -> Result<Vec<Vec<Complex64>>> {
    let dim = input.dim();
    let scale = 1.0 / SQRT_2;
    (0..circuit.n_params())
        .map(|k| {
            let mut d = vec![Complex64::new(0.0, 0.0); dim];
            for g in circuit.gates_for_slot(k) {
                let plus = circuit.evaluate_shifted(theta, input, Some((g, FRAC_PI_2)))?;
                let minus = circuit.evaluate_shifted(theta, input, Some((g, -FRAC_PI_2)))?;
                for (acc, h) in d.iter_mut().zip(StateVector::half_difference(&plus, &minus)) {
                    *acc += h * scale;
                }
            }
            Ok(d)
        })
        .collect()
}

fn braket(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `G_ij = ⟨∂_i ψ|∂_j ψ⟩ − ⟨∂_i ψ|ψ⟩⟨ψ|∂_j ψ⟩`.
pub fn quantum_geometric_tensor(
    circuit: &ParameterizedCircuit,
    theta: &[f64],
    input: &StateVector,
) -> Result<DMatrix<Complex64>> {
    let psi = circuit.evaluate_state(theta, input)?;
    let psi = psi.amplitudes();
    let derivs = state_derivatives(circuit, theta, input)?;
    let p = derivs.len();
    let overlaps: Vec<Complex64> = derivs.iter().map(|d| braket(d, psi)).collect();
    let mut g = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v = braket(&derivs[i], &derivs[j]) - overlaps[i] * overlaps[j].conj();
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Real symmetric P×P metric together with the damping used to invert it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    matrix: DMatrix<f64>,
    damping: f64,
}

impl MetricTensor {
    pub fn new(matrix: DMatrix<f64>, damping: f64) -> Result<MetricTensor> {
        if !matrix.is_square() {
            return Err(Error::Usage("metric must be square".into()));
        }
        if !(damping >= 0.0) || !damping.is_finite() {
            return Err(Error::Usage(format!("damping must be ≥ 0, got {damping}")));
        }
        check_symmetric(&matrix)?;
        Ok(MetricTensor { matrix, damping })
    }

    pub fn identity(dim: usize) -> MetricTensor {
        MetricTensor { matrix: DMatrix::identity(dim, dim), damping: 0.0 }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_damping(mut self, damping: f64) -> MetricTensor {
        self.damping = damping;
        self
    }

    /// Appends `extra` coordinates with unit diagonal and no coupling, for
    /// classical parameters riding along with the circuit angles.
    pub fn extended_with_identity(&self, extra: usize) -> MetricTensor {
        let n = self.dim();
        let mut m = DMatrix::zeros(n + extra, n + extra);
        m.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        for i in n..n + extra {
            m[(i, i)] = 1.0;
        }
        MetricTensor { matrix: m, damping: self.damping }
    }

    /// Weighted sum of metrics of equal dimension, keeping `self`'s damping.
    pub fn average(metrics: &[MetricTensor]) -> Result<MetricTensor> {
        let first = metrics
            .first()
            .ok_or_else(|| Error::Usage("cannot average zero metrics".into()))?;
        let mut m = DMatrix::zeros(first.dim(), first.dim());
        for t in metrics {
            if t.dim() != first.dim() {
                return Err(Error::Usage("metric dimensions differ".into()));
            }
            m += &t.matrix;
        }
        m /= metrics.len() as f64;
        Ok(MetricTensor { matrix: m, damping: first.damping })
    }

    /// `pinv(F + δI) · v` with this metric's damping.
    pub fn solve(&self, v: &[f64], cutoff: f64) -> Result<Vec<f64>> {
        let pinv = damped_pseudo_inverse(self, self.damping, cutoff)?;
        Ok(mat_vec(&pinv, v))
    }

    /// `F · v`, no damping.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, v)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.clone().symmetric_eigen().eigenvalues.min()
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).iter().copied().collect()
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() >= SYMMETRY_TOL {
                return Err(Error::Usage(format!(
                    "matrix is not symmetric at ({i},{j}): {} vs {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
    }
    Ok(())
}

/// `F = (Re G + (Re G)ᵀ) / 2` at the default damping.
pub fn fubini_study_metric(
    circuit: &ParameterizedCircuit,
    theta: &[f64],
    input: &StateVector,
) -> Result<MetricTensor> {
    let g = quantum_geometric_tensor(circuit, theta, input)?;
    let re = g.map(|z| z.re);
    let sym = (&re + re.transpose()) * 0.5;
    MetricTensor::new(sym, DEFAULT_DAMPING)
}

/// Eigendecomposes `F + δI`, inverts eigenvalues above `cutoff`, zeroes the
/// rest.
pub fn damped_pseudo_inverse(f: &MetricTensor, delta: f64, cutoff: f64) -> Result<DMatrix<f64>> {
    if !(delta >= 0.0) || !(cutoff >= 0.0) {
        return Err(Error::Usage(format!(
            "damping and cutoff must be ≥ 0, got {delta} and {cutoff}"
        )));
    }
    check_symmetric(&f.matrix)?;
    let n = f.dim();
    let damped = &f.matrix + DMatrix::identity(n, n) * delta;
    let eig = damped.symmetric_eigen();
    let inv = eig.eigenvalues.map(|l| if l > cutoff { 1.0 / l } else { 0.0 });
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&inv) * q.transpose())
}

/// One row of the barren-plateau table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BpRow {
    pub n_qubits: usize,
    pub n_samples: usize,
    pub grad_mean: f64,
    pub grad_variance: f64,
    pub stderr: f64,
}

pub const BP_CSV_HEADER: &str = "n_qubits,n_samples,grad_mean,grad_variance,stderr";

pub fn bp_rows_to_csv(rows: &[BpRow]) -> String {
    let mut out = String::from(BP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:e},{:e},{:e}",
            r.n_qubits, r.n_samples, r.grad_mean, r.grad_variance, r.stderr
        );
    }
    out
}

/// SplitMix64 finalizer, used to derive independent per-sample seeds.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `Z` on qubit 0, the default probe observable.
pub fn z0_observable(n_qubits: usize) -> PauliSumHamiltonian {
    PauliSumHamiltonian::new(n_qubits, vec![PauliString::new(1.0, &[(Pauli::Z, 0)])])
        .expect("Z0 is valid for n ≥ 1")
}

/// Samples `∂C/∂θ_0` over random circuits and uniform angles.
///
/// For each register size the family is asked for a fresh circuit per
/// sample; the sample's circuit seed and angles both come from
/// `derive_seed(seed, n, i)` so results do not depend on scheduling.
pub fn bp_variance_scan<F>(
    family: F,
    qubit_range: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<BpRow>>
where
    F: Fn(usize, u64) -> Result<ParameterizedCircuit> + Sync,
{
    if n_samples < 30 {
        return Err(Error::Usage(format!("need at least 30 samples, got {n_samples}")));
    }
    qubit_range
        .iter()
        .map(|&n| {
            let observable = z0_observable(n);
            let input = zero_state(n)?;
            let grads: Vec<f64> = (0..n_samples)
                .into_par_iter()
                .map(|i| {
                    let s = derive_seed(seed, n as u64, i as u64);
                    let circuit = family(n, s)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0xA5A5_A5A5_A5A5_A5A5);
                    let theta: Vec<f64> = (0..circuit.n_params())
                        .map(|_| rng.random_range(0.0..2.0 * PI))
                        .collect();
                    let cf = CostFunction::with_input(circuit, observable.clone(), input.clone())?;
                    parameter_shift_component(&cf, &theta, 0)
                })
                .collect::<Result<_>>()?;
            let m = grads.len() as f64;
            let mean = grads.iter().sum::<f64>() / m;
            let var = grads.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (m - 1.0);
            Ok(BpRow {
                n_qubits: n,
                n_samples,
                grad_mean: mean,
                grad_variance: var,
                stderr: (var / m).sqrt(),
            })
        })
        .collect()
}

/// Ordinary least squares fit of `ln(variance)` against qubit count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Two-sided p-value for the null hypothesis `slope = 0`.
    pub p_value: f64,
}

pub fn fit_log_variance_slope(rows: &[BpRow]) -> Result<SlopeFit> {
    if rows.len() < 3 {
        return Err(Error::Usage("slope test needs at least three register sizes".into()));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n_qubits as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.grad_variance.ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Numeric("zero or non-finite gradient variance".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = n - 2.0;
    let stderr = (rss / dof / sxx).sqrt();
    let p_value = if stderr == 0.0 {
        0.0
    } else {
        let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::Numeric(e.to_string()))?;
        2.0 * (1.0 - t.cdf((slope / stderr).abs()))
    };
    Ok(SlopeFit { slope, intercept, stderr, p_value })
}
