//! Independent dense-matrix oracles and random instance generators.

#![allow(dead_code)]

use laws_vqa::ansatz::build_random_pqc;
use laws_vqa::{CostFunction, Gate, Pauli, PauliString, PauliSumHamiltonian, StateVector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_2x2(p: Pauli) -> CMat {
    match p {
        Pauli::X => CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        Pauli::Y => CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        Pauli::Z => CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    }
}

/// `cos(θ/2) I − i sin(θ/2) P`.
pub fn rotation_2x2(p: Pauli, theta: f64) -> CMat {
    CMat::identity(2, 2) * c((theta / 2.0).cos(), 0.0) - pauli_2x2(p) * c(0.0, (theta / 2.0).sin())
}

/// Embeds a single-qubit operator; qubit 0 is the leftmost tensor factor.
pub fn embed(n: usize, qubit: usize, op: &CMat) -> CMat {
    let mut m = CMat::identity(1, 1);
    for q in 0..n {
        let f = if q == qubit { op.clone() } else { CMat::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

pub fn cnot_dense(n: usize, control: usize, target: usize) -> CMat {
    let dim = 1 << n;
    let mut m = CMat::zeros(dim, dim);
    for i in 0..dim {
        let cbit = (i >> (n - 1 - control)) & 1;
        let j = if cbit == 1 { i ^ (1 << (n - 1 - target)) } else { i };
        m[(j, i)] = c(1.0, 0.0);
    }
    m
}

pub fn gate_dense(n: usize, gate: &Gate, theta: &[f64]) -> CMat {
    match gate {
        Gate::Rotation { axis, qubit, slot } => embed(n, *qubit, &rotation_2x2(*axis, theta[*slot])),
        Gate::X { qubit } => embed(n, *qubit, &pauli_2x2(Pauli::X)),
        Gate::H { qubit } => {
            let h = 1.0 / 2f64.sqrt();
            embed(n, *qubit, &CMat::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]))
        }
        Gate::Cnot { control, target } => cnot_dense(n, *control, *target),
        Gate::Fixed { qubit, matrix, .. } => {
            let m = CMat::from_row_slice(2, 2, &[matrix[0][0], matrix[0][1], matrix[1][0], matrix[1][1]]);
            embed(n, *qubit, &m)
        }
    }
}

/// Product of the dense gate matrices, last gate leftmost.
pub fn circuit_unitary(n: usize, gates: &[Gate], theta: &[f64]) -> CMat {
    let dim = 1 << n;
    gates.iter().fold(CMat::identity(dim, dim), |acc, g| gate_dense(n, g, theta) * acc)
}

pub fn pauli_string_dense(n: usize, term: &PauliString) -> CMat {
    let mut m = CMat::identity(1, 1);
    for q in 0..n {
        let f = match term.operators.get(&q) {
            Some(p) => pauli_2x2(*p),
            None => CMat::identity(2, 2),
        };
        m = m.kronecker(&f);
    }
    m * c(term.coefficient, 0.0)
}

pub fn hamiltonian_dense(h: &PauliSumHamiltonian) -> CMat {
    let dim = 1 << h.n_qubits();
    h.terms()
        .iter()
        .fold(CMat::zeros(dim, dim), |acc, t| acc + pauli_string_dense(h.n_qubits(), t))
}

pub fn dense_expectation(h: &CMat, psi: &[Complex64]) -> Complex64 {
    let v = nalgebra::DVector::from_column_slice(psi);
    (v.adjoint() * h * &v)[(0, 0)]
}

pub fn random_hamiltonian(n: usize, n_terms: usize, rng: &mut impl Rng) -> PauliSumHamiltonian {
    let terms = (0..n_terms)
        .map(|_| {
            let ops: Vec<(Pauli, usize)> = (0..n)
                .filter_map(|q| match rng.random_range(0..4) {
                    0 => None,
                    k => Some((Pauli::ALL[k - 1], q)),
                })
                .collect();
            PauliString::new(rng.random_range(-1.0..1.0), &ops)
        })
        .collect();
    PauliSumHamiltonian::new(n, terms).unwrap()
}

pub fn random_theta(p: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..p).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// A random cost on 1..=4 qubits with 1..=8 parameters.
pub fn random_cost(seed: u64) -> (CostFunction, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4);
    let p = rng.random_range(1..=8);
    let circuit = build_random_pqc(n, p, rng.random()).unwrap();
    let h = random_hamiltonian(n, rng.random_range(1..=5), &mut rng);
    let theta = random_theta(p, &mut rng);
    (CostFunction::new(circuit, h).unwrap(), theta)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
