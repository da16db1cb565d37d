//! Dense statevector over `2^n` computational basis states.
//!
//! Qubit 0 is the leftmost label of a ket and the most significant bit of the
//! amplitude index, so `|1100⟩` lives at index 12.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::{Gate, Mat2};

pub const MAX_QUBITS: usize = 20;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Config(format!(
            "qubit count {n_qubits} outside supported range 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// `|0…0⟩` on `n_qubits` qubits.
pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::basis(n_qubits, 0)
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: usize) -> Result<StateVector> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Usage(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Basis state from a ket label such as `"1100"`.
    pub fn from_bits(bits: &str) -> Result<StateVector> {
        let mut index = 0usize;
        for c in bits.chars() {
            index <<= 1;
            match c {
                '0' => {}
                '1' => index |= 1,
                _ => return Err(Error::Usage(format!("invalid ket label {bits:?}"))),
            }
        }
        StateVector::basis(bits.len(), index)
    }

    /// Wraps amplitudes that are already normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<StateVector> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::Usage(format!(
                "amplitude vector length {dim} is not a power of two ≥ 2"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        let state = StateVector { n_qubits, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Usage(format!("amplitudes have norm {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Amplitude-encodes a real vector, normalizing it first.
    pub fn from_real_normalized(values: &[f64]) -> Result<StateVector> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Usage("cannot amplitude-encode a zero or non-finite vector".into()));
        }
        StateVector::from_amplitudes(values.iter().map(|v| Complex64::new(v / norm, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Bit mask of `qubit` in the amplitude index.
    #[inline]
    pub(crate) fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    pub fn apply_gate(&self, gate: &Gate, theta: Option<f64>) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_gate_in_place(gate, theta)?;
        Ok(out)
    }

    pub fn apply_gate_in_place(&mut self, gate: &Gate, theta: Option<f64>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate.single_qubit_matrix(theta)? {
            Some(m) => self.apply_single(gate.qubits()[0], &m),
            None => {
                if let Gate::Cnot { control, target } = gate {
                    self.apply_cnot(*control, *target);
                }
            }
        }
        Ok(())
    }

    pub(crate) fn apply_single(&mut self, qubit: usize, m: &Mat2) {
        let mask = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    /// `(a - b) / 2` amplitude-wise; used for shifted-state derivatives.
    pub(crate) fn half_difference(a: &StateVector, b: &StateVector) -> Vec<Complex64> {
        a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x - y) * 0.5)
            .collect()
    }
}
