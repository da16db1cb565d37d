//! Gate set of the simulator.
//!
//! Parameterized gates are single-qubit Pauli rotations `exp(-i θ P / 2)`,
//! the only family for which the two-term parameter-shift rule with a shift
//! of π/2 is exact. Everything else is a fixed unitary.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> Mat2 {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::X => [[z, one], [one, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[one, z], [z, -one]],
        }
    }
}

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

/// `exp(-i θ P / 2) = cos(θ/2) I - i sin(θ/2) P`.
pub fn rotation_matrix(axis: Pauli, theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let p = axis.matrix();
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            let id = if r == col { c } else { 0.0 };
            m[r][col] = Complex64::new(id, 0.0) + Complex64::new(0.0, -s) * p[r][col];
        }
    }
    m
}

pub fn hadamard_matrix() -> Mat2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Parameterized Pauli rotation reading θ[slot].
    Rotation { axis: Pauli, qubit: usize, slot: usize },
    X { qubit: usize },
    H { qubit: usize },
    Cnot { control: usize, target: usize },
    /// Fixed single-qubit unitary, e.g. a basis change or a rotation by a
    /// constant angle. `label` is used when printing circuits.
    Fixed { qubit: usize, matrix: Mat2, label: String },
}

impl Gate {
    pub fn rx(qubit: usize, slot: usize) -> Gate {
        Gate::Rotation { axis: Pauli::X, qubit, slot }
    }

    pub fn ry(qubit: usize, slot: usize) -> Gate {
        Gate::Rotation { axis: Pauli::Y, qubit, slot }
    }

    pub fn rz(qubit: usize, slot: usize) -> Gate {
        Gate::Rotation { axis: Pauli::Z, qubit, slot }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    /// Rotation by a constant angle, stored as a fixed unitary.
    pub fn fixed_rotation(axis: Pauli, qubit: usize, angle: f64) -> Gate {
        Gate::Fixed {
            qubit,
            matrix: rotation_matrix(axis, angle),
            label: format!("R{} {} angle={}", axis.as_char(), qubit, angle),
        }
    }

    pub fn slot(&self) -> Option<usize> {
        match self {
            Gate::Rotation { slot, .. } => Some(*slot),
            _ => None,
        }
    }

    pub fn is_parameterized(&self) -> bool {
        self.slot().is_some()
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Rotation { qubit, .. }
            | Gate::X { qubit }
            | Gate::H { qubit }
            | Gate::Fixed { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
        }
    }

    /// Checks target indices against a register size.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        if let Some(q) = qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::Usage(format!(
                "gate {self} targets qubit {q} but the register has {n_qubits} qubits"
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::Usage(format!("gate {self} repeats qubit {}", qubits[0])));
        }
        Ok(())
    }

    /// 2×2 matrix for single-qubit gates. `theta` is required iff the gate is
    /// parameterized.
    pub(crate) fn single_qubit_matrix(&self, theta: Option<f64>) -> Result<Option<Mat2>> {
        match (self, theta) {
            (Gate::Rotation { axis, .. }, Some(t)) => Ok(Some(rotation_matrix(*axis, t))),
            (Gate::Rotation { .. }, None) => Err(Error::Usage(format!(
                "gate {self} is parameterized but no angle was supplied"
            ))),
            (_, Some(_)) => Err(Error::Usage(format!(
                "gate {self} takes no parameter but an angle was supplied"
            ))),
            (Gate::X { .. }, None) => Ok(Some(Pauli::X.matrix())),
            (Gate::H { .. }, None) => Ok(Some(hadamard_matrix())),
            (Gate::Fixed { matrix, .. }, None) => Ok(Some(*matrix)),
            (Gate::Cnot { .. }, None) => Ok(None),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Rotation { axis, qubit, slot } => {
                write!(f, "R{} {} slot={}", axis.as_char(), qubit, slot)
            }
            Gate::X { qubit } => write!(f, "X {qubit}"),
            Gate::H { qubit } => write!(f, "H {qubit}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Fixed { label, .. } => f.write_str(label),
        }
    }
}
