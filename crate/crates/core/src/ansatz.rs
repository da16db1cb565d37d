//! Layered parameterized circuits `U(θ) = Π_l U_l(θ_l)` and the VQE cost
//! `C(θ) = ⟨ψ(θ)|H|ψ(θ)⟩`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gate::{Gate, Pauli};
use crate::pauli::PauliSumHamiltonian;
use crate::state::{zero_state, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entangler {
    /// CNOT(q, q+1) for every neighbouring pair.
    Chain,
    /// Chain plus CNOT(n-1, 0) closing the loop.
    Ring,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterizedCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl ParameterizedCircuit {
    /// Validates targets and that the slots used are exactly `0..n_params`.
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<ParameterizedCircuit> {
        if n_qubits == 0 {
            return Err(Error::Config("circuit needs at least one qubit".into()));
        }
        for g in &gates {
            g.validate(n_qubits)?;
        }
        let n_params = gates.iter().filter_map(Gate::slot).max().map_or(0, |s| s + 1);
        let mut used = vec![false; n_params];
        for s in gates.iter().filter_map(Gate::slot) {
            used[s] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(Error::Usage(format!("parameter slot {missing} is not used by any gate")));
        }
        Ok(ParameterizedCircuit { n_qubits, gates, n_params })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Indices of the gates reading parameter `slot`.
    pub fn gates_for_slot(&self, slot: usize) -> impl Iterator<Item = usize> + '_ {
        self.gates
            .iter()
            .enumerate()
            .filter(move |(_, g)| g.slot() == Some(slot))
            .map(|(i, _)| i)
    }

    /// `U(θ)|input⟩`.
    pub fn evaluate_state(&self, theta: &[f64], input: &StateVector) -> Result<StateVector> {
        self.evaluate_shifted(theta, input, None)
    }

    /// Like [`evaluate_state`](Self::evaluate_state) but with `offset` added
    /// to the angle of one gate only. Parameter-shift derivatives of slots
    /// shared by several gates are sums of such single-gate shifts.
    pub fn evaluate_shifted(
        &self,
        theta: &[f64],
        input: &StateVector,
        shift: Option<(usize, f64)>,
    ) -> Result<StateVector> {
        if theta.len() != self.n_params {
            return Err(Error::Usage(format!(
                "expected {} parameters, got {}",
                self.n_params,
                theta.len()
            )));
        }
        if input.n_qubits() != self.n_qubits {
            return Err(Error::Usage(format!(
                "input state has {} qubits, circuit has {}",
                input.n_qubits(),
                self.n_qubits
            )));
        }
        let mut state = input.clone();
        for (i, gate) in self.gates.iter().enumerate() {
            let angle = gate.slot().map(|s| {
                let extra = match shift {
                    Some((gi, off)) if gi == i => off,
                    _ => 0.0,
                };
                theta[s] + extra
            });
            state.apply_gate_in_place(gate, angle)?;
        }
        Ok(state)
    }

    /// Parses the one-gate-per-line text format:
    ///
    /// ```text
    /// qubits 3          # optional, otherwise inferred
    /// RY 0 slot=3
    /// CNOT 0 1
    /// X 2
    /// H 1
    /// RX 3 angle=1.5707963267948966
    /// ```
    pub fn parse(text: &str, source_name: &str) -> Result<ParameterizedCircuit> {
        let mut declared = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::parse(source_name, lineno + 1, msg);
            let fields: Vec<&str> = line.split_whitespace().collect();
            let qubit = |i: usize| -> Result<usize> {
                fields
                    .get(i)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(format!("expected qubit index in {line:?}")))
            };
            let name = fields[0].to_ascii_uppercase();
            let gate = match name.as_str() {
                "QUBITS" => {
                    declared = Some(qubit(1)?);
                    continue;
                }
                "CNOT" | "CX" => Gate::cnot(qubit(1)?, qubit(2)?),
                "X" => Gate::X { qubit: qubit(1)? },
                "H" => Gate::H { qubit: qubit(1)? },
                "RX" | "RY" | "RZ" => {
                    let axis = Pauli::from_char(name.chars().nth(1).unwrap_or('?')).unwrap_or(Pauli::Z);
                    let q = qubit(1)?;
                    let arg = fields
                        .get(2)
                        .ok_or_else(|| err(format!("rotation needs slot= or angle= in {line:?}")))?;
                    if let Some(v) = arg.strip_prefix("slot=") {
                        let slot = v.parse().map_err(|_| err(format!("bad slot {v:?}")))?;
                        Gate::Rotation { axis, qubit: q, slot }
                    } else if let Some(v) = arg.strip_prefix("angle=") {
                        let a: f64 = v.parse().map_err(|_| err(format!("bad angle {v:?}")))?;
                        Gate::fixed_rotation(axis, q, a)
                    } else {
                        return Err(err(format!("rotation needs slot= or angle= in {line:?}")));
                    }
                }
                other => return Err(err(format!("unknown gate {other:?}"))),
            };
            gates.push(gate);
        }
        let inferred = gates.iter().flat_map(Gate::qubits).max().map_or(1, |q| q + 1);
        let n = declared.unwrap_or(inferred);
        ParameterizedCircuit::new(n, gates)
    }

    pub fn from_file(path: &Path) -> Result<ParameterizedCircuit> {
        let text = std::fs::read_to_string(path)?;
        ParameterizedCircuit::parse(&text, &path.display().to_string())
    }
}

impl fmt::Display for ParameterizedCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

fn push_entangler(gates: &mut Vec<Gate>, n_qubits: usize, entangler: Entangler) {
    for q in 0..n_qubits.saturating_sub(1) {
        gates.push(Gate::cnot(q, q + 1));
    }
    if entangler == Entangler::Ring && n_qubits >= 2 {
        gates.push(Gate::cnot(n_qubits - 1, 0));
    }
}

/// Hardware-efficient ansatz: per layer one rotation per qubit per pattern
/// entry, then the entangler.
pub fn build_hardware_efficient(
    n_qubits: usize,
    n_layers: usize,
    rotation_pattern: &[Pauli],
    entangler: Entangler,
) -> Result<ParameterizedCircuit> {
    if rotation_pattern.is_empty() {
        return Err(Error::Usage("rotation pattern is empty".into()));
    }
    if n_layers == 0 {
        return Err(Error::Usage("need at least one layer".into()));
    }
    let mut gates = Vec::new();
    let mut slot = 0;
    for _ in 0..n_layers {
        for q in 0..n_qubits {
            for &axis in rotation_pattern {
                gates.push(Gate::Rotation { axis, qubit: q, slot });
                slot += 1;
            }
        }
        push_entangler(&mut gates, n_qubits, entangler);
    }
    ParameterizedCircuit::new(n_qubits, gates)
}

/// Seeded random circuit: a fixed RY(π/4) on every qubit, then parameters
/// placed round-robin over the qubits with rotation axes drawn uniformly
/// from {X, Y, Z}; a CNOT chain follows every round of `n_qubits` rotations.
pub fn build_random_pqc(n_qubits: usize, n_params: usize, seed: u64) -> Result<ParameterizedCircuit> {
    if n_params == 0 {
        return Err(Error::Usage("random circuit needs at least one parameter".into()));
    }
    if n_qubits == 0 || n_qubits > crate::state::MAX_QUBITS {
        return Err(Error::Config(format!("qubit count {n_qubits} out of range")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates: Vec<Gate> = (0..n_qubits)
        .map(|q| Gate::fixed_rotation(Pauli::Y, q, PI / 4.0))
        .collect();
    for slot in 0..n_params {
        let axis = Pauli::ALL[rng.random_range(0..3)];
        let qubit = slot % n_qubits;
        gates.push(Gate::Rotation { axis, qubit, slot });
        if qubit == n_qubits - 1 || slot == n_params - 1 {
            push_entangler(&mut gates, n_qubits, Entangler::Chain);
        }
    }
    ParameterizedCircuit::new(n_qubits, gates)
}

/// Random circuit with `n_layers` full rounds of rotations.
pub fn build_random_layered(n_qubits: usize, n_layers: usize, seed: u64) -> Result<ParameterizedCircuit> {
    build_random_pqc(n_qubits, n_qubits * n_layers, seed)
}

/// Gates realizing `exp(-i θ P / 2)` for a multi-qubit Pauli string `P`
/// given as `(pauli, qubit)` pairs in increasing qubit order: basis change
/// to Z, CNOT parity ladder, RZ on the last qubit, and the inverse.
pub fn pauli_string_rotation(ops: &[(Pauli, usize)], slot: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    for &(p, q) in ops {
        match p {
            Pauli::X => gates.push(Gate::H { qubit: q }),
            Pauli::Y => gates.push(Gate::fixed_rotation(Pauli::X, q, PI / 2.0)),
            Pauli::Z => {}
        }
    }
    for w in ops.windows(2) {
        gates.push(Gate::cnot(w[0].1, w[1].1));
    }
    let last = ops.last().map_or(0, |&(_, q)| q);
    gates.push(Gate::rz(last, slot));
    for w in ops.windows(2).rev() {
        gates.push(Gate::cnot(w[0].1, w[1].1));
    }
    for &(p, q) in ops {
        match p {
            Pauli::X => gates.push(Gate::H { qubit: q }),
            Pauli::Y => gates.push(Gate::fixed_rotation(Pauli::X, q, -PI / 2.0)),
            Pauli::Z => {}
        }
    }
    gates
}

/// One-parameter particle-conserving ansatz for H₂: prepare `|1100⟩`, then
/// rotate it into `|0011⟩` with `exp(-i θ X₀X₁X₂Y₃ / 2)`, giving
/// `cos(θ/2)|1100⟩ + sin(θ/2)|0011⟩`. θ = 0 is the Hartree-Fock state.
pub fn build_h2_ansatz() -> ParameterizedCircuit {
    let mut gates = vec![Gate::X { qubit: 0 }, Gate::X { qubit: 1 }];
    gates.extend(pauli_string_rotation(
        &[(Pauli::X, 0), (Pauli::X, 1), (Pauli::X, 2), (Pauli::Y, 3)],
        0,
    ));
    ParameterizedCircuit::new(4, gates).expect("H2 ansatz is well formed")
}

/// `C(θ) = ⟨input| U(θ)† H U(θ) |input⟩`.
#[derive(Debug, Clone)]
pub struct CostFunction {
    circuit: ParameterizedCircuit,
    observable: PauliSumHamiltonian,
    input: StateVector,
}

impl CostFunction {
    pub fn new(circuit: ParameterizedCircuit, observable: PauliSumHamiltonian) -> Result<CostFunction> {
        let input = zero_state(circuit.n_qubits())?;
        CostFunction::with_input(circuit, observable, input)
    }

    pub fn with_input(
        circuit: ParameterizedCircuit,
        observable: PauliSumHamiltonian,
        input: StateVector,
    ) -> Result<CostFunction> {
        if circuit.n_qubits() != observable.n_qubits() || circuit.n_qubits() != input.n_qubits() {
            return Err(Error::Usage(format!(
                "dimension mismatch: circuit {} qubits, observable {}, input {}",
                circuit.n_qubits(),
                observable.n_qubits(),
                input.n_qubits()
            )));
        }
        Ok(CostFunction { circuit, observable, input })
    }

    pub fn circuit(&self) -> &ParameterizedCircuit {
        &self.circuit
    }

    pub fn observable(&self) -> &PauliSumHamiltonian {
        &self.observable
    }

    pub fn input(&self) -> &StateVector {
        &self.input
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params()
    }

    pub fn state(&self, theta: &[f64]) -> Result<StateVector> {
        self.circuit.evaluate_state(theta, &self.input)
    }

    pub fn cost(&self, theta: &[f64]) -> Result<f64> {
        self.observable.expectation(&self.state(theta)?)
    }

    pub(crate) fn cost_shifted(&self, theta: &[f64], gate: usize, offset: f64) -> Result<f64> {
        let s = self.circuit.evaluate_shifted(theta, &self.input, Some((gate, offset)))?;
        self.observable.expectation(&s)
    }
}
