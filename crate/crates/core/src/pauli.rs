//! Pauli-string observables, their expectation values, and the dense-matrix
//! oracles used to check them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::Pauli;
use crate::state::StateVector;

/// Largest register for which [`PauliSumHamiltonian::exact_ground_energy`]
/// builds a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Real coefficient times a tensor product of Pauli operators; qubits that
/// are absent carry the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub coefficient: f64,
    pub operators: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn new(coefficient: f64, ops: &[(Pauli, usize)]) -> PauliString {
        PauliString {
            coefficient,
            operators: ops.iter().map(|&(p, q)| (q, p)).collect(),
        }
    }

    pub fn identity(coefficient: f64) -> PauliString {
        PauliString { coefficient, operators: BTreeMap::new() }
    }

    fn max_qubit(&self) -> Option<usize> {
        self.operators.keys().next_back().copied()
    }

    /// Index flip mask and the bookkeeping needed for the phase of
    /// `P|i⟩ = phase(i) |i ^ flip⟩`.
    fn action(&self, n_qubits: usize) -> TermAction {
        let mut flip = 0usize;
        let mut sign_mask = 0usize;
        let mut n_y = 0u32;
        for (&q, &p) in &self.operators {
            let m = 1usize << (n_qubits - 1 - q);
            match p {
                Pauli::X => flip |= m,
                Pauli::Y => {
                    flip |= m;
                    sign_mask |= m;
                    n_y += 1;
                }
                Pauli::Z => sign_mask |= m,
            }
        }
        let base = match n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        TermAction { flip, sign_mask, base }
    }

    /// Dense `2^n × 2^n` matrix (oracle use only).
    pub fn dense_matrix(&self, n_qubits: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, Complex64::new(self.coefficient, 0.0));
        for q in 0..n_qubits {
            let factor = match self.operators.get(&q) {
                Some(p) => {
                    let a = p.matrix();
                    DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]])
                }
                None => DMatrix::identity(2, 2),
            };
            m = m.kronecker(&factor);
        }
        m
    }
}

struct TermAction {
    flip: usize,
    sign_mask: usize,
    base: Complex64,
}

impl TermAction {
    #[inline]
    fn phase(&self, index: usize) -> Complex64 {
        if (index & self.sign_mask).count_ones().is_multiple_of(2) {
            self.base
        } else {
            -self.base
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        for (q, p) in &self.operators {
            write!(f, " {}{}", p.as_char(), q)?;
        }
        Ok(())
    }
}

/// `H = Σ_m c_m P_m` with real `c_m`, hence Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSumHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliString>,
}

impl PauliSumHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<PauliString>) -> Result<PauliSumHamiltonian> {
        for t in &terms {
            if !t.coefficient.is_finite() {
                return Err(Error::Usage(format!("non-finite coefficient in term {t}")));
            }
            if let Some(q) = t.max_qubit() {
                if q >= n_qubits {
                    return Err(Error::Usage(format!(
                        "term {t} acts on qubit {q} but the observable has {n_qubits} qubits"
                    )));
                }
            }
        }
        Ok(PauliSumHamiltonian { n_qubits, terms })
    }

    /// Parses the line format `<coefficient> <P><q> ...`, `#` comments.
    /// With `n_qubits = None` the register size is one past the largest
    /// qubit index mentioned.
    pub fn parse(text: &str, n_qubits: Option<usize>, source_name: &str) -> Result<PauliSumHamiltonian> {
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let coef_tok = fields.next().unwrap_or_default();
            let coefficient: f64 = coef_tok.parse().map_err(|_| {
                Error::parse(source_name, lineno + 1, format!("bad coefficient {coef_tok:?}"))
            })?;
            if !coefficient.is_finite() {
                return Err(Error::parse(source_name, lineno + 1, "coefficient is not finite"));
            }
            let mut operators = BTreeMap::new();
            for tok in fields {
                let mut chars = tok.chars();
                let p = chars.next().and_then(Pauli::from_char).ok_or_else(|| {
                    Error::parse(source_name, lineno + 1, format!("bad Pauli factor {tok:?}"))
                })?;
                let q: usize = chars.as_str().parse().map_err(|_| {
                    Error::parse(source_name, lineno + 1, format!("bad qubit index in {tok:?}"))
                })?;
                if operators.insert(q, p).is_some() {
                    return Err(Error::parse(
                        source_name,
                        lineno + 1,
                        format!("qubit {q} appears twice in one term"),
                    ));
                }
            }
            terms.push(PauliString { coefficient, operators });
        }
        let needed = terms.iter().filter_map(PauliString::max_qubit).max().map_or(1, |q| q + 1);
        let n = n_qubits.unwrap_or(needed);
        PauliSumHamiltonian::new(n, terms)
    }

    pub fn from_file(path: &Path, n_qubits: Option<usize>) -> Result<PauliSumHamiltonian> {
        let text = std::fs::read_to_string(path)?;
        PauliSumHamiltonian::parse(&text, n_qubits, &path.display().to_string())
    }

    /// H₂ in a minimal basis at equilibrium bond length, Jordan-Wigner
    /// encoded on 4 qubits. Ground energy −1.1361894 Ha.
    pub fn h2_sto3g() -> PauliSumHamiltonian {
        PauliSumHamiltonian::parse(include_str!("../data/h2_sto3g.ham"), Some(4), "h2_sto3g.ham")
            .expect("bundled H2 Hamiltonian parses")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// `⟨ψ|H|ψ⟩`, evaluated term by term on the statevector.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Usage(format!(
                "state has {} qubits, observable has {}",
                state.n_qubits(),
                self.n_qubits
            )));
        }
        let amps = state.amplitudes();
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let act = term.action(self.n_qubits);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, a) in amps.iter().enumerate() {
                acc += amps[i ^ act.flip].conj() * act.phase(i) * a;
            }
            total += acc * term.coefficient;
        }
        let scale = 1.0 + self.terms.iter().map(|t| t.coefficient.abs()).sum::<f64>();
        if total.im.abs() > 1e-10 * scale {
            return Err(Error::Numeric(format!(
                "expectation has imaginary part {} (observable not Hermitian?)",
                total.im
            )));
        }
        Ok(total.re)
    }

    /// `H|ψ⟩` as a raw amplitude vector.
    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Usage("qubit count mismatch".into()));
        }
        let amps = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for term in &self.terms {
            let act = term.action(self.n_qubits);
            for (i, a) in amps.iter().enumerate() {
                out[i ^ act.flip] += act.phase(i) * a * term.coefficient;
            }
        }
        Ok(out)
    }

    pub fn dense_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        self.terms
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc, t| acc + t.dense_matrix(self.n_qubits))
    }

    /// Smallest eigenvalue of the dense matrix.
    pub fn exact_ground_energy(&self) -> Result<f64> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Capability(format!(
                "exact diagonalization limited to {MAX_DENSE_QUBITS} qubits, got {}",
                self.n_qubits
            )));
        }
        let eig = self.dense_matrix().symmetric_eigen();
        Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

impl fmt::Display for PauliSumHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}
