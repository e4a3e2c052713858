//! Quantum circuit intermediate representation.
//!
//! A [`Circuit`] is a validated, ordered list of [`Gate`]s over a fixed number
//! of qubits and classical bits. Macro gates (`CCX`, `CSWAP`, `SWAP`) are
//! first-class so benchmarks can be written at their natural level and lowered
//! later with [`decompose_to_native`].

mod dag;
mod decompose;
mod qasm;

pub use dag::{build_dag, CircuitDag};
pub use decompose::{decompose_to_native, MacroKind};
pub(crate) use qasm::emit_gate as qasm_emit_gate;
pub use qasm::{emit_qasm, parse_qasm, QasmError};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gate kinds understood by the IR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    SX,
    /// Rotation about Z by the given angle in radians.
    RZ(f64),
    CX,
    /// Toffoli; operands are `[control, control, target]`.
    CCX,
    /// Fredkin; operands are `[control, a, b]`.
    CSWAP,
    SWAP,
    Barrier,
    Measure,
}

impl GateKind {
    /// Number of qubit operands, or `None` for barriers (any positive count).
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Barrier => None,
            GateKind::CX | GateKind::SWAP => Some(2),
            GateKind::CCX | GateKind::CSWAP => Some(3),
            _ => Some(1),
        }
    }

    /// Lower-case QASM mnemonic.
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::I => "id",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::SX => "sx",
            GateKind::RZ(_) => "rz",
            GateKind::CX => "cx",
            GateKind::CCX => "ccx",
            GateKind::CSWAP => "cswap",
            GateKind::SWAP => "swap",
            GateKind::Barrier => "barrier",
            GateKind::Measure => "measure",
        }
    }

    pub fn is_macro(&self) -> bool {
        matches!(self, GateKind::CCX | GateKind::CSWAP | GateKind::SWAP)
    }

    /// One-qubit unitary kinds.
    pub fn is_single_qubit(&self) -> bool {
        self.arity() == Some(1) && !matches!(self, GateKind::Measure)
    }

    /// Kinds that carry a unitary action (everything except barriers and
    /// measurements).
    pub fn is_unitary(&self) -> bool {
        !matches!(self, GateKind::Barrier | GateKind::Measure)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::RZ(theta) => write!(f, "rz({theta})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A single instruction: a kind applied to an ordered list of qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Classical destination, present only for measurements.
    pub clbit: Option<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Gate {
            kind,
            qubits,
            clbit: None,
        }
    }

    pub fn single(kind: GateKind, q: usize) -> Self {
        Gate::new(kind, vec![q])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::new(GateKind::CX, vec![control, target])
    }

    pub fn rz(theta: f64, q: usize) -> Self {
        Gate::new(GateKind::RZ(theta), vec![q])
    }

    pub fn barrier(qubits: impl IntoIterator<Item = usize>) -> Self {
        Gate::new(GateKind::Barrier, qubits.into_iter().collect())
    }

    pub fn measure(q: usize, c: usize) -> Self {
        Gate {
            kind: GateKind::Measure,
            qubits: vec![q],
            clbit: Some(c),
        }
    }

    pub fn is_cx(&self) -> bool {
        self.kind == GateKind::CX
    }

    /// Checks the per-gate invariants against register sizes.
    pub fn validate(&self, num_qubits: usize, num_clbits: usize) -> Result<(), CircuitError> {
        match self.kind.arity() {
            Some(n) if n != self.qubits.len() => {
                return Err(CircuitError::Arity {
                    gate: self.kind.name(),
                    expected: n,
                    found: self.qubits.len(),
                })
            }
            None if self.qubits.is_empty() => {
                return Err(CircuitError::Arity {
                    gate: self.kind.name(),
                    expected: 1,
                    found: 0,
                })
            }
            _ => {}
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange { qubit: q, num_qubits });
            }
            if self.qubits[..i].contains(&q) {
                return Err(CircuitError::RepeatedOperand {
                    gate: self.kind.name(),
                    qubit: q,
                });
            }
        }
        if let GateKind::RZ(theta) = self.kind {
            if !theta.is_finite() {
                return Err(CircuitError::NonFiniteAngle);
            }
        }
        match (self.kind, self.clbit) {
            (GateKind::Measure, None) => return Err(CircuitError::MissingClbit),
            (GateKind::Measure, Some(c)) if c >= num_clbits => {
                return Err(CircuitError::ClbitOutOfRange { clbit: c, num_clbits })
            }
            (GateKind::Measure, Some(_)) => {}
            (_, Some(_)) => return Err(CircuitError::UnexpectedClbit(self.kind.name())),
            (_, None) => {}
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        let qs: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        write!(f, "({})", qs.join(","))?;
        if let Some(c) = self.clbit {
            write!(f, "->c{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("gate `{gate}` expects {expected} qubit operand(s), found {found}")]
    Arity {
        gate: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("gate `{gate}` repeats qubit {qubit}")]
    RepeatedOperand { gate: &'static str, qubit: usize },
    #[error("qubit index {qubit} out of range for {num_qubits} qubit(s)")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("classical bit {clbit} out of range for {num_clbits} bit(s)")]
    ClbitOutOfRange { clbit: usize, num_clbits: usize },
    #[error("rz angle must be finite")]
    NonFiniteAngle,
    #[error("measure requires a classical target")]
    MissingClbit,
    #[error("gate `{0}` cannot carry a classical target")]
    UnexpectedClbit(&'static str),
    #[error("qubit {0} is used after being measured (mid-circuit measurement is not supported)")]
    MidCircuitMeasure(usize),
    #[error("unknown macro gate `{0}`")]
    UnknownMacro(&'static str),
}

/// Ordered gate list over `num_qubits` qubits and `num_clbits` classical bits.
///
/// Every gate is validated on insertion, so a `Circuit` value always satisfies
/// the operand and terminal-measurement invariants.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    gates: Vec<Gate>,
    #[serde(skip)]
    measured: Vec<bool>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Circuit {
            num_qubits,
            num_clbits,
            gates: Vec::new(),
            measured: vec![false; num_qubits],
        }
    }

    pub fn from_gates(
        num_qubits: usize,
        num_clbits: usize,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(num_qubits, num_clbits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.num_qubits, self.num_clbits)?;
        match gate.kind {
            GateKind::Measure => self.measured[gate.qubits[0]] = true,
            GateKind::Barrier => {}
            _ => {
                if let Some(&q) = gate.qubits.iter().find(|&&q| self.measured[q]) {
                    return Err(CircuitError::MidCircuitMeasure(q));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// True when every gate is native (no CCX/CSWAP/SWAP).
    pub fn is_native(&self) -> bool {
        self.gates.iter().all(|g| !g.kind.is_macro())
    }

    pub fn count_kind(&self, pred: impl Fn(&GateKind) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(&g.kind)).count()
    }

    /// `(qubit, clbit)` pairs of all measurements, in program order.
    pub fn measurements(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::Measure)
            .map(|g| (g.qubits[0], g.clbit.unwrap_or_default()))
            .collect()
    }

    /// Same gates re-homed onto a wider register, qubit `i` becoming
    /// `mapping[i]`.
    pub fn remap(&self, mapping: &[usize], num_qubits: usize, num_clbits: usize) -> Result<Circuit, CircuitError> {
        let mut out = Circuit::new(num_qubits, num_clbits);
        for g in &self.gates {
            let mut h = g.clone();
            for q in &mut h.qubits {
                *q = *mapping.get(*q).ok_or(CircuitError::QubitOutOfRange {
                    qubit: *q,
                    num_qubits: mapping.len(),
                })?;
            }
            out.push(h)?;
        }
        Ok(out)
    }

    /// Copy of the circuit with every gate matching `pred` removed.
    pub fn without(&self, pred: impl Fn(usize, &Gate) -> bool) -> Circuit {
        let mut out = Circuit::new(self.num_qubits, self.num_clbits);
        for (i, g) in self.gates.iter().enumerate() {
            if !pred(i, g) {
                out.push(g.clone()).expect("subset of a valid circuit stays valid");
            }
        }
        out
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num_qubits: usize,
            num_clbits: usize,
            gates: Vec<Gate>,
        }
        let raw = Raw::deserialize(d)?;
        Circuit::from_gates(raw.num_qubits, raw.num_clbits, raw.gates).map_err(serde::de::Error::custom)
    }
}
