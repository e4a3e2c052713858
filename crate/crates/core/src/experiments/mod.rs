//! Experiment drivers: crosstalk injection, ParSched vs XtalkSched
//! comparison, bundled devices and benchmarks, and report files.

mod bundled;
mod compare;
mod inject;
mod report;

pub use bundled::{bundled_device, bundled_suite, BUNDLED_DEVICES, CASABLANCA_LIKE, INJECT9};
pub use compare::{run_compare, CompareOptions, ComparisonRecord, ComparisonSummary};
pub use inject::{injection_circuit, run_injection, InjectionReport, InjectionRow, INJECTION_ALIGN};
pub use report::{comparison_csv, comparison_json, emit_report, ReportFormat};

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

use crate::circuit::{decompose_to_native, parse_qasm, Circuit, CircuitError, Gate, GateKind, MacroKind, QasmError};
use crate::device::{DeviceError, DeviceModel, Edge};
use crate::rb::RbError;
use crate::schedule::ScheduleError;
use crate::sim::{run_ideal, OutcomeDistribution, SimError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error("{name}: {source}")]
    Qasm {
        name: String,
        #[source]
        source: QasmError,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("{name} does not fit the device: {reason}")]
    Mismatch { name: String, reason: String },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Rb(#[from] RbError),
    #[error("no records to report")]
    EmptyReport,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ExperimentError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// True for errors caused by the caller's files or parameters rather than
    /// by a fault inside the workbench.
    pub fn is_input_error(&self) -> bool {
        match self {
            ExperimentError::Io { .. }
            | ExperimentError::Input(_)
            | ExperimentError::Device(_)
            | ExperimentError::Qasm { .. }
            | ExperimentError::Circuit(_)
            | ExperimentError::Mismatch { .. }
            | ExperimentError::Schedule(_)
            | ExperimentError::EmptyReport => true,
            ExperimentError::Sim(e) => matches!(e, SimError::Mismatch(_) | SimError::TooLarge(_) | SimError::NoShots),
            ExperimentError::Rb(e) => matches!(e, RbError::Config(_) | RbError::SharedQubit(..)),
            ExperimentError::Csv(_) => false,
        }
    }
}

/// How a benchmark's noisy output is scored against its ideal output.
#[derive(Debug, Clone, PartialEq)]
pub enum FidelityMetric {
    /// Probability of the single ideal bitstring.
    CorrectOutcome(String),
    /// `sum sqrt(p_ideal p_noisy)` over all bitstrings.
    Classical(OutcomeDistribution),
}

impl FidelityMetric {
    pub fn name(&self) -> &'static str {
        match self {
            FidelityMetric::CorrectOutcome(_) => "correct_outcome",
            FidelityMetric::Classical(_) => "classical_fidelity",
        }
    }

    pub fn score(&self, noisy: &OutcomeDistribution) -> f64 {
        match self {
            FidelityMetric::CorrectOutcome(s) => noisy.probability(s),
            FidelityMetric::Classical(ideal) => ideal.classical_fidelity(noisy),
        }
        .clamp(0.0, 1.0)
    }
}

/// A named circuit with its noiseless output.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: String,
    pub circuit: Circuit,
    pub ideal: OutcomeDistribution,
}

impl Benchmark {
    pub fn new(name: impl Into<String>, circuit: Circuit) -> Result<Self, ExperimentError> {
        let ideal = run_ideal(&circuit)?;
        Ok(Benchmark {
            name: name.into(),
            circuit,
            ideal,
        })
    }

    pub fn from_qasm(name: impl Into<String>, text: &str) -> Result<Self, ExperimentError> {
        let name = name.into();
        let circuit = parse_qasm(text).map_err(|source| ExperimentError::Qasm {
            name: name.clone(),
            source,
        })?;
        Benchmark::new(name, circuit)
    }

    /// Correct-outcome probability when the ideal output is a single
    /// bitstring, classical fidelity otherwise.
    pub fn metric(&self) -> FidelityMetric {
        match self.ideal.probabilities.iter().find(|(_, &p)| p > 1.0 - 1e-9) {
            Some((s, _)) => FidelityMetric::CorrectOutcome(s.clone()),
            None => FidelityMetric::Classical(self.ideal.clone()),
        }
    }
}

/// Every `*.qasm` file of `dir`, sorted by file name.
pub fn load_benchmarks(dir: &Path) -> Result<Vec<Benchmark>, ExperimentError> {
    let entries = std::fs::read_dir(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| ExperimentError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "qasm") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(ExperimentError::Input(format!("no .qasm files in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| ExperimentError::io(p, e))?;
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Benchmark::from_qasm(name, &text)
        })
        .collect()
}

/// Replaces every CX between uncoupled qubits that share a neighbour `m`
/// with the four-CX bridge `CX(a,m) CX(m,b) CX(a,m) CX(m,b)`.
pub fn bridge_route(c: &Circuit, d: &DeviceModel, name: &str) -> Result<Circuit, ExperimentError> {
    let mut out = Circuit::new(c.num_qubits(), c.num_clbits());
    for g in c.gates() {
        if !g.is_cx() || g.qubits.iter().any(|&q| q >= d.num_qubits()) {
            out.push(g.clone())?;
            continue;
        }
        let (a, b) = (g.qubits[0], g.qubits[1]);
        if d.has_edge(Edge::new(a, b)) {
            out.push(g.clone())?;
            continue;
        }
        let m = (0..d.num_qubits().min(c.num_qubits()))
            .find(|&m| m != a && m != b && d.has_edge(Edge::new(a, m)) && d.has_edge(Edge::new(m, b)))
            .ok_or_else(|| ExperimentError::Mismatch {
                name: name.to_string(),
                reason: format!("CX {a}-{b} has no coupling and no shared neighbour"),
            })?;
        for h in [Gate::cx(a, m), Gate::cx(m, b), Gate::cx(a, m), Gate::cx(m, b)] {
            out.push(h)?;
        }
    }
    Ok(out)
}

/// Lowers macros and bridges uncoupled CXs so the circuit is schedulable on
/// `d` without changing qubit labels.
pub fn map_to_device(c: &Circuit, d: &DeviceModel, name: &str) -> Result<Circuit, ExperimentError> {
    if c.num_qubits() > d.num_qubits() {
        return Err(ExperimentError::Mismatch {
            name: name.to_string(),
            reason: format!("{} qubits on a {}-qubit device", c.num_qubits(), d.num_qubits()),
        });
    }
    let all: BTreeSet<MacroKind> = MacroKind::ALL.into();
    bridge_route(&decompose_to_native(c, &all)?, d, name)
}

/// Drops qubits no gate touches. Returns the relabelled circuit and the
/// original index of each remaining qubit.
pub fn compact(c: &Circuit) -> Result<(Circuit, Vec<usize>), ExperimentError> {
    let used: BTreeSet<usize> = c
        .gates()
        .iter()
        .filter(|g| g.kind != GateKind::Barrier)
        .flat_map(|g| g.qubits.iter().copied())
        .collect();
    let qubits: Vec<usize> = used.into_iter().collect();
    let mut index = vec![usize::MAX; c.num_qubits()];
    for (i, &q) in qubits.iter().enumerate() {
        index[q] = i;
    }
    let mut out = Circuit::new(qubits.len(), c.num_clbits());
    for g in c.gates() {
        let mut h = g.clone();
        h.qubits = g
            .qubits
            .iter()
            .map(|&q| index[q])
            .filter(|&q| q != usize::MAX)
            .collect();
        if h.kind == GateKind::Barrier && h.qubits.is_empty() {
            continue;
        }
        out.push(h)?;
    }
    Ok((out, qubits))
}
