//! Time assignment for native circuits on a device.
//!
//! [`par_sched`] is the ASAP baseline. [`xtalk_sched`] adds precedence fences
//! between simultaneous high-crosstalk CX pairs when that lowers the
//! [`ScheduleCost`].

mod cost;
mod xtalk;

pub use cost::{find_conflicts, schedule_cost, ConflictPair, ScheduleCost};
pub use xtalk::{xtalk_sched, xtalk_sched_with, SearchStrategy, XtalkOptions};

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::qasm_emit_gate;
use crate::circuit::{build_dag, Circuit, CircuitDag, GateKind};
use crate::device::{DeviceModel, Edge};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("gate {index} ({kind}) is not native; lower macros first")]
    NonNative { index: usize, kind: &'static str },
    #[error("gate {index}: CX on {edge} which is not a device edge")]
    NotAnEdge { index: usize, edge: Edge },
    #[error("circuit uses {circuit} qubits but the device has {device}")]
    TooManyQubits { circuit: usize, device: usize },
    #[error("parameter {0}")]
    InvalidParameter(String),
}

/// A circuit together with a start time for every gate, on a 1 ns grid.
///
/// `fences` are precedence edges added on top of the dependency DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledCircuit {
    circuit: Circuit,
    start: Vec<u64>,
    durations: Vec<u64>,
    fences: Vec<(usize, usize)>,
    makespan: u64,
}

/// Duration of a gate kind on `d`.
pub fn gate_duration(d: &DeviceModel, kind: GateKind) -> u64 {
    let t = d.durations();
    match kind {
        GateKind::Barrier => 0,
        GateKind::CX => t.cx,
        GateKind::Measure => t.measure,
        _ => t.sq,
    }
}

pub(crate) fn check_schedulable(c: &Circuit, d: &DeviceModel) -> Result<(), ScheduleError> {
    if c.num_qubits() > d.num_qubits() {
        return Err(ScheduleError::TooManyQubits {
            circuit: c.num_qubits(),
            device: d.num_qubits(),
        });
    }
    for (index, g) in c.gates().iter().enumerate() {
        if g.kind.is_macro() {
            return Err(ScheduleError::NonNative {
                index,
                kind: g.kind.name(),
            });
        }
        if g.is_cx() {
            let edge = Edge::new(g.qubits[0], g.qubits[1]);
            if !d.has_edge(edge) {
                return Err(ScheduleError::NotAnEdge { index, edge });
            }
        }
    }
    Ok(())
}

/// ASAP over `dag`: every gate starts when its last predecessor finishes.
pub(crate) fn asap(c: &Circuit, d: &DeviceModel, dag: &CircuitDag, fences: Vec<(usize, usize)>) -> ScheduledCircuit {
    let durations: Vec<u64> = c.gates().iter().map(|g| gate_duration(d, g.kind)).collect();
    let mut start = vec![0u64; c.len()];
    for i in dag.topological_order().expect("acyclic") {
        start[i] = dag.preds(i).iter().map(|&p| start[p] + durations[p]).max().unwrap_or(0);
    }
    let makespan = (0..c.len()).map(|i| start[i] + durations[i]).max().unwrap_or(0);
    ScheduledCircuit {
        circuit: c.clone(),
        start,
        durations,
        fences,
        makespan,
    }
}

/// Maximally parallel as-soon-as-possible schedule.
pub fn par_sched(c: &Circuit, d: &DeviceModel) -> Result<ScheduledCircuit, ScheduleError> {
    check_schedulable(c, d)?;
    Ok(asap(c, d, &build_dag(c), Vec::new()))
}

#[derive(Serialize)]
struct GateTiming {
    index: usize,
    gate: String,
    start_ns: u64,
    duration_ns: u64,
}

#[derive(Serialize)]
struct ScheduleJson {
    makespan_ns: u64,
    gate_depth: u64,
    gates: Vec<GateTiming>,
    fences: Vec<(usize, usize)>,
}

impl ScheduledCircuit {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn start(&self, i: usize) -> u64 {
        self.start[i]
    }

    pub fn duration(&self, i: usize) -> u64 {
        self.durations[i]
    }

    pub fn end(&self, i: usize) -> u64 {
        self.start[i] + self.durations[i]
    }

    pub fn starts(&self) -> &[u64] {
        &self.start
    }

    pub fn fences(&self) -> &[(usize, usize)] {
        &self.fences
    }

    pub fn makespan(&self) -> u64 {
        self.makespan
    }

    /// Whether the execution intervals of gates `a` and `b` intersect.
    pub fn overlaps(&self, a: usize, b: usize) -> bool {
        self.start[a] < self.end(b) && self.start[b] < self.end(a)
    }

    /// Dependency DAG including the added fences.
    pub fn dag(&self) -> CircuitDag {
        build_dag(&self.circuit)
            .with_edges(&self.fences)
            .expect("fences keep the dag acyclic")
    }

    /// Longest dependency path counted in non-barrier gates.
    pub fn gate_depth(&self) -> u64 {
        let gates = self.circuit.gates();
        self.dag()
            .longest_path(|i| u64::from(gates[i].kind != GateKind::Barrier))
    }

    /// Edges of CX gates running concurrently with CX gate `i`.
    pub fn concurrent_cx_edges(&self, i: usize) -> Vec<Edge> {
        let gates = self.circuit.gates();
        (0..gates.len())
            .filter(|&j| j != i && gates[j].is_cx() && self.overlaps(i, j))
            .map(|j| Edge::new(gates[j].qubits[0], gates[j].qubits[1]))
            .collect()
    }

    /// Checks dependency order, per-qubit exclusivity and the makespan.
    pub fn check_invariants(&self) -> Result<(), String> {
        let dag = self.dag();
        for (a, b) in dag.edges() {
            if self.start[b] < self.end(a) {
                return Err(format!("gate {b} starts before its predecessor {a} ends"));
            }
        }
        let gates = self.circuit.gates();
        for a in 0..gates.len() {
            for b in a + 1..gates.len() {
                let shared = gates[a].qubits.iter().any(|q| gates[b].qubits.contains(q));
                if shared && self.durations[a] > 0 && self.durations[b] > 0 && self.overlaps(a, b) {
                    return Err(format!("gates {a} and {b} share a qubit and overlap"));
                }
            }
        }
        let m = (0..gates.len()).map(|i| self.end(i)).max().unwrap_or(0);
        if m != self.makespan {
            return Err(format!("makespan {} != {m}", self.makespan));
        }
        Ok(())
    }

    /// Gate indices ordered by `(start, index)`.
    pub fn time_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.circuit.len()).collect();
        order.sort_by_key(|&i| (self.start[i], i));
        order
    }

    pub fn to_json(&self) -> String {
        let gates = self
            .circuit
            .gates()
            .iter()
            .enumerate()
            .map(|(index, g)| GateTiming {
                index,
                gate: qasm_emit_gate(g).trim_end_matches(';').to_string(),
                start_ns: self.start[index],
                duration_ns: self.durations[index],
            })
            .collect();
        let doc = ScheduleJson {
            makespan_ns: self.makespan,
            gate_depth: self.gate_depth(),
            gates,
            fences: self.fences.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("schedule serializes")
    }

    /// QASM in time order with start-time comments and a `barrier` line in
    /// front of the later gate of every fence.
    pub fn to_annotated_qasm(&self) -> String {
        let c = &self.circuit;
        let gates = c.gates();
        let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        let _ = writeln!(s, "qreg q[{}];", c.num_qubits());
        if c.num_clbits() > 0 {
            let _ = writeln!(s, "creg c[{}];", c.num_clbits());
        }
        for i in self.time_order() {
            for &(a, _) in self.fences.iter().filter(|&&(_, b)| b == i) {
                let mut qs: Vec<usize> = gates[a].qubits.iter().chain(&gates[i].qubits).copied().collect();
                qs.sort_unstable();
                let args: Vec<String> = qs.iter().map(|q| format!("q[{q}]")).collect();
                let _ = writeln!(s, "barrier {}; // fence {a} -> {i}", args.join(","));
            }
            let _ = writeln!(s, "{} // t={}ns", qasm_emit_gate(&gates[i]), self.start[i]);
        }
        s
    }
}
