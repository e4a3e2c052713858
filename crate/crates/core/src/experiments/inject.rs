//! Crosstalk injection: a CSWAP whose CX gates are made to overlap with
//! extra CX gates on spectator pairs.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{compact, map_to_device, ExperimentError};
use crate::circuit::{decompose_to_native, Circuit, Gate, GateKind, MacroKind};
use crate::device::{DeviceModel, Edge};
use crate::schedule::par_sched;
use crate::sim::{run_scheduled, NoiseBinding};

/// Largest supported number of injected CX gates.
pub const MAX_INJECTED: usize = 3;

/// Index (among the CSWAP's CX gates) that the `j`-th injected CX overlaps.
pub const INJECTION_ALIGN: [usize; MAX_INJECTED] = [2, 5, 7];

/// Ideal CSWAP output: control and first target prepared in `|1>`.
pub const CSWAP_EXPECTED: &str = "101";

/// CSWAP on qubits 0 (control), 1, 2 with inputs `|1, 1, 0>`, plus `k`
/// injected `CX(2j+3, 2j+4)`. A barrier over the injected pair and the
/// aligned CSWAP CX makes both start together.
pub fn injection_circuit(k: usize) -> Result<Circuit, ExperimentError> {
    if k > MAX_INJECTED {
        return Err(ExperimentError::Input(format!(
            "at most {MAX_INJECTED} injected CX gates, got {k}"
        )));
    }
    let n = 3 + 2 * k;
    let mut c = Circuit::new(n, 3);
    c.push(Gate::single(GateKind::X, 0))?;
    c.push(Gate::single(GateKind::X, 1))?;
    let cswap = Circuit::from_gates(3, 0, [Gate::new(GateKind::CSWAP, vec![0, 1, 2])])?;
    let lowered = decompose_to_native(&cswap, &BTreeSet::from([MacroKind::CSWAP]))?;
    let mut cx_index = 0;
    for g in lowered.gates() {
        if g.is_cx() {
            if let Some(j) = INJECTION_ALIGN[..k].iter().position(|&a| a == cx_index) {
                let (p, q) = (2 * j + 3, 2 * j + 4);
                c.push(Gate::barrier([g.qubits[0], g.qubits[1], p, q]))?;
                c.push(Gate::cx(p, q))?;
            }
            cx_index += 1;
        }
        c.push(g.clone())?;
    }
    for q in 0..3 {
        c.push(Gate::measure(q, q))?;
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectionRow {
    pub k: usize,
    pub probability: f64,
    /// `1 - p_k / p_0`.
    pub relative_drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectionReport {
    pub device: String,
    pub expected: String,
    pub rows: Vec<InjectionRow>,
    pub worst_relative_drop: f64,
    /// Injected pairs without a declared crosstalk ratio.
    pub warnings: Vec<String>,
}

impl InjectionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String, ExperimentError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "probability", "relative_drop"])?;
        for r in &self.rows {
            w.write_record([r.k.to_string(), r.probability.to_string(), r.relative_drop.to_string()])?;
        }
        Ok(
            String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
                .expect("csv output is UTF-8"),
        )
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].probability < w[0].probability)
    }
}

/// Correct-output probability of [`injection_circuit`] for `k = 0..=max_k`
/// under ParSched on `d`.
pub fn run_injection(d: &DeviceModel, max_k: usize) -> Result<InjectionReport, ExperimentError> {
    if max_k > MAX_INJECTED {
        return Err(ExperimentError::Input(format!("max k is {MAX_INJECTED}, got {max_k}")));
    }
    if d.num_qubits() < 3 + 2 * max_k {
        return Err(ExperimentError::Mismatch {
            name: format!("injection with k = {max_k}"),
            reason: format!("needs {} qubits, device has {}", 3 + 2 * max_k, d.num_qubits()),
        });
    }
    let mut warnings = Vec::new();
    let full = injection_circuit(max_k)?;
    for j in 0..max_k {
        let injected = Edge::new(2 * j + 3, 2 * j + 4);
        if !d.has_edge(injected) {
            return Err(ExperimentError::Mismatch {
                name: format!("injection with k = {max_k}"),
                reason: format!("injected pair {injected} is not a coupling"),
            });
        }
        for g in full.gates().iter().filter(|g| g.is_cx() && g.qubits[0] < 3) {
            let e = Edge::new(g.qubits[0], g.qubits[1]);
            if d.has_edge(e) && d.crosstalk().ratio(e, injected) == 1.0 {
                let w = format!("no crosstalk ratio declared for {e} | {injected}; using 1");
                if !warnings.contains(&w) {
                    warnings.push(w);
                }
            }
        }
    }

    let probs: Vec<f64> = (0..=max_k)
        .into_par_iter()
        .map(|k| {
            let name = format!("injection with k = {k}");
            let mapped = map_to_device(&injection_circuit(k)?, d, &name)?;
            let (small, qubits) = compact(&mapped)?;
            let sub = d.restrict(&qubits)?;
            let sc = par_sched(&small, &sub)?;
            Ok(run_scheduled(&sc, &NoiseBinding::analytic(&sub))?.probability(CSWAP_EXPECTED))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let base = probs[0];
    let rows: Vec<InjectionRow> = probs
        .iter()
        .enumerate()
        .map(|(k, &p)| InjectionRow {
            k,
            probability: p,
            relative_drop: if base > 0.0 { 1.0 - p / base } else { 0.0 },
        })
        .collect();
    let worst_relative_drop = rows.iter().map(|r| r.relative_drop).fold(0.0, f64::max);
    Ok(InjectionReport {
        device: d.name().to_string(),
        expected: CSWAP_EXPECTED.to_string(),
        rows,
        worst_relative_drop,
        warnings,
    })
}
