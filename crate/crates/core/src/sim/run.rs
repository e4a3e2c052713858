use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64 as C64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::channel::{depolarizing_channel, thermal_relaxation_channel};
use super::density::DensityMatrix;
use super::linalg::{apply_local, gate_matrix, ONE, ZERO};
use super::SimError;
use crate::circuit::{Circuit, GateKind};
use crate::device::{DeviceModel, Edge};
use crate::schedule::ScheduledCircuit;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 10;

/// Probabilities below this are dropped from analytic distributions.
const PROB_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ShotMode {
    Analytic,
    Sampled { shots: u64, seed: u64 },
}

/// A device plus the way outcomes are read out.
#[derive(Debug, Clone, Copy)]
pub struct NoiseBinding<'a> {
    pub device: &'a DeviceModel,
    pub shot_mode: ShotMode,
}

impl<'a> NoiseBinding<'a> {
    pub fn analytic(device: &'a DeviceModel) -> Self {
        NoiseBinding {
            device,
            shot_mode: ShotMode::Analytic,
        }
    }
}

/// Measured bitstring probabilities. Bit `i` of a string is classical bit
/// `i` (or qubit `i` when the circuit measures nothing), written with the
/// highest index leftmost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub num_bits: usize,
    #[serde(flatten)]
    pub mode: ShotMode,
    pub probabilities: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    pub fn bitstring(value: usize, num_bits: usize) -> String {
        if num_bits == 0 {
            return String::new();
        }
        format!("{value:0num_bits$b}")
    }

    fn from_dense(probs: &[f64], num_bits: usize, mode: ShotMode, floor: f64) -> Self {
        let probabilities = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > floor)
            .map(|(v, &p)| (Self::bitstring(v, num_bits), p))
            .collect();
        OutcomeDistribution {
            num_bits,
            mode,
            probabilities,
        }
    }

    pub fn probability(&self, bits: &str) -> f64 {
        self.probabilities.get(bits).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// Bhattacharyya overlap `sum sqrt(p q)` with another distribution.
    pub fn classical_fidelity(&self, other: &OutcomeDistribution) -> f64 {
        self.probabilities
            .iter()
            .map(|(k, &p)| (p * other.probability(k)).max(0.0).sqrt())
            .sum()
    }

    /// Largest absolute probability difference over the union of outcomes.
    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> f64 {
        let keys: BTreeSet<&String> = self.probabilities.keys().chain(other.probabilities.keys()).collect();
        keys.into_iter()
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("distribution serializes")
    }
}

fn check_size(n: usize) -> Result<(), SimError> {
    if n > MAX_QUBITS {
        Err(SimError::TooLarge(n))
    } else {
        Ok(())
    }
}

fn validate(sc: &ScheduledCircuit, d: &DeviceModel) -> Result<(), SimError> {
    let c = sc.circuit();
    check_size(c.num_qubits())?;
    if c.num_qubits() > d.num_qubits() {
        return Err(SimError::Mismatch(format!(
            "circuit has {} qubits, device {}",
            c.num_qubits(),
            d.num_qubits()
        )));
    }
    for (i, g) in c.gates().iter().enumerate() {
        if g.kind.is_macro() {
            return Err(SimError::Mismatch(format!(
                "gate {i} ({}) is not native",
                g.kind.name()
            )));
        }
        if g.is_cx() && !d.has_edge(Edge::new(g.qubits[0], g.qubits[1])) {
            return Err(SimError::Mismatch(format!(
                "gate {i}: no coupling {}-{}",
                g.qubits[0], g.qubits[1]
            )));
        }
    }
    Ok(())
}

/// Runs the time-slot sweep and returns the final state. `observer` sees the
/// state after every unitary and channel application.
pub fn evolve(
    sc: &ScheduledCircuit,
    d: &DeviceModel,
    observer: &mut dyn FnMut(&DensityMatrix),
) -> Result<DensityMatrix, SimError> {
    validate(sc, d)?;
    let c = sc.circuit();
    let gates = c.gates();
    let n = c.num_qubits();
    let mut rho = DensityMatrix::zero_state(n);

    let timed: Vec<usize> = (0..gates.len())
        .filter(|&i| gates[i].kind != GateKind::Barrier)
        .collect();
    let mut times: BTreeSet<u64> = BTreeSet::new();
    for &i in &timed {
        times.insert(sc.start(i));
        times.insert(sc.end(i));
    }
    let times: Vec<u64> = times.into_iter().collect();
    let mut order = timed.clone();
    order.sort_by_key(|&i| (sc.start(i), i));
    let mut next = 0;
    let mut measured = vec![false; n];

    for (k, &t) in times.iter().enumerate() {
        while next < order.len() && sc.start(order[next]) == t {
            let i = order[next];
            next += 1;
            let g = &gates[i];
            match g.kind {
                GateKind::Measure => measured[g.qubits[0]] = true,
                GateKind::CX => {
                    rho.apply_unitary(g)?;
                    observer(&rho);
                    let e = Edge::new(g.qubits[0], g.qubits[1]);
                    let p = d
                        .effective_cx_error(e, &sc.concurrent_cx_edges(i))
                        .map_err(|err| SimError::Mismatch(err.to_string()))?;
                    if p > 0.0 {
                        rho.apply_channel(&depolarizing_channel(2, p)?, &g.qubits)?;
                        observer(&rho);
                    }
                }
                _ => {
                    rho.apply_unitary(g)?;
                    observer(&rho);
                    let p = d.sq_error(g.qubits[0]);
                    if p > 0.0 {
                        rho.apply_channel(&depolarizing_channel(1, p)?, &g.qubits)?;
                        observer(&rho);
                    }
                }
            }
        }
        let Some(&t_next) = times.get(k + 1) else { break };
        let dt = (t_next - t) as f64;
        let mut busy = vec![false; n];
        for &i in &timed {
            if sc.start(i) <= t && t < sc.end(i) {
                for &q in &gates[i].qubits {
                    busy[q] = true;
                }
            }
        }
        for q in 0..n {
            if busy[q] || measured[q] {
                continue;
            }
            let (t1, t2) = (d.t1_ns(q), d.t2_ns(q));
            if t1.is_infinite() && t2.is_infinite() {
                continue;
            }
            rho.apply_channel(&thermal_relaxation_channel(t1, t2, dt)?, &[q])?;
            observer(&rho);
        }
    }
    Ok(rho)
}

/// Reads the measured bits of `rho` for circuit `c`, with optional readout
/// flips from `d`.
pub fn outcome_distribution(
    rho: &DensityMatrix,
    c: &Circuit,
    d: Option<&DeviceModel>,
    mode: ShotMode,
) -> Result<OutcomeDistribution, SimError> {
    let probs = rho.probabilities();
    let meas = c.measurements();
    let (num_bits, mut dense) = if meas.is_empty() {
        (c.num_qubits(), probs.iter().map(|p| p.max(0.0)).collect::<Vec<_>>())
    } else {
        let nb = c.num_clbits();
        let mut out = vec![0.0; 1usize << nb];
        for (i, &p) in probs.iter().enumerate() {
            let mut v = 0usize;
            for &(q, cb) in &meas {
                if (i >> q) & 1 == 1 {
                    v |= 1 << cb;
                } else {
                    v &= !(1 << cb);
                }
            }
            out[v] += p.max(0.0);
        }
        if let Some(d) = d {
            for &(q, cb) in &meas {
                let r = d.readout_error(q);
                if r > 0.0 {
                    let mut flipped = vec![0.0; out.len()];
                    for (v, &p) in out.iter().enumerate() {
                        flipped[v] += (1.0 - r) * p;
                        flipped[v ^ (1 << cb)] += r * p;
                    }
                    out = flipped;
                }
            }
        }
        (nb, out)
    };
    match mode {
        ShotMode::Analytic => Ok(OutcomeDistribution::from_dense(&dense, num_bits, mode, PROB_FLOOR)),
        ShotMode::Sampled { shots, seed } => {
            if shots == 0 {
                return Err(SimError::NoShots);
            }
            let w = WeightedIndex::new(&dense).map_err(|e| SimError::Unphysical(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counts = vec![0u64; dense.len()];
            for _ in 0..shots {
                counts[w.sample(&mut rng)] += 1;
            }
            for (p, &k) in dense.iter_mut().zip(&counts) {
                *p = k as f64 / shots as f64;
            }
            Ok(OutcomeDistribution::from_dense(&dense, num_bits, mode, 0.0))
        }
    }
}

/// Noisy execution of a scheduled circuit.
pub fn run_scheduled(sc: &ScheduledCircuit, nb: &NoiseBinding) -> Result<OutcomeDistribution, SimError> {
    run_scheduled_observed(sc, nb, &mut |_| {})
}

/// [`run_scheduled`] with a callback invoked after every state update.
pub fn run_scheduled_observed(
    sc: &ScheduledCircuit,
    nb: &NoiseBinding,
    observer: &mut dyn FnMut(&DensityMatrix),
) -> Result<OutcomeDistribution, SimError> {
    let rho = evolve(sc, nb.device, observer)?;
    outcome_distribution(&rho, sc.circuit(), Some(nb.device), nb.shot_mode)
}

/// Noiseless execution in program order, ignoring timing. Macro gates are
/// applied directly.
pub fn run_ideal(c: &Circuit) -> Result<OutcomeDistribution, SimError> {
    check_size(c.num_qubits())?;
    let mut rho = DensityMatrix::zero_state(c.num_qubits());
    for g in c.gates() {
        if g.kind.is_unitary() {
            rho.apply_unitary(g)?;
        }
    }
    outcome_distribution(&rho, c, None, ShotMode::Analytic)
}

/// Dense `2^n x 2^n` unitary of the circuit's unitary gates, row-major.
pub fn circuit_unitary(c: &Circuit) -> Result<Vec<C64>, SimError> {
    let n = c.num_qubits();
    check_size(n)?;
    let dim = 1usize << n;
    let mut u = vec![ZERO; dim * dim];
    for i in 0..dim {
        u[i * dim + i] = ONE;
    }
    for g in c.gates() {
        if let Some(m) = gate_matrix(g.kind) {
            let rows: Vec<usize> = g.qubits.iter().map(|&q| q + n).collect();
            apply_local(&mut u, &rows, &m);
        }
    }
    Ok(u)
}
