//! Randomized benchmarking and simultaneous RB.
//!
//! Sequences are built from uniformly random Cliffords followed by the
//! inverting element. Every Clifford is laid out as three barrier-separated
//! layers (single-qubit prefix, CX core, single-qubit suffix) so that, in SRB,
//! the CX cores of the two sequences start together.

mod characterize;
mod fit;

pub use characterize::{characterize_device, characterize_device_with, CrosstalkCell, CrosstalkReport};
pub use fit::{fit_decay, DecayFit};

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::clifford::{random_clifford, CliffordTableau};
use crate::device::{DeviceError, Edge};
use crate::schedule::ScheduleError;
use crate::sim::{DensityMatrix, KrausChannel, SimError};

/// Longest sequence accepted by [`RBConfig::validate`].
pub const MAX_LENGTH: usize = 1500;

#[derive(Debug, Error)]
pub enum RbError {
    #[error("invalid RB configuration: {0}")]
    Config(String),
    #[error("edges {0} and {1} share a qubit")]
    SharedQubit(Edge, Edge),
    #[error("cannot fit decay: {0}")]
    DegenerateFit(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<RbError>,
    },
}

impl RbError {
    pub(crate) fn context(self, context: impl Into<String>) -> RbError {
        RbError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

/// How the second sequence of an SRB pair is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SrbPairing {
    /// Each Clifford of the second sequence is uniform conditioned on having
    /// the same minimal CX count as its partner, so the CX cores coincide.
    #[default]
    ClassMatched,
    /// Both sequences drawn independently.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RBConfig {
    pub lengths: Vec<usize>,
    pub num_seeds: usize,
    pub seed: u64,
    #[serde(default)]
    pub pairing: SrbPairing,
}

impl Default for RBConfig {
    fn default() -> Self {
        RBConfig {
            lengths: vec![1, 5, 10, 20, 50, 100, 150],
            num_seeds: 5,
            seed: 0,
            pairing: SrbPairing::ClassMatched,
        }
    }
}

impl RBConfig {
    pub fn validate(&self) -> Result<(), RbError> {
        if self.lengths.len() < 3 {
            return Err(RbError::Config("at least 3 lengths are needed for a fit".into()));
        }
        if self.lengths[0] == 0 || self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RbError::Config(
                "lengths must be positive and strictly increasing".into(),
            ));
        }
        if *self.lengths.last().expect("non-empty") > MAX_LENGTH {
            return Err(RbError::Config(format!("lengths may not exceed {MAX_LENGTH}")));
        }
        if self.num_seeds == 0 {
            return Err(RbError::Config("num_seeds must be at least 1".into()));
        }
        Ok(())
    }
}

/// Survival data and fitted decay of one RB experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RBResult {
    pub num_qubits: usize,
    /// Mean survival per length.
    pub survival: BTreeMap<usize, f64>,
    /// Survival of each seed per length, in seed order.
    pub per_seed: BTreeMap<usize, Vec<f64>>,
    pub fit_a: f64,
    pub fit_b: f64,
    pub fit_alpha: f64,
    pub epc: f64,
    pub fit_residual: f64,
}

/// `(d - 1) / d * (1 - alpha)` with `d = 2^n`.
pub fn epc_from_alpha(alpha: f64, num_qubits: usize) -> f64 {
    let d = (1u64 << num_qubits) as f64;
    (d - 1.0) / d * (1.0 - alpha)
}

impl RBResult {
    pub fn from_samples(num_qubits: usize, per_seed: BTreeMap<usize, Vec<f64>>) -> Result<Self, RbError> {
        let survival: BTreeMap<usize, f64> = per_seed
            .iter()
            .map(|(&m, v)| (m, v.iter().sum::<f64>() / v.len() as f64))
            .collect();
        let fit = fit_decay(&survival)?;
        Ok(RBResult {
            num_qubits,
            survival,
            per_seed,
            fit_a: fit.a,
            fit_b: fit.b,
            fit_alpha: fit.alpha,
            epc: epc_from_alpha(fit.alpha, num_qubits),
            fit_residual: fit.residual,
        })
    }
}

/// `m` random Cliffords and the element inverting their product.
pub fn random_sequence<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Vec<CliffordTableau> {
    let mut seq: Vec<CliffordTableau> = (0..m).map(|_| random_clifford(n, rng)).collect();
    seq.push(inverse_of_product(&seq, n));
    seq
}

fn inverse_of_product(seq: &[CliffordTableau], n: usize) -> CliffordTableau {
    seq.iter()
        .fold(CliffordTableau::identity(n), |acc, c| {
            acc.compose(c).expect("same size")
        })
        .invert()
}

fn relabel(gates: &[Gate], qubits: &[usize]) -> Vec<Gate> {
    gates
        .iter()
        .map(|g| Gate::new(g.kind, g.qubits.iter().map(|&q| qubits[q]).collect()))
        .collect()
}

/// Appends the three barrier-separated layers of each Clifford position.
/// `tracks[k]` is a Clifford sequence placed on qubits `targets[k]`.
fn push_layers(c: &mut Circuit, tracks: &[&[CliffordTableau]], targets: &[&[usize]]) -> Result<(), RbError> {
    let all: Vec<usize> = targets.iter().flat_map(|t| t.iter().copied()).collect();
    let len = tracks[0].len();
    for pos in 0..len {
        let forms: Vec<_> = tracks
            .iter()
            .map(|t| t[pos].decompose_canonical().expect("1 or 2 qubit Cliffords"))
            .collect();
        for part in 0..3 {
            for (form, q) in forms.iter().zip(targets) {
                let gates = match part {
                    0 => &form.pre,
                    1 => &form.core,
                    _ => &form.post,
                };
                for g in relabel(gates, q) {
                    c.push(g)?;
                }
            }
            c.push(Gate::barrier(all.iter().copied()))?;
        }
    }
    Ok(())
}

/// Measured RB circuit for an explicit sequence of 1- or 2-qubit Cliffords.
pub fn rb_circuit(seq: &[CliffordTableau]) -> Result<Circuit, RbError> {
    let n = seq.first().map_or(0, CliffordTableau::num_qubits);
    if !(1..=2).contains(&n) || seq.iter().any(|c| c.num_qubits() != n) {
        return Err(RbError::Config("RB sequences need 1 or 2 qubits throughout".into()));
    }
    let qubits: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n, n);
    push_layers(&mut c, &[seq], &[&qubits])?;
    for q in 0..n {
        c.push(Gate::measure(q, q))?;
    }
    Ok(c)
}

/// RB circuit on `n` (1 or 2) qubits: `m` random Cliffords, the inverse, and a
/// measurement of every qubit. The ideal outcome is all zeros.
pub fn generate_rb_sequence<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<(Circuit, String), RbError> {
    if m == 0 || !(1..=2).contains(&n) {
        return Err(RbError::Config(format!(
            "need m >= 1 and n in {{1, 2}}, got m = {m}, n = {n}"
        )));
    }
    Ok((rb_circuit(&random_sequence(m, n, rng))?, "0".repeat(n)))
}

/// Two simultaneous two-qubit RB sequences.
///
/// The circuit acts on four local qubits: edge `a` is `(0, 1)`, edge `b` is
/// `(2, 3)`, and `qubits` maps them back to device indices. Clbits `0, 1`
/// read edge `a` and `2, 3` read edge `b`.
#[derive(Debug, Clone)]
pub struct SrbCircuit {
    pub circuit: Circuit,
    pub qubits: [usize; 4],
    /// Number of aligned Clifford positions (`m + 1`).
    pub layers: usize,
}

/// Two-qubit sequences for an SRB pair, each ending in its inverse.
pub fn srb_sequences<R: Rng + ?Sized>(
    m: usize,
    pairing: SrbPairing,
    rng: &mut R,
) -> (Vec<CliffordTableau>, Vec<CliffordTableau>) {
    let mut seq_a: Vec<CliffordTableau> = Vec::with_capacity(m + 1);
    let mut seq_b: Vec<CliffordTableau> = Vec::with_capacity(m + 1);
    for _ in 0..m {
        let a = random_clifford(2, rng);
        let b = match pairing {
            SrbPairing::Independent => random_clifford(2, rng),
            SrbPairing::ClassMatched => {
                let class = a.cx_class().expect("two qubits");
                loop {
                    let b = random_clifford(2, rng);
                    if b.cx_class().expect("two qubits") == class {
                        break b;
                    }
                }
            }
        };
        seq_a.push(a);
        seq_b.push(b);
    }
    seq_a.push(inverse_of_product(&seq_a, 2));
    seq_b.push(inverse_of_product(&seq_b, 2));
    (seq_a, seq_b)
}

/// Lays out two equally long two-qubit sequences side by side.
pub fn srb_circuit(
    seq_a: &[CliffordTableau],
    seq_b: &[CliffordTableau],
    edge_a: Edge,
    edge_b: Edge,
) -> Result<SrbCircuit, RbError> {
    if edge_a.shares_qubit(&edge_b) {
        return Err(RbError::SharedQubit(edge_a, edge_b));
    }
    if seq_a.len() != seq_b.len() || seq_a.is_empty() {
        return Err(RbError::Config(
            "SRB sequences must be non-empty and equally long".into(),
        ));
    }
    if seq_a.iter().chain(seq_b).any(|c| c.num_qubits() != 2) {
        return Err(RbError::Config("SRB sequences must be two-qubit".into()));
    }
    let mut c = Circuit::new(4, 4);
    push_layers(&mut c, &[seq_a, seq_b], &[&[0, 1], &[2, 3]])?;
    for q in 0..4 {
        c.push(Gate::measure(q, q))?;
    }
    Ok(SrbCircuit {
        circuit: c,
        qubits: [edge_a.lo(), edge_a.hi(), edge_b.lo(), edge_b.hi()],
        layers: seq_a.len(),
    })
}

pub fn generate_srb_pair<R: Rng + ?Sized>(
    m: usize,
    edge_a: Edge,
    edge_b: Edge,
    pairing: SrbPairing,
    rng: &mut R,
) -> Result<SrbCircuit, RbError> {
    if edge_a.shares_qubit(&edge_b) {
        return Err(RbError::SharedQubit(edge_a, edge_b));
    }
    if m == 0 {
        return Err(RbError::Config("sequence length must be at least 1".into()));
    }
    let (seq_a, seq_b) = srb_sequences(m, pairing, rng);
    srb_circuit(&seq_a, &seq_b, edge_a, edge_b)
}

/// Survival of one RB sequence where `channel` acts on all `n` qubits after
/// every Clifford, including the inverse.
pub fn channel_rb_survival<R: Rng + ?Sized>(m: usize, channel: &KrausChannel, rng: &mut R) -> Result<f64, RbError> {
    let n = channel.num_qubits();
    let qubits: Vec<usize> = (0..n).collect();
    let mut rho = DensityMatrix::zero_state(n);
    for c in random_sequence(m, n, rng) {
        for g in c.tableau_to_gates().expect("1 or 2 qubits") {
            rho.apply_unitary(&g)?;
        }
        rho.apply_channel(channel, &qubits)?;
    }
    Ok(rho.zero_probability(&qubits))
}

/// RB against a fixed per-Clifford channel, one sequence per `(length, seed)`.
pub fn channel_rb(channel: &KrausChannel, cfg: &RBConfig) -> Result<RBResult, RbError> {
    use rand::SeedableRng;
    cfg.validate()?;
    let mut per_seed = BTreeMap::new();
    for &m in &cfg.lengths {
        let mut v = Vec::with_capacity(cfg.num_seeds);
        for s in 0..cfg.num_seeds {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(&[cfg.seed, m as u64, s as u64]));
            v.push(channel_rb_survival(m, channel, &mut rng)?);
        }
        per_seed.insert(m, v);
    }
    RBResult::from_samples(channel.num_qubits(), per_seed)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic seed for a tuple of identifiers.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5EED_u64, |h, &p| splitmix(h ^ splitmix(p)))
}
