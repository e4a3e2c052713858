//! Crosstalk characterization: isolated RB on every edge, SRB on every pair
//! of disjoint edges, and the resulting ratio matrix.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, rb_circuit, srb_circuit, srb_sequences, RBConfig, RBResult, RbError};
use crate::circuit::Circuit;
use crate::device::{CrosstalkMap, DeviceModel, Edge};
use crate::schedule::par_sched;
use crate::sim::{run_scheduled, NoiseBinding, OutcomeDistribution, ShotMode};

/// One cell of the ratio matrix: the error of `edge` alone and while `other`
/// runs simultaneously.
///
/// The isolated baseline replays exactly the Clifford sequences that `edge`
/// ran during SRB, so sequence-to-sequence scatter cancels in the ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkCell {
    pub edge: Edge,
    pub other: Edge,
    pub independent: f64,
    pub correlated: f64,
    pub ratio: f64,
    pub isolated_rb: RBResult,
    pub simultaneous_rb: RBResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkReport {
    pub device: String,
    pub config: RBConfig,
    pub shot_mode: ShotMode,
    /// Every coupling edge of the device, in order.
    pub edges: Vec<Edge>,
    /// Cells ordered by `(edge, other)`.
    pub cells: Vec<CrosstalkCell>,
}

impl CrosstalkReport {
    pub fn cell(&self, edge: Edge, other: Edge) -> Option<&CrosstalkCell> {
        self.cells.iter().find(|c| c.edge == edge && c.other == other)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Ratio matrix with rows `edge` and columns `other`. Cells for edges that
    /// share a qubit are left empty.
    pub fn to_csv_matrix(&self) -> String {
        let edges = &self.edges;
        let mut out = String::from("edge");
        for e in edges {
            write!(out, ",{e}").expect("string write");
        }
        out.push('\n');
        for &e in edges {
            write!(out, "{e}").expect("string write");
            for &f in edges {
                out.push(',');
                if let Some(c) = self.cell(e, f) {
                    write!(out, "{:.6}", c.ratio).expect("string write");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Measured ratios as a crosstalk map for the scheduler.
    pub fn to_crosstalk_map(&self) -> CrosstalkMap {
        let mut map = CrosstalkMap::new();
        for c in &self.cells {
            if c.ratio.is_finite() {
                map.insert(c.edge, c.other, c.ratio.max(0.0))
                    .expect("cells hold disjoint edges");
            }
        }
        map
    }
}

/// Probability that every listed clbit reads 0.
fn zero_marginal(dist: &OutcomeDistribution, clbits: &[usize]) -> f64 {
    let n = dist.num_bits;
    dist.probabilities
        .iter()
        .filter(|(s, _)| clbits.iter().all(|&b| s.as_bytes()[n - 1 - b] == b'0'))
        .map(|(_, &p)| p)
        .sum()
}

/// Schedules `c` (on local qubits) onto the sub-device `qubits` and returns
/// the zero-marginal of each clbit group.
fn simulate(
    d: &DeviceModel,
    qubits: &[usize],
    c: &Circuit,
    groups: &[&[usize]],
    shot_mode: ShotMode,
) -> Result<Vec<f64>, RbError> {
    let sub = d.restrict(qubits)?;
    let sc = par_sched(c, &sub)?;
    let dist = run_scheduled(
        &sc,
        &NoiseBinding {
            device: &sub,
            shot_mode,
        },
    )?;
    Ok(groups.iter().map(|g| zero_marginal(&dist, g)).collect())
}

fn shot_seed(shot_mode: ShotMode, seed: u64) -> ShotMode {
    match shot_mode {
        ShotMode::Analytic => ShotMode::Analytic,
        ShotMode::Sampled { shots, .. } => ShotMode::Sampled { shots, seed },
    }
}

/// [`characterize_device_with`] in analytic mode.
pub fn characterize_device(d: &DeviceModel, cfg: &RBConfig) -> Result<CrosstalkReport, RbError> {
    characterize_device_with(d, cfg, ShotMode::Analytic)
}

/// Runs SRB on every unordered pair of disjoint edges, together with
/// isolated RB of the same sequences on each edge. Each pair yields both
/// directed cells.
pub fn characterize_device_with(
    d: &DeviceModel,
    cfg: &RBConfig,
    shot_mode: ShotMode,
) -> Result<CrosstalkReport, RbError> {
    cfg.validate()?;
    let edges: Vec<Edge> = d.edges().collect();
    let pairs: Vec<(Edge, Edge)> = d.disjoint_edge_pairs().into_iter().filter(|(e, f)| e < f).collect();
    let jobs: Vec<(Edge, Edge, usize, usize)> = pairs
        .iter()
        .flat_map(|&(e, f)| {
            cfg.lengths
                .iter()
                .flat_map(move |&m| (0..cfg.num_seeds).map(move |s| (e, f, m, s)))
        })
        .collect();

    // Per job: [srb on e, srb on f, isolated e, isolated f].
    let results: Vec<[f64; 4]> = jobs
        .par_iter()
        .map(|&(e, f, m, s)| {
            let ids = [e.lo(), e.hi(), f.lo(), f.hi(), m, s].map(|v| v as u64);
            let seed = derive_seed(&[&[cfg.seed][..], &ids].concat());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (seq_e, seq_f) = srb_sequences(m, cfg.pairing, &mut rng);
            let annotate = |err: RbError| err.context(format!("SRB on {e} | {f}, m = {m}, seed {s}"));
            let srb = srb_circuit(&seq_e, &seq_f, e, f).map_err(annotate)?;
            let both = simulate(
                d,
                &srb.qubits,
                &srb.circuit,
                &[&[0, 1], &[2, 3]],
                shot_seed(shot_mode, seed),
            )
            .map_err(annotate)?;
            let mut iso = [0.0; 2];
            for (k, (seq, edge)) in [(&seq_e, e), (&seq_f, f)].into_iter().enumerate() {
                let c = rb_circuit(seq).map_err(annotate)?;
                iso[k] = simulate(
                    d,
                    &edge.qubits(),
                    &c,
                    &[&[0, 1]],
                    shot_seed(shot_mode, seed ^ (k as u64 + 1)),
                )
                .map_err(annotate)?[0];
            }
            Ok([both[0], both[1], iso[0], iso[1]])
        })
        .collect::<Result<_, RbError>>()?;

    let per_pair = cfg.lengths.len() * cfg.num_seeds;
    let collect = |chunk: &[[f64; 4]], which: usize| -> BTreeMap<usize, Vec<f64>> {
        cfg.lengths
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                (
                    m,
                    chunk[i * cfg.num_seeds..(i + 1) * cfg.num_seeds]
                        .iter()
                        .map(|v| v[which])
                        .collect(),
                )
            })
            .collect()
    };

    let mut cells = Vec::with_capacity(2 * pairs.len());
    for (k, &(e, f)) in pairs.iter().enumerate() {
        let chunk = &results[k * per_pair..(k + 1) * per_pair];
        for (which, (a, b)) in [(e, f), (f, e)].into_iter().enumerate() {
            let annotate = |err: RbError| err.context(format!("fit for {a} | {b}"));
            let simultaneous_rb = RBResult::from_samples(2, collect(chunk, which)).map_err(annotate)?;
            let isolated_rb = RBResult::from_samples(2, collect(chunk, which + 2)).map_err(annotate)?;
            let independent = isolated_rb.epc;
            let correlated = simultaneous_rb.epc;
            let ratio = if independent > 0.0 {
                correlated / independent
            } else {
                f64::NAN
            };
            cells.push(CrosstalkCell {
                edge: a,
                other: b,
                independent,
                correlated,
                ratio,
                isolated_rb,
                simultaneous_rb,
            });
        }
    }
    cells.sort_by_key(|c| (c.edge, c.other));
    Ok(CrosstalkReport {
        device: d.name().to_string(),
        config: cfg.clone(),
        shot_mode,
        edges,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::DeviceSpec;

    fn line4(ratio: f64) -> DeviceModel {
        let spec: DeviceSpec = serde_json::from_value(serde_json::json!({
            "name": "line4",
            "num_qubits": 4,
            "edges": [[0, 1], [1, 2], [2, 3]],
            "cx_error": {"0-1": 0.01, "1-2": 0.01, "2-3": 0.01},
            "durations_ns": {"cx": 300, "sq": 30, "measure": 1000},
            "crosstalk": [{"edge": "0-1", "other": "2-3", "ratio": ratio}]
        }))
        .unwrap();
        DeviceModel::from_spec(&spec).unwrap()
    }

    fn small_cfg() -> RBConfig {
        RBConfig {
            lengths: vec![1, 10, 30, 60, 100, 150],
            num_seeds: 3,
            seed: 3,
            ..RBConfig::default()
        }
    }

    #[test]
    fn marginals() {
        let dist = OutcomeDistribution {
            num_bits: 3,
            mode: ShotMode::Analytic,
            probabilities: [
                ("000".to_string(), 0.5),
                ("100".to_string(), 0.25),
                ("011".to_string(), 0.25),
            ]
            .into(),
        };
        assert!((zero_marginal(&dist, &[0, 1]) - 0.75).abs() < 1e-12);
        assert!((zero_marginal(&dist, &[2]) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn recovers_injected_ratio_on_a_line() {
        let report = characterize_device(&line4(3.0), &small_cfg()).unwrap();
        assert_eq!(report.cells.len(), 2);
        let hot = report.cell(Edge::new(0, 1), Edge::new(2, 3)).unwrap();
        let cold = report.cell(Edge::new(2, 3), Edge::new(0, 1)).unwrap();
        assert!((hot.ratio - 3.0).abs() < 0.3, "{}", hot.ratio);
        assert!((cold.ratio - 1.0).abs() < 0.05, "{}", cold.ratio);
        assert!((hot.ratio - hot.correlated / hot.independent).abs() < 1e-12);

        let csv = report.to_csv_matrix();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "edge,0-1,1-2,2-3");
        assert!(lines[1].starts_with("0-1,,,"));
        assert_eq!(lines[2], "1-2,,,");
        let map = report.to_crosstalk_map();
        assert_eq!(map.len(), 2);
    }

    #[test]
    fn deterministic() {
        let a = characterize_device(&line4(2.0), &small_cfg()).unwrap();
        let b = characterize_device(&line4(2.0), &small_cfg()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
