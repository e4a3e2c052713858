//! Device description: coupling graph, gate errors and durations, relaxation
//! times, and the pairwise CX crosstalk map.
//!
//! Times are kept in nanoseconds internally. The JSON file format uses
//! microseconds for T1/T2 and nanoseconds for gate durations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cap on the crosstalk-amplified CX depolarizing parameter.
pub const EPS_MAX: f64 = 0.75;

#[derive(Debug, Error)]
pub enum DeviceError {
    #[error("cannot read device file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("device schema violation: {0}")]
    Schema(String),
    #[error("unphysical device: {0}")]
    Physicality(String),
    #[error("edge {0} is not a coupling of this device")]
    UnknownEdge(Edge),
    #[error("edges {0} and {1} share a qubit")]
    SharedQubit(Edge, Edge),
}

/// Unordered coupling between two distinct qubits, stored as `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(usize, usize);

impl Edge {
    /// # Panics
    /// If `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an edge needs two distinct qubits");
        Edge(a.min(b), a.max(b))
    }

    pub fn lo(&self) -> usize {
        self.0
    }

    pub fn hi(&self) -> usize {
        self.1
    }

    pub fn qubits(&self) -> [usize; 2] {
        [self.0, self.1]
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0 == q || self.1 == q
    }

    pub fn shares_qubit(&self, other: &Edge) -> bool {
        self.contains(other.0) || self.contains(other.1)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl FromStr for Edge {
    type Err = DeviceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DeviceError::Schema(format!("edge key `{s}` is not of the form \"a-b\""));
        let (a, b) = s.split_once('-').ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a == b {
            return Err(bad());
        }
        Ok(Edge::new(a, b))
    }
}

impl Serialize for Edge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How ratios from several concurrent partners combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Largest single-partner ratio.
    #[default]
    Max,
    /// Product of all partner ratios (still capped at [`EPS_MAX`]).
    ProductCapped,
}

/// Directed crosstalk ratios `r(e|f)`: the error of a CX on `e` while a CX on
/// `f` runs is `r(e|f) * eps(e)`. Absent entries mean 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrosstalkMap {
    entries: BTreeMap<(Edge, Edge), f64>,
}

impl CrosstalkMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `r(e|f)`. The edges must be disjoint and the ratio finite and
    /// non-negative.
    pub fn insert(&mut self, e: Edge, f: Edge, ratio: f64) -> Result<(), DeviceError> {
        if e.shares_qubit(&f) {
            return Err(DeviceError::SharedQubit(e, f));
        }
        if !(ratio.is_finite() && ratio >= 0.0) {
            return Err(DeviceError::Schema(format!(
                "crosstalk ratio r({e}|{f}) = {ratio} must be finite and >= 0"
            )));
        }
        self.entries.insert((e, f), ratio);
        Ok(())
    }

    pub fn ratio(&self, e: Edge, f: Edge) -> f64 {
        self.entries.get(&(e, f)).copied().unwrap_or(1.0)
    }

    /// `max(r(e|f), r(f|e))`.
    pub fn max_ratio(&self, e: Edge, f: Edge) -> f64 {
        self.ratio(e, f).max(self.ratio(f, e))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, Edge, f64)> + '_ {
        self.entries.iter().map(|(&(e, f), &r)| (e, f, r))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Gate durations on the 1 ns grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Durations {
    pub cx: u64,
    pub sq: u64,
    pub measure: u64,
}

/// On-disk device description. See [`DeviceModel::from_spec`] for the
/// validation rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub num_qubits: usize,
    pub edges: Vec<[usize; 2]>,
    pub cx_error: BTreeMap<String, f64>,
    #[serde(default)]
    pub sq_error: BTreeMap<String, f64>,
    #[serde(default)]
    pub t1_us: BTreeMap<String, f64>,
    #[serde(default)]
    pub t2_us: BTreeMap<String, f64>,
    pub durations_ns: DurationsSpec,
    #[serde(default)]
    pub crosstalk: Vec<CrosstalkEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub readout_error: BTreeMap<String, f64>,
    #[serde(default)]
    pub crosstalk_aggregation: Aggregation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationsSpec {
    pub cx: f64,
    pub sq: f64,
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkEntry {
    pub edge: String,
    pub other: String,
    pub ratio: f64,
}

/// Validated, immutable machine description.
///
/// Qubits without a T1 (T2) entry never relax (dephase); missing
/// single-qubit and readout errors are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    name: String,
    num_qubits: usize,
    edges: BTreeSet<Edge>,
    cx_error: BTreeMap<Edge, f64>,
    sq_error: Vec<f64>,
    t1_ns: Vec<f64>,
    t2_ns: Vec<f64>,
    readout_error: Vec<f64>,
    durations: Durations,
    crosstalk: CrosstalkMap,
    aggregation: Aggregation,
}

fn check_prob(what: &str, v: f64) -> Result<(), DeviceError> {
    if (0.0..1.0).contains(&v) {
        Ok(())
    } else {
        Err(DeviceError::Physicality(format!("{what} = {v} is outside [0, 1)")))
    }
}

fn qubit_key(key: &str, n: usize, field: &str) -> Result<usize, DeviceError> {
    let q: usize = key
        .trim()
        .parse()
        .map_err(|_| DeviceError::Schema(format!("{field}: key `{key}` is not a qubit index")))?;
    if q >= n {
        return Err(DeviceError::Schema(format!("{field}: qubit {q} out of range")));
    }
    Ok(q)
}

fn grid_ns(field: &str, v: f64) -> Result<u64, DeviceError> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(DeviceError::Schema(format!(
            "durations_ns.{field} = {v} must be finite and >= 0"
        )));
    }
    Ok(v.ceil() as u64)
}

impl DeviceModel {
    pub fn from_spec(spec: &DeviceSpec) -> Result<Self, DeviceError> {
        let n = spec.num_qubits;
        let mut edges = BTreeSet::new();
        for &[a, b] in &spec.edges {
            if a >= n || b >= n || a == b {
                return Err(DeviceError::Schema(format!(
                    "edges: [{a},{b}] is not a pair of distinct qubits < {n}"
                )));
            }
            if !edges.insert(Edge::new(a, b)) {
                return Err(DeviceError::Schema(format!("edges: {} listed twice", Edge::new(a, b))));
            }
        }
        let mut cx_error = BTreeMap::new();
        for (k, &v) in &spec.cx_error {
            let e: Edge = k.parse()?;
            if !edges.contains(&e) {
                return Err(DeviceError::Schema(format!("cx_error: {e} is not in edges")));
            }
            check_prob(&format!("cx_error[{e}]"), v)?;
            cx_error.insert(e, v);
        }
        if let Some(e) = edges.iter().find(|e| !cx_error.contains_key(e)) {
            return Err(DeviceError::Schema(format!("cx_error: missing entry for edge {e}")));
        }
        let mut sq_error = vec![0.0; n];
        for (k, &v) in &spec.sq_error {
            let q = qubit_key(k, n, "sq_error")?;
            check_prob(&format!("sq_error[{q}]"), v)?;
            sq_error[q] = v;
        }
        let mut readout_error = vec![0.0; n];
        for (k, &v) in &spec.readout_error {
            let q = qubit_key(k, n, "readout_error")?;
            check_prob(&format!("readout_error[{q}]"), v)?;
            readout_error[q] = v;
        }
        let mut t1_ns = vec![f64::INFINITY; n];
        for (k, &v) in &spec.t1_us {
            let q = qubit_key(k, n, "t1_us")?;
            if v.is_nan() || v <= 0.0 {
                return Err(DeviceError::Physicality(format!("t1[{q}] = {v} us must be > 0")));
            }
            t1_ns[q] = v * 1e3;
        }
        let mut t2_ns = vec![f64::INFINITY; n];
        for (k, &v) in &spec.t2_us {
            let q = qubit_key(k, n, "t2_us")?;
            if v.is_nan() || v <= 0.0 {
                return Err(DeviceError::Physicality(format!("t2[{q}] = {v} us must be > 0")));
            }
            t2_ns[q] = v * 1e3;
        }
        for q in 0..n {
            if t2_ns[q] > 2.0 * t1_ns[q] {
                return Err(DeviceError::Physicality(format!(
                    "qubit {q}: t2 = {} us exceeds 2*t1 = {} us",
                    t2_ns[q] / 1e3,
                    2.0 * t1_ns[q] / 1e3
                )));
            }
        }
        let durations = Durations {
            cx: grid_ns("cx", spec.durations_ns.cx)?,
            sq: grid_ns("sq", spec.durations_ns.sq)?,
            measure: grid_ns("measure", spec.durations_ns.measure)?,
        };
        let mut crosstalk = CrosstalkMap::new();
        for entry in &spec.crosstalk {
            let e: Edge = entry.edge.parse()?;
            let f: Edge = entry.other.parse()?;
            for x in [e, f] {
                if !edges.contains(&x) {
                    return Err(DeviceError::Schema(format!("crosstalk: {x} is not in edges")));
                }
            }
            if crosstalk.entries.contains_key(&(e, f)) {
                return Err(DeviceError::Schema(format!("crosstalk: r({e}|{f}) given twice")));
            }
            crosstalk.insert(e, f, entry.ratio)?;
        }
        Ok(DeviceModel {
            name: spec.name.clone(),
            num_qubits: n,
            edges,
            cx_error,
            sq_error,
            t1_ns,
            t2_ns,
            readout_error,
            durations,
            crosstalk,
            aggregation: spec.crosstalk_aggregation,
        })
    }

    /// Back to the on-disk form.
    pub fn to_spec(&self) -> DeviceSpec {
        let per_qubit = |v: &[f64], scale: f64, skip: fn(f64) -> bool| -> BTreeMap<String, f64> {
            v.iter()
                .enumerate()
                .filter(|(_, &x)| !skip(x))
                .map(|(q, &x)| (q.to_string(), x * scale))
                .collect()
        };
        DeviceSpec {
            name: self.name.clone(),
            description: None,
            num_qubits: self.num_qubits,
            edges: self.edges.iter().map(|e| [e.0, e.1]).collect(),
            cx_error: self.cx_error.iter().map(|(e, &v)| (e.to_string(), v)).collect(),
            sq_error: per_qubit(&self.sq_error, 1.0, |x| x == 0.0),
            t1_us: per_qubit(&self.t1_ns, 1e-3, |x| x.is_infinite()),
            t2_us: per_qubit(&self.t2_ns, 1e-3, |x| x.is_infinite()),
            durations_ns: DurationsSpec {
                cx: self.durations.cx as f64,
                sq: self.durations.sq as f64,
                measure: self.durations.measure as f64,
            },
            crosstalk: self
                .crosstalk
                .iter()
                .map(|(e, f, r)| CrosstalkEntry {
                    edge: e.to_string(),
                    other: f.to_string(),
                    ratio: r,
                })
                .collect(),
            readout_error: per_qubit(&self.readout_error, 1.0, |x| x == 0.0),
            crosstalk_aggregation: self.aggregation,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, DeviceError> {
        let spec: DeviceSpec = serde_json::from_str(text).map_err(|e| DeviceError::Schema(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn cx_error(&self, e: Edge) -> Result<f64, DeviceError> {
        self.cx_error.get(&e).copied().ok_or(DeviceError::UnknownEdge(e))
    }

    pub fn sq_error(&self, q: usize) -> f64 {
        self.sq_error[q]
    }

    pub fn readout_error(&self, q: usize) -> f64 {
        self.readout_error[q]
    }

    pub fn t1_ns(&self, q: usize) -> f64 {
        self.t1_ns[q]
    }

    pub fn t2_ns(&self, q: usize) -> f64 {
        self.t2_ns[q]
    }

    pub fn durations(&self) -> Durations {
        self.durations
    }

    pub fn crosstalk(&self) -> &CrosstalkMap {
        &self.crosstalk
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    /// All ordered pairs `(e, f)` of disjoint coupling edges.
    pub fn disjoint_edge_pairs(&self) -> Vec<(Edge, Edge)> {
        let mut out = Vec::new();
        for &e in &self.edges {
            for &f in &self.edges {
                if !e.shares_qubit(&f) {
                    out.push((e, f));
                }
            }
        }
        out
    }

    /// Depolarizing parameter of a CX on `e` while CXs run on `concurrent`.
    pub fn effective_cx_error(&self, e: Edge, concurrent: &[Edge]) -> Result<f64, DeviceError> {
        let eps = self.cx_error(e)?;
        if let Some(f) = concurrent.iter().find(|f| f.shares_qubit(&e)) {
            return Err(DeviceError::SharedQubit(e, *f));
        }
        if concurrent.is_empty() {
            return Ok(eps);
        }
        let ratios = concurrent.iter().map(|&f| self.crosstalk.ratio(e, f));
        let factor = match self.aggregation {
            Aggregation::Max => ratios.fold(f64::NEG_INFINITY, f64::max),
            Aggregation::ProductCapped => ratios.product(),
        };
        Ok((eps * factor).min(EPS_MAX))
    }

    /// Same device with a different crosstalk map.
    pub fn with_crosstalk(&self, crosstalk: CrosstalkMap) -> Self {
        DeviceModel {
            crosstalk,
            ..self.clone()
        }
    }

    pub fn with_aggregation(&self, aggregation: Aggregation) -> Self {
        DeviceModel {
            aggregation,
            ..self.clone()
        }
    }

    /// Same device with every crosstalk ratio equal to 1.
    pub fn without_crosstalk(&self) -> Self {
        self.with_crosstalk(CrosstalkMap::new())
    }

    /// Same coupling graph and timings with all error sources removed.
    pub fn noiseless(&self) -> Self {
        DeviceModel {
            cx_error: self.cx_error.keys().map(|&e| (e, 0.0)).collect(),
            sq_error: vec![0.0; self.num_qubits],
            t1_ns: vec![f64::INFINITY; self.num_qubits],
            t2_ns: vec![f64::INFINITY; self.num_qubits],
            readout_error: vec![0.0; self.num_qubits],
            ..self.clone()
        }
    }

    /// Induced sub-device on `qubits`, with `qubits[i]` relabelled to `i`.
    pub fn restrict(&self, qubits: &[usize]) -> Result<Self, DeviceError> {
        let mut index = BTreeMap::new();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits || index.insert(q, i).is_some() {
                return Err(DeviceError::Schema(format!("restrict: invalid or repeated qubit {q}")));
            }
        }
        let map_edge = |e: Edge| -> Option<Edge> { Some(Edge::new(*index.get(&e.0)?, *index.get(&e.1)?)) };
        let mut crosstalk = CrosstalkMap::new();
        for (e, f, r) in self.crosstalk.iter() {
            if let (Some(e2), Some(f2)) = (map_edge(e), map_edge(f)) {
                crosstalk.insert(e2, f2, r)?;
            }
        }
        let pick = |v: &[f64]| qubits.iter().map(|&q| v[q]).collect::<Vec<_>>();
        Ok(DeviceModel {
            name: self.name.clone(),
            num_qubits: qubits.len(),
            edges: self.edges.iter().filter_map(|&e| map_edge(e)).collect(),
            cx_error: self
                .cx_error
                .iter()
                .filter_map(|(&e, &v)| Some((map_edge(e)?, v)))
                .collect(),
            sq_error: pick(&self.sq_error),
            t1_ns: pick(&self.t1_ns),
            t2_ns: pick(&self.t2_ns),
            readout_error: pick(&self.readout_error),
            durations: self.durations,
            crosstalk,
            aggregation: self.aggregation,
        })
    }
}

/// Reads and validates a device JSON file.
pub fn load_device(path: impl AsRef<Path>) -> Result<DeviceModel, DeviceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DeviceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    DeviceModel::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line4(ratio: Option<f64>) -> DeviceModel {
        let crosstalk = ratio
            .map(|r| format!(r#"[{{"edge": "0-1", "other": "2-3", "ratio": {r}}}]"#))
            .unwrap_or_else(|| "[]".into());
        DeviceModel::from_json(&format!(
            r#"{{
                "num_qubits": 4,
                "edges": [[0,1],[1,2],[2,3]],
                "cx_error": {{"0-1": 0.01, "1-2": 0.02, "2-3": 0.10}},
                "t1_us": {{"0": 100}}, "t2_us": {{"0": 150}},
                "durations_ns": {{"cx": 300.2, "sq": 35, "measure": 4000}},
                "crosstalk": {crosstalk}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn effective_error_examples() {
        let d = line4(Some(3.0));
        let (e, f) = (Edge::new(0, 1), Edge::new(2, 3));
        assert_eq!(d.effective_cx_error(e, &[]).unwrap(), 0.01);
        assert!((d.effective_cx_error(e, &[f]).unwrap() - 0.03).abs() < 1e-15);
        // reverse direction not declared
        assert_eq!(d.effective_cx_error(f, &[e]).unwrap(), 0.10);

        let strong = line4(None).with_crosstalk({
            let mut m = CrosstalkMap::new();
            m.insert(f, e, 11.0).unwrap();
            m
        });
        assert_eq!(strong.effective_cx_error(f, &[e]).unwrap(), EPS_MAX);
    }

    #[test]
    fn effective_error_rejects_bad_edges() {
        let d = line4(None);
        assert!(matches!(
            d.effective_cx_error(Edge::new(0, 2), &[]),
            Err(DeviceError::UnknownEdge(_))
        ));
        assert!(matches!(
            d.effective_cx_error(Edge::new(0, 1), &[Edge::new(1, 2)]),
            Err(DeviceError::SharedQubit(..))
        ));
    }

    #[test]
    fn defaults_and_grid() {
        let d = line4(None);
        assert!(d.crosstalk().is_empty());
        assert_eq!(d.crosstalk().ratio(Edge::new(0, 1), Edge::new(2, 3)), 1.0);
        assert_eq!(d.durations().cx, 301);
        assert!(d.t1_ns(1).is_infinite());
        assert_eq!(d.t1_ns(0), 100_000.0);
        assert_eq!(d.sq_error(2), 0.0);
    }

    #[test]
    fn physicality_violations() {
        let base = line4(None).to_spec();
        let mut s = base.clone();
        s.t1_us.insert("1".into(), 50.0);
        s.t2_us.insert("1".into(), 150.0);
        assert!(matches!(DeviceModel::from_spec(&s), Err(DeviceError::Physicality(_))));
        let mut s = base.clone();
        s.cx_error.insert("0-1".into(), 1.0);
        assert!(matches!(DeviceModel::from_spec(&s), Err(DeviceError::Physicality(_))));
        let mut s = base.clone();
        s.crosstalk.push(CrosstalkEntry {
            edge: "0-1".into(),
            other: "1-2".into(),
            ratio: 2.0,
        });
        assert!(matches!(DeviceModel::from_spec(&s), Err(DeviceError::SharedQubit(..))));
        let mut s = base;
        s.cx_error.remove("2-3");
        assert!(matches!(DeviceModel::from_spec(&s), Err(DeviceError::Schema(_))));
    }

    #[test]
    fn schema_violation_names_field() {
        let err =
            DeviceModel::from_json(r#"{"num_qubits": 2, "edges": [[0,1]], "cx_error": {"0-1": 0.01}}"#).unwrap_err();
        assert!(err.to_string().contains("durations_ns"), "{err}");
        let err = DeviceModel::from_json(
            r#"{"num_qubits": 2, "edges": [[0,1]], "cx_error": {"0-1": 0.01}, "durations_ns": {"cx":1,"sq":1,"measure":1}, "bogus": 1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn spec_round_trip_and_restrict() {
        let d = line4(Some(3.0));
        assert_eq!(DeviceModel::from_spec(&d.to_spec()).unwrap(), d);
        let sub = d.restrict(&[2, 3, 0, 1]).unwrap();
        assert_eq!(sub.num_qubits(), 4);
        assert_eq!(sub.cx_error(Edge::new(0, 1)).unwrap(), 0.10);
        assert_eq!(sub.crosstalk().ratio(Edge::new(2, 3), Edge::new(0, 1)), 3.0);
        assert_eq!(sub.t1_ns(2), 100_000.0);
        let pair = d.restrict(&[0, 1]).unwrap();
        assert!(pair.crosstalk().is_empty());
        assert_eq!(pair.edges().count(), 1);
    }

    #[test]
    fn load_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.json");
        std::fs::write(&p, serde_json::to_string(&line4(Some(2.0)).to_spec()).unwrap()).unwrap();
        assert_eq!(load_device(&p).unwrap(), load_device(&p).unwrap());
        assert!(matches!(
            load_device(dir.path().join("missing.json")),
            Err(DeviceError::Io { .. })
        ));
    }

    fn star() -> (DeviceModel, Vec<Edge>) {
        // hub edge 0-1 surrounded by disjoint edges
        let spec = DeviceSpec {
            name: "star".into(),
            description: None,
            num_qubits: 8,
            edges: vec![[0, 1], [2, 3], [4, 5], [6, 7]],
            cx_error: [("0-1", 0.02), ("2-3", 0.01), ("4-5", 0.01), ("6-7", 0.01)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            sq_error: BTreeMap::new(),
            t1_us: BTreeMap::new(),
            t2_us: BTreeMap::new(),
            durations_ns: DurationsSpec {
                cx: 300.0,
                sq: 35.0,
                measure: 1000.0,
            },
            crosstalk: vec![],
            readout_error: BTreeMap::new(),
            crosstalk_aggregation: Aggregation::Max,
        };
        let d = DeviceModel::from_spec(&spec).unwrap();
        let others = vec![Edge::new(2, 3), Edge::new(4, 5), Edge::new(6, 7)];
        (d, others)
    }

    proptest! {
        #[test]
        fn adding_a_partner_never_lowers_error(
            ratios in proptest::collection::vec(1.0f64..12.0, 3),
            order in Just(vec![0usize, 1, 2]).prop_shuffle(),
            product in any::<bool>(),
        ) {
            let (d, others) = star();
            let hub = Edge::new(0, 1);
            let mut m = CrosstalkMap::new();
            for (f, r) in others.iter().zip(&ratios) {
                m.insert(hub, *f, *r).unwrap();
            }
            let agg = if product { Aggregation::ProductCapped } else { Aggregation::Max };
            let d = d.with_crosstalk(m).with_aggregation(agg);
            let mut set = Vec::new();
            let mut prev = d.effective_cx_error(hub, &set).unwrap();
            for &i in &order {
                set.push(others[i]);
                let next = d.effective_cx_error(hub, &set).unwrap();
                prop_assert!(next >= prev);
                prop_assert!(next <= EPS_MAX);
                prev = next;
            }
        }

        #[test]
        fn unit_ratios_leave_error_unchanged(mask in 0u8..8, product in any::<bool>()) {
            let (d, others) = star();
            let agg = if product { Aggregation::ProductCapped } else { Aggregation::Max };
            let d = d.with_aggregation(agg);
            let set: Vec<Edge> = others.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, e)| *e).collect();
            for e in d.edges().collect::<Vec<_>>() {
                let concurrent: Vec<Edge> = set.iter().copied().filter(|f| !f.shares_qubit(&e)).collect();
                prop_assert_eq!(d.effective_cx_error(e, &concurrent).unwrap(), d.cx_error(e).unwrap());
            }
        }
    }
}
