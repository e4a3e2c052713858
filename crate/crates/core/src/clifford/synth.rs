use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use super::{CliffordError, CliffordTableau};
use crate::circuit::{Gate, GateKind};

const WORD_ALPHABET: [GateKind; 6] = [
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::SX,
    GateKind::X,
    GateKind::Z,
];

/// Breadth-first closure of `{H, S, CX}` generators starting from the
/// identity. Brute force, intended for `n <= 2`.
pub fn enumerate_group(n: usize) -> Vec<CliffordTableau> {
    let mut gens = Vec::new();
    for q in 0..n {
        gens.push(Gate::single(GateKind::H, q));
        gens.push(Gate::single(GateKind::S, q));
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                gens.push(Gate::cx(a, b));
            }
        }
    }
    let start = CliffordTableau::identity(n);
    let mut seen: HashMap<CliffordTableau, ()> = HashMap::from([(start.clone(), ())]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for g in &gens {
            let mut next = t.clone();
            next.apply_gate(g);
            if seen.insert(next.clone(), ()).is_none() {
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    order
}

/// Shortest words over [`WORD_ALPHABET`] for all 24 single-qubit Cliffords,
/// identity first.
struct OneQubitTable {
    words: Vec<Vec<GateKind>>,
    index: HashMap<CliffordTableau, usize>,
}

fn one_qubit_table() -> &'static OneQubitTable {
    static TABLE: OnceLock<OneQubitTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let start = CliffordTableau::identity(1);
        let mut index = HashMap::from([(start.clone(), 0usize)]);
        let mut words: Vec<Vec<GateKind>> = vec![Vec::new()];
        let mut elems = vec![start];
        let mut head = 0;
        while head < elems.len() {
            for &k in &WORD_ALPHABET {
                let mut next = elems[head].clone();
                next.apply_gate(&Gate::single(k, 0));
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elems.len());
                    let mut w = words[head].clone();
                    w.push(k);
                    words.push(w);
                    elems.push(next);
                }
            }
            head += 1;
        }
        OneQubitTable { words, index }
    })
}

/// A Clifford written as `pre`, then an entangling `core` of CX gates, then
/// `post`. `pre` and `post` contain single-qubit gates only.
#[derive(Debug, Clone, PartialEq)]
pub struct Canonical {
    pub pre: Vec<Gate>,
    pub core: Vec<Gate>,
    pub post: Vec<Gate>,
}

impl Canonical {
    pub fn cx_count(&self) -> usize {
        self.core.len()
    }

    pub fn gates(&self) -> Vec<Gate> {
        self.pre.iter().chain(&self.core).chain(&self.post).cloned().collect()
    }
}

fn cores() -> [Vec<Gate>; 4] {
    [
        vec![],
        vec![Gate::cx(0, 1)],
        vec![Gate::cx(0, 1), Gate::cx(1, 0)],
        vec![Gate::cx(0, 1), Gate::cx(1, 0), Gate::cx(0, 1)],
    ]
}

fn local_gates(i: usize) -> Vec<Gate> {
    let t = one_qubit_table();
    let (a, b) = (i / 24, i % 24);
    let on = |w: &[GateKind], q: usize| w.iter().map(move |&k| Gate::single(k, q)).collect::<Vec<_>>();
    let mut v = on(&t.words[a], 0);
    v.extend(on(&t.words[b], 1));
    v
}

/// `(pre, core, post)` indices for every two-qubit Clifford, preferring the
/// fewest CX gates.
fn two_qubit_table() -> &'static HashMap<CliffordTableau, (u16, u8, u16)> {
    static TABLE: OnceLock<HashMap<CliffordTableau, (u16, u8, u16)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let locals: Vec<CliffordTableau> = (0..576)
            .map(|i| CliffordTableau::from_gates(2, &local_gates(i)).expect("Clifford words"))
            .collect();
        let mut table = HashMap::with_capacity(11520);
        for (w, core) in cores().iter().enumerate() {
            let core_t = CliffordTableau::from_gates(2, core).expect("CX is Clifford");
            // With no core, pre * post is again local.
            let posts = if w == 0 { 1 } else { 576 };
            for (i, pre) in locals.iter().enumerate() {
                let mid = pre.compose(&core_t).expect("same size");
                for (j, post) in locals.iter().enumerate().take(posts) {
                    let full = mid.compose(post).expect("same size");
                    table.entry(full).or_insert((i as u16, w as u8, j as u16));
                }
            }
        }
        table
    })
}

impl CliffordTableau {
    /// Canonical gate form for one or two qubits.
    pub fn decompose_canonical(&self) -> Result<Canonical, CliffordError> {
        match self.n {
            1 => {
                let t = one_qubit_table();
                let i = t.index[self];
                Ok(Canonical {
                    pre: t.words[i].iter().map(|&k| Gate::single(k, 0)).collect(),
                    core: Vec::new(),
                    post: Vec::new(),
                })
            }
            2 => {
                let &(i, w, j) = two_qubit_table().get(self).expect("table covers the group");
                Ok(Canonical {
                    pre: local_gates(i as usize),
                    core: cores()[w as usize].clone(),
                    post: local_gates(j as usize),
                })
            }
            n => Err(CliffordError::Unsupported(n)),
        }
    }

    /// Gates over `{H, S, Sdg, SX, X, Z, CX}` implementing this element up to
    /// global phase. The identity maps to an empty list.
    pub fn tableau_to_gates(&self) -> Result<Vec<Gate>, CliffordError> {
        Ok(self.decompose_canonical()?.gates())
    }

    /// Minimal number of CX gates needed (0 to 3 for two qubits).
    pub fn cx_class(&self) -> Result<usize, CliffordError> {
        Ok(self.decompose_canonical()?.cx_count())
    }
}
