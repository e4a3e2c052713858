use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::Circuit;

/// Dependency graph over gate indices of a [`Circuit`].
///
/// Edge `a -> b` means gate `a` must finish before gate `b` starts. Gates
/// sharing a qubit are chained in program order; a barrier is an ordinary
/// node on all of its qubits, so it fences everything before it from
/// everything after it on those qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitDag {
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

/// Builds the dependency DAG of `c`.
pub fn build_dag(c: &Circuit) -> CircuitDag {
    let n = c.len();
    let mut dag = CircuitDag {
        preds: vec![Vec::new(); n],
        succs: vec![Vec::new(); n],
    };
    let mut last: Vec<Option<usize>> = vec![None; c.num_qubits()];
    for (i, g) in c.gates().iter().enumerate() {
        for &q in &g.qubits {
            if let Some(j) = last[q] {
                dag.insert(j, i);
            }
            last[q] = Some(i);
        }
    }
    dag
}

impl CircuitDag {
    fn insert(&mut self, a: usize, b: usize) -> bool {
        if self.succs[a].contains(&b) {
            return false;
        }
        self.succs[a].push(b);
        self.preds[b].push(a);
        true
    }

    pub fn num_nodes(&self) -> usize {
        self.preds.len()
    }

    pub fn preds(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    pub fn succs(&self, i: usize) -> &[usize] {
        &self.succs[i]
    }

    /// All edges in `(from, to)` order, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self
            .succs
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
            .collect();
        set.into_iter().collect()
    }

    /// Copy with additional precedence edges. Returns `None` if the result
    /// would contain a cycle.
    pub fn with_edges(&self, extra: &[(usize, usize)]) -> Option<CircuitDag> {
        let mut d = self.clone();
        for &(a, b) in extra {
            if a == b {
                return None;
            }
            d.insert(a, b);
        }
        d.topological_order().map(|_| d)
    }

    /// Kahn's algorithm, always taking the lowest ready index. `None` on a
    /// cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.num_nodes();
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &s in &self.succs[i] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.push(Reverse(s));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Whether a directed path leads from `a` to `b`.
    pub fn has_path(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.num_nodes()];
        let mut stack = vec![a];
        while let Some(i) = stack.pop() {
            if i == b {
                return true;
            }
            for &s in &self.succs[i] {
                if !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
        false
    }

    /// Longest path length where each node contributes `weight(node)`.
    pub fn longest_path(&self, weight: impl Fn(usize) -> u64) -> u64 {
        let order = self.topological_order().expect("dag is acyclic");
        let mut finish = vec![0u64; self.num_nodes()];
        let mut best = 0;
        for i in order {
            let start = self.preds[i].iter().map(|&p| finish[p]).max().unwrap_or(0);
            finish[i] = start + weight(i);
            best = best.max(finish[i]);
        }
        best
    }
}
