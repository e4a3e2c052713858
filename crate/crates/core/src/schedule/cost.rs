use serde::Serialize;

use super::ScheduledCircuit;
use crate::circuit::GateKind;
use crate::device::{DeviceModel, Edge};

/// Two simultaneous CX gates on disjoint edges whose crosstalk ratio, in the
/// worse direction, reaches the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConflictPair {
    pub gate_a: usize,
    pub gate_b: usize,
    pub edges: (Edge, Edge),
    pub ratio: f64,
}

/// Weighted sum of a crosstalk term and a decoherence term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleCost {
    /// `sum over CX of -ln(1 - eps_eff)`.
    pub crosstalk_term: f64,
    /// `sum over active qubits of idle / min(T1, T2)`.
    pub decoherence_term: f64,
    pub omega: f64,
    pub total: f64,
}

fn cx_edge(sc: &ScheduledCircuit, i: usize) -> Option<Edge> {
    let g = &sc.circuit().gates()[i];
    g.is_cx().then(|| Edge::new(g.qubits[0], g.qubits[1]))
}

/// All overlapping CX pairs with `max(r(e|f), r(f|e)) >= threshold`, ordered by
/// gate indices.
pub fn find_conflicts(sc: &ScheduledCircuit, d: &DeviceModel, threshold: f64) -> Vec<ConflictPair> {
    let n = sc.circuit().len();
    let mut out = Vec::new();
    for a in 0..n {
        let Some(e) = cx_edge(sc, a) else { continue };
        for b in a + 1..n {
            let Some(f) = cx_edge(sc, b) else { continue };
            if e.shares_qubit(&f) || !sc.overlaps(a, b) {
                continue;
            }
            let ratio = d.crosstalk().max_ratio(e, f);
            if ratio >= threshold {
                out.push(ConflictPair {
                    gate_a: a,
                    gate_b: b,
                    edges: (e, f),
                    ratio,
                });
            }
        }
    }
    out
}

/// Evaluates the scheduling objective for `sc`.
///
/// Idle time of a qubit is measured up to the end of the last non-measurement
/// gate; qubits touched by no gate are ignored.
pub fn schedule_cost(sc: &ScheduledCircuit, d: &DeviceModel, omega: f64) -> ScheduleCost {
    let gates = sc.circuit().gates();
    let mut crosstalk_term = 0.0;
    for i in 0..gates.len() {
        if let Some(e) = cx_edge(sc, i) {
            let eps = d
                .effective_cx_error(e, &sc.concurrent_cx_edges(i))
                .expect("schedule validated against device");
            crosstalk_term += -(1.0 - eps).ln();
        }
    }
    let counted = |i: usize| !matches!(gates[i].kind, GateKind::Measure | GateKind::Barrier);
    let horizon = (0..gates.len())
        .filter(|&i| counted(i))
        .map(|i| sc.end(i))
        .max()
        .unwrap_or(0);
    let mut busy = vec![0u64; sc.circuit().num_qubits()];
    let mut active = vec![false; busy.len()];
    for (i, g) in gates.iter().enumerate() {
        if counted(i) {
            for &q in &g.qubits {
                busy[q] += sc.duration(i);
                active[q] = true;
            }
        }
    }
    let mut decoherence_term = 0.0;
    for q in (0..busy.len()).filter(|&q| active[q]) {
        let t = d.t1_ns(q).min(d.t2_ns(q));
        if t.is_finite() {
            decoherence_term += horizon.saturating_sub(busy[q]) as f64 / t;
        }
    }
    ScheduleCost {
        crosstalk_term,
        decoherence_term,
        omega,
        total: omega * crosstalk_term + (1.0 - omega) * decoherence_term,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_dag;
    use crate::circuit::{parse_qasm, Circuit, Gate};
    use crate::device::CrosstalkMap;
    use crate::schedule::{asap, par_sched};

    fn device(ratio: f64) -> DeviceModel {
        let d = DeviceModel::from_json(
            r#"{"num_qubits": 4, "edges": [[0,1],[1,2],[2,3]],
                "cx_error": {"0-1": 0.01, "1-2": 0.02, "2-3": 0.01},
                "t1_us": {"0": 100, "1": 100, "2": 100, "3": 100},
                "t2_us": {"0": 80, "1": 80, "2": 80, "3": 80},
                "durations_ns": {"cx": 300, "sq": 40, "measure": 1000}}"#,
        )
        .unwrap();
        let mut m = CrosstalkMap::new();
        m.insert(Edge::new(0, 1), Edge::new(2, 3), ratio).unwrap();
        d.with_crosstalk(m)
    }

    fn pair() -> Circuit {
        parse_qasm("OPENQASM 2.0; qreg q[4]; cx q[0],q[1]; cx q[2],q[3];").unwrap()
    }

    #[test]
    fn conflicts_respect_threshold() {
        let sc = par_sched(&pair(), &device(3.0)).unwrap();
        let c = find_conflicts(&sc, &device(3.0), 2.0);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].gate_a, c[0].gate_b, c[0].ratio), (0, 1, 3.0));
        assert!(find_conflicts(&sc, &device(3.0), 4.0).is_empty());
        assert!(find_conflicts(&sc, &device(1.0), 2.0).is_empty());
    }

    #[test]
    fn noiseless_cost_is_zero() {
        let d = device(3.0).noiseless();
        let sc = par_sched(&pair(), &d).unwrap();
        assert_eq!(schedule_cost(&sc, &d, 1.0).total, 0.0);
        assert_eq!(schedule_cost(&sc, &d, 0.0).total, 0.0);
    }

    #[test]
    fn serial_schedule_has_independent_crosstalk_term() {
        let d = device(3.0);
        let c = pair();
        let sc = asap(&c, &d, &build_dag(&c).with_edges(&[(0, 1)]).unwrap(), vec![(0, 1)]);
        let cost = schedule_cost(&sc, &d, 0.5);
        let want = -(0.99f64).ln() * 2.0;
        assert!((cost.crosstalk_term - want).abs() < 1e-15);
        // each of the four qubits idles for one CX duration
        assert!((cost.decoherence_term - 4.0 * 300.0 / 80_000.0).abs() < 1e-15);

        let par = schedule_cost(&par_sched(&c, &d).unwrap(), &d, 0.5);
        assert!(par.crosstalk_term > cost.crosstalk_term);
        assert!(par.decoherence_term < cost.decoherence_term);
        assert!((par.crosstalk_term - (-(0.97f64).ln() - (0.99f64).ln())).abs() < 1e-15);
    }

    #[test]
    fn measurement_does_not_count_as_idle() {
        let d = device(1.0);
        let c = Circuit::from_gates(2, 1, [Gate::cx(0, 1), Gate::measure(0, 0)]).unwrap();
        let cost = schedule_cost(&par_sched(&c, &d).unwrap(), &d, 0.0);
        assert_eq!(cost.decoherence_term, 0.0);
    }
}
