//! Property tests for the circuit IR: QASM round trips, DAG order and
//! semantic preservation of macro lowering.

use proptest::prelude::*;
use xtalk_core::circuit::{build_dag, decompose_to_native, emit_qasm, parse_qasm, Circuit, Gate, GateKind, MacroKind};
use xtalk_core::sim::circuit_unitary;

fn kind_strategy() -> impl Strategy<Value = GateKind> {
    prop_oneof![
        Just(GateKind::I),
        Just(GateKind::X),
        Just(GateKind::Y),
        Just(GateKind::Z),
        Just(GateKind::H),
        Just(GateKind::S),
        Just(GateKind::Sdg),
        Just(GateKind::T),
        Just(GateKind::Tdg),
        Just(GateKind::SX),
        (-10.0f64..10.0).prop_map(GateKind::RZ),
        Just(GateKind::CX),
        Just(GateKind::SWAP),
        Just(GateKind::CCX),
        Just(GateKind::CSWAP),
        Just(GateKind::Barrier),
    ]
}

/// Random circuit on `n` qubits; operands are a prefix of a shuffled
/// register so they never repeat.
fn circuit_strategy(n: usize, max_len: usize, with_measure: bool) -> impl Strategy<Value = Circuit> {
    let gate = (kind_strategy(), Just((0..n).collect::<Vec<_>>()).prop_shuffle(), 1..=n).prop_filter_map(
        "arity exceeds register",
        move |(k, qs, width)| {
            let a = k.arity().unwrap_or(width);
            (a <= n).then(|| Gate::new(k, qs[..a].to_vec()))
        },
    );
    (prop::collection::vec(gate, 0..max_len), any::<bool>()).prop_map(move |(gates, measure)| {
        let mut c = Circuit::new(n, if with_measure { n } else { 0 });
        for g in gates {
            c.push(g).unwrap();
        }
        if with_measure && measure {
            for q in 0..n {
                c.push(Gate::measure(q, n - 1 - q)).unwrap();
            }
        }
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn qasm_round_trip(c in (1usize..=5).prop_flat_map(|n| circuit_strategy(n, 30, true))) {
        let text = emit_qasm(&c);
        let back = parse_qasm(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(emit_qasm(&back), text);
    }

    #[test]
    fn topological_order_preserves_per_qubit_order(c in (1usize..=5).prop_flat_map(|n| circuit_strategy(n, 40, true))) {
        let order = build_dag(&c).topological_order().unwrap();
        for q in 0..c.num_qubits() {
            let projected: Vec<usize> = order.iter().copied().filter(|&i| c.gates()[i].qubits.contains(&q)).collect();
            let source: Vec<usize> = (0..c.len()).filter(|&i| c.gates()[i].qubits.contains(&q)).collect();
            prop_assert_eq!(projected, source);
        }
    }

    #[test]
    fn lowering_preserves_unitary(c in (3usize..=4).prop_flat_map(|n| circuit_strategy(n, 12, false))) {
        let lowered = decompose_to_native(&c, &MacroKind::ALL.into()).unwrap();
        prop_assert!(lowered.is_native());
        let a = circuit_unitary(&c).unwrap();
        let b = circuit_unitary(&lowered).unwrap();
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-9, "max elementwise deviation {}", worst);
    }
}

#[test]
fn cswap_lowering_matches_dense_matrix() {
    for ops in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
        let c = Circuit::from_gates(3, 0, [Gate::new(GateKind::CSWAP, ops.to_vec())]).unwrap();
        let lowered = decompose_to_native(&c, &MacroKind::ALL.into()).unwrap();
        let a = circuit_unitary(&c).unwrap();
        let b = circuit_unitary(&lowered).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn injection_shape_dag() {
    let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[5];\ncreg c[3];\n\
               x q[0]; x q[2];\nbarrier q[0],q[1],q[2],q[3],q[4];\ncswap q[0],q[1],q[2];\ncx q[3],q[4];\n\
               barrier q[0],q[1],q[2],q[3],q[4];\nmeasure q[0] -> c[0];\nmeasure q[1] -> c[1];\nmeasure q[2] -> c[2];\n";
    let c = parse_qasm(src).unwrap();
    assert_eq!(c.num_qubits(), 5);
    assert_eq!(c.gates()[4], Gate::cx(3, 4));
    assert_eq!(c.gates()[2].kind, GateKind::Barrier);
    assert_eq!(c.gates()[5].kind, GateKind::Barrier);
    let d = build_dag(&c);
    assert!(d.has_path(2, 4) && d.has_path(4, 5));
    assert!(!d.has_path(3, 4) && !d.has_path(4, 3));
}
