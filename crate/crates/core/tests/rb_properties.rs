//! Randomized benchmarking checks: noiseless exactness, the depolarizing
//! decay law, fit recovery and a crosstalk-free characterization.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xtalk_core::device::{DeviceModel, Edge};
use xtalk_core::rb::{
    channel_rb, characterize_device, epc_from_alpha, fit_decay, generate_rb_sequence, generate_srb_pair, RBConfig,
    RbError, SrbPairing,
};
use xtalk_core::sim::{depolarizing_channel, run_ideal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn noiseless_sequences_return_to_zero(m in 1usize..=150, seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, expected) = generate_rb_sequence(m, n, &mut rng).unwrap();
        prop_assert_eq!(&expected, &"0".repeat(n));
        let p = run_ideal(&c).unwrap().probability(&expected);
        prop_assert!((p - 1.0).abs() < 1e-9, "m = {}: survival {}", m, p);
    }

    #[test]
    fn noiseless_srb_pairs_return_to_zero(m in 1usize..=60, seed in any::<u64>(), matched in any::<bool>()) {
        let pairing = if matched { SrbPairing::ClassMatched } else { SrbPairing::Independent };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let srb = generate_srb_pair(m, Edge::new(0, 1), Edge::new(2, 3), pairing, &mut rng).unwrap();
        let p = run_ideal(&srb.circuit).unwrap().probability("0000");
        prop_assert!((p - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn fit_recovers_noise_free_decays(a in 0.2f64..0.8, b in 0.05f64..0.2, alpha in 0.8f64..0.999) {
        let lengths = [1usize, 5, 10, 20, 50, 100, 150];
        let data: BTreeMap<usize, f64> = lengths.iter().map(|&m| (m, a * alpha.powi(m as i32) + b)).collect();
        let fit = fit_decay(&data).unwrap();
        prop_assert!((fit.alpha - alpha).abs() < 1e-6, "{} vs {}", fit.alpha, alpha);
        prop_assert!((fit.a - a).abs() < 1e-4 && (fit.b - b).abs() < 1e-4);
    }
}

#[test]
fn depolarizing_channel_rb() {
    let p = 0.02;
    let ch = depolarizing_channel(2, p).unwrap();
    let r = channel_rb(&ch, &RBConfig::default()).unwrap();
    // Depolarizing commutes with every Clifford, so each sequence of m
    // Cliffords plus the inverse survives with 1/4 + 3/4 (1 - p)^(m + 1).
    for (&m, v) in &r.per_seed {
        let expected = 0.25 + 0.75 * (1.0 - p).powi(m as i32 + 1);
        for s in v {
            assert!((s - expected).abs() < 1e-10, "m = {m}: {s} vs {expected}");
        }
    }
    assert!((0.978..=0.982).contains(&r.fit_alpha), "alpha {}", r.fit_alpha);
    assert!((r.epc - 0.015).abs() <= 0.05 * 0.015, "epc {}", r.epc);
    assert!((r.epc - 0.75 * (1.0 - r.fit_alpha)).abs() < 1e-15);
}

#[test]
fn epc_formula() {
    assert!((epc_from_alpha(0.98, 1) - 0.01).abs() < 1e-15);
    assert!((epc_from_alpha(0.98, 2) - 0.015).abs() < 1e-15);
    assert_eq!(epc_from_alpha(1.0, 2), 0.0);
}

#[test]
fn crosstalk_free_device_has_unit_ratios() {
    let d = DeviceModel::from_json(
        r#"{"name": "line4", "num_qubits": 4, "edges": [[0,1],[1,2],[2,3]],
            "cx_error": {"0-1": 0.01, "1-2": 0.02, "2-3": 0.015},
            "sq_error": {"0": 0.0003, "1": 0.0003, "2": 0.0003, "3": 0.0003},
            "t1_us": {"0": 100, "1": 100, "2": 100, "3": 100},
            "t2_us": {"0": 90, "1": 90, "2": 90, "3": 90},
            "durations_ns": {"cx": 300, "sq": 36, "measure": 1000}}"#,
    )
    .unwrap();
    let cfg = RBConfig {
        lengths: vec![1, 10, 30, 60, 100],
        num_seeds: 2,
        seed: 9,
        ..RBConfig::default()
    };
    let report = characterize_device(&d, &cfg).unwrap();
    assert_eq!(report.cells.len(), 2);
    for cell in &report.cells {
        assert!(
            (0.9..=1.1).contains(&cell.ratio),
            "{}|{}: {}",
            cell.edge,
            cell.other,
            cell.ratio
        );
    }
}

#[test]
fn srb_rejects_overlapping_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let err = generate_srb_pair(3, Edge::new(0, 1), Edge::new(1, 2), SrbPairing::ClassMatched, &mut rng).unwrap_err();
    assert!(matches!(err, RbError::SharedQubit(..)));
}
