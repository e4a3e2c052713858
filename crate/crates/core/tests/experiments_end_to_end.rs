//! End-to-end runs of the experiment drivers on the bundled devices and
//! benchmarks.

use xtalk_core::experiments::{
    bundled_device, bundled_suite, compact, map_to_device, run_compare, run_injection, CompareOptions,
};
use xtalk_core::schedule::{find_conflicts, par_sched, schedule_cost, xtalk_sched};
use xtalk_core::sim::run_ideal;

#[test]
fn scheduling_preserves_noiseless_outputs() {
    let d = bundled_device("casablanca-like").unwrap();
    for b in bundled_suite() {
        let reference = run_ideal(&b.circuit).unwrap();
        let (small, qubits) = compact(&map_to_device(&b.circuit, &d, &b.name).unwrap()).unwrap();
        let sub = d.restrict(&qubits).unwrap();
        for omega in [0.0, 0.5, 1.0] {
            for sc in [
                par_sched(&small, &sub).unwrap(),
                xtalk_sched(&small, &sub, omega, 2.0).unwrap(),
            ] {
                let out = run_ideal(sc.circuit()).unwrap();
                assert!(out.max_abs_diff(&reference) < 1e-9, "{} at omega {omega}", b.name);
            }
        }
    }
}

#[test]
fn omega_extremes_on_the_suite() {
    let d = bundled_device("casablanca-like").unwrap();
    for b in bundled_suite() {
        let (small, qubits) = compact(&map_to_device(&b.circuit, &d, &b.name).unwrap()).unwrap();
        let sub = d.restrict(&qubits).unwrap();
        assert_eq!(
            xtalk_sched(&small, &sub, 0.0, 2.0).unwrap(),
            par_sched(&small, &sub).unwrap()
        );
        assert!(find_conflicts(&xtalk_sched(&small, &sub, 1.0, 2.0).unwrap(), &sub, 2.0).is_empty());
    }
}

#[test]
fn raising_omega_trades_depth_for_crosstalk() {
    let d = bundled_device("casablanca-like").unwrap();
    let run = |omega| {
        run_compare(
            &d,
            &bundled_suite(),
            &CompareOptions {
                omega,
                ..CompareOptions::default()
            },
        )
        .unwrap()
    };
    let sweep = [run(0.0), run(0.5), run(1.0)];
    for l in &sweep[0] {
        assert_eq!((l.depth_par, l.fidelity_par), (l.depth_xtalk, l.fidelity_xtalk));
    }
    for w in sweep.windows(2) {
        for (l, h) in w[0].iter().zip(&w[1]) {
            assert_eq!(l.benchmark, h.benchmark);
            assert!(h.depth_xtalk >= l.depth_xtalk, "{}", l.benchmark);
            assert!(h.cost_xtalk.crosstalk_term <= l.cost_xtalk.crosstalk_term + 1e-12);
            if l.benchmark == "cswap" {
                assert!(h.fidelity_xtalk >= l.fidelity_xtalk - 1e-12);
            }
        }
    }
}

#[test]
fn scheduling_on_the_true_map_beats_par() {
    let d = bundled_device("casablanca-like").unwrap();
    let records = run_compare(&d, &bundled_suite(), &CompareOptions::default()).unwrap();
    let mean = |f: &dyn Fn(&xtalk_core::experiments::ComparisonRecord) -> f64| {
        records.iter().map(f).sum::<f64>() / records.len() as f64
    };
    assert!(mean(&|r| r.fidelity_xtalk) > mean(&|r| r.fidelity_par));
    assert!(mean(&|r| r.depth_xtalk as f64) > mean(&|r| r.depth_par as f64));
    for r in &records {
        let b = bundled_suite().into_iter().find(|b| b.name == r.benchmark).unwrap();
        let (small, qubits) = compact(&map_to_device(&b.circuit, &d, &b.name).unwrap()).unwrap();
        let sub = d.restrict(&qubits).unwrap();
        let par = par_sched(&small, &sub).unwrap();
        assert_eq!(schedule_cost(&par, &sub, 0.5), r.cost_par);
    }
}

#[test]
fn injection_degrades_monotonically_and_repeats() {
    let d = bundled_device("inject9").unwrap();
    let first = run_injection(&d, 3).unwrap();
    assert!(first.strictly_decreasing(), "{first:?}");
    assert!(first.rows[3].relative_drop > 0.10);
    assert!(first.warnings.is_empty());
    let second = run_injection(&d, 3).unwrap();
    assert_eq!(first.to_json(), second.to_json());
    assert_eq!(first.to_csv().unwrap(), second.to_csv().unwrap());
}
