//! Independent checks of the tableau machinery against dense matrices and a
//! brute-force enumeration of the group.

use std::collections::HashMap;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use xtalk_core::circuit::{Circuit, Gate, GateKind};
use xtalk_core::clifford::{enumerate_group, random_clifford, CliffordTableau, Pauli};
use xtalk_core::sim::circuit_unitary;

fn dense(n: usize, gates: &[Gate]) -> Vec<C64> {
    circuit_unitary(&Circuit::from_gates(n, 0, gates.iter().cloned()).unwrap()).unwrap()
}

fn matmul(a: &[C64], b: &[C64], d: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for k in 0..d {
            for c in 0..d {
                out[r * d + c] += a[r * d + k] * b[k * d + c];
            }
        }
    }
    out
}

fn dagger(a: &[C64], d: usize) -> Vec<C64> {
    let mut out = a.to_vec();
    for r in 0..d {
        for c in 0..d {
            out[c * d + r] = a[r * d + c].conj();
        }
    }
    out
}

/// Dense matrix of `i^phase X^x Z^z`.
fn pauli_matrix(n: usize, p: Pauli) -> Vec<C64> {
    let mut gates = Vec::new();
    for q in 0..n {
        if (p.z >> q) & 1 == 1 {
            gates.push(Gate::single(GateKind::Z, q));
        }
    }
    for q in 0..n {
        if (p.x >> q) & 1 == 1 {
            gates.push(Gate::single(GateKind::X, q));
        }
    }
    let phase = C64::i().powu(p.phase as u32);
    dense(n, &gates).into_iter().map(|v| v * phase).collect()
}

fn assert_conjugation_matches(t: &CliffordTableau) {
    let n = t.num_qubits();
    let d = 1 << n;
    let u = dense(n, &t.tableau_to_gates().unwrap());
    let ud = dagger(&u, d);
    for i in 0..2 * n {
        let gen = if i < n {
            Pauli::hermitian(1 << i, 0, false)
        } else {
            Pauli::hermitian(0, 1 << (i - n), false)
        };
        let lhs = matmul(&matmul(&u, &pauli_matrix(n, gen), d), &ud, d);
        let rhs = pauli_matrix(n, t.row(i));
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-10, "generator {i} of {t:?}");
        }
        assert_eq!(t.conjugate(gen), t.row(i));
    }
}

#[test]
fn synthesized_unitaries_conjugate_paulis_like_the_tableau() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..300 {
        assert_conjugation_matches(&random_clifford(2, &mut rng));
    }
    for t in enumerate_group(1) {
        assert_conjugation_matches(&t);
    }
}

#[test]
fn single_qubit_sampling_is_uniform() {
    let group = enumerate_group(1);
    let index: HashMap<_, _> = group.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let draws = 10_000;
    let mut counts = [0u64; 24];
    for _ in 0..draws {
        counts[index[&random_clifford(1, &mut rng)]] += 1;
    }
    let expected = draws as f64 / 24.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(23.0).unwrap().inverse_cdf(0.99);
    assert!(chi2 < critical, "chi2 = {chi2}, critical = {critical}");
}

#[test]
fn single_qubit_class_counts_within_three_sigma() {
    let group = enumerate_group(1);
    let index: HashMap<_, _> = group.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut counts = [0u64; 24];
    for _ in 0..24_000 {
        counts[index[&random_clifford(1, &mut rng)]] += 1;
    }
    let sigma = (24_000.0f64 * (1.0 / 24.0) * (23.0 / 24.0)).sqrt();
    for (i, &c) in counts.iter().enumerate() {
        assert!((c as f64 - 1000.0).abs() <= 3.0 * sigma, "class {i}: {c}");
    }
}

#[test]
fn two_qubit_draws_stay_in_group_with_class_frequencies() {
    let group: std::collections::HashSet<_> = enumerate_group(2).into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws = 10_000;
    let mut classes = [0u64; 4];
    for _ in 0..draws {
        let t = random_clifford(2, &mut rng);
        assert!(group.contains(&t));
        classes[t.cx_class().unwrap()] += 1;
    }
    let fractions = [576.0, 5184.0, 5184.0, 576.0].map(|c| c / 11520.0);
    let chi2: f64 = classes
        .iter()
        .zip(fractions)
        .map(|(&c, f)| {
            let e = f * draws as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    assert!(chi2 < ChiSquared::new(3.0).unwrap().inverse_cdf(0.99), "chi2 = {chi2}");
}

#[test]
fn closure_is_symplectic_and_composition_closed() {
    let group: std::collections::HashSet<_> = enumerate_group(2).into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let a = random_clifford(2, &mut rng);
        let b = random_clifford(2, &mut rng);
        let c = a.compose(&b).unwrap();
        assert!(c.is_symplectic());
        assert!(group.contains(&c));
        assert!(group.contains(&a.invert()));
    }
}
