use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::channel::KrausChannel;
use super::linalg::{apply_local, conj, gate_matrix, ONE, ZERO};
use super::SimError;
use crate::circuit::Gate;

/// Dense `2^n x 2^n` density matrix, row-major.
///
/// Qubit `q` is bit `q` of a basis index. In the flattened storage the column
/// index occupies bits `0..n` and the row index bits `n..2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn zero_state(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        data[0] = ONE;
        DensityMatrix { n, data }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        DensityMatrix { n, data }
    }

    /// `|psi><psi|` for a normalised state vector of length `2^n`.
    pub fn from_pure(state: &[C64]) -> Self {
        let dim = state.len();
        assert!(dim.is_power_of_two(), "state length must be a power of two");
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = state[r] * state[c].conj();
            }
        }
        DensityMatrix {
            n: dim.trailing_zeros() as usize,
            data,
        }
    }

    /// Wraps raw row-major data; the caller is responsible for physicality.
    pub fn from_raw(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), 1usize << (2 * n));
        DensityMatrix { n, data }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|rho - rho^dagger|` entry.
    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let m = DMatrix::from_fn(dim, dim, |r, c| (self.get(r, c) + self.get(c, r).conj()) * 0.5);
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks trace, Hermiticity and positivity to within `tol`.
    pub fn check_physical(&self, tol: f64) -> Result<(), SimError> {
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(SimError::Unphysical(format!("trace = {tr}")));
        }
        let h = self.hermiticity_deviation();
        if h > tol {
            return Err(SimError::Unphysical(format!("hermiticity deviation = {h:e}")));
        }
        let lmin = self.min_eigenvalue();
        if lmin < -tol {
            return Err(SimError::Unphysical(format!("minimum eigenvalue = {lmin:e}")));
        }
        Ok(())
    }

    /// Computational-basis probabilities (the real diagonal).
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    fn check_targets(&self, targets: &[usize]) -> Result<(), SimError> {
        for (i, &q) in targets.iter().enumerate() {
            if q >= self.n || targets[..i].contains(&q) {
                return Err(SimError::BadTargets(targets.to_vec()));
            }
        }
        Ok(())
    }

    /// `rho -> U rho U^dagger` for an arbitrary local unitary on `targets`.
    pub fn apply_matrix(&mut self, u: &[C64], targets: &[usize]) -> Result<(), SimError> {
        self.check_targets(targets)?;
        if u.len() != 1usize << (2 * targets.len()) {
            return Err(SimError::ArityMismatch {
                expected: targets.len(),
                found: (u.len() as f64).log2() as usize / 2,
            });
        }
        let rows: Vec<usize> = targets.iter().map(|&q| q + self.n).collect();
        apply_local(&mut self.data, &rows, u);
        apply_local(&mut self.data, targets, &conj(u));
        Ok(())
    }

    /// Ideal action of a unitary gate.
    pub fn apply_unitary(&mut self, g: &Gate) -> Result<(), SimError> {
        let u = gate_matrix(g.kind).ok_or(SimError::UnsupportedKind(g.kind.name()))?;
        self.apply_matrix(&u, &g.qubits)
    }

    /// `rho -> sum_i K_i rho K_i^dagger` on `targets`.
    pub fn apply_channel(&mut self, ch: &KrausChannel, targets: &[usize]) -> Result<(), SimError> {
        if ch.num_qubits() != targets.len() {
            return Err(SimError::ArityMismatch {
                expected: ch.num_qubits(),
                found: targets.len(),
            });
        }
        self.check_targets(targets)?;
        let mut bits: Vec<usize> = targets.to_vec();
        bits.extend(targets.iter().map(|&q| q + self.n));
        apply_local(&mut self.data, &bits, ch.superoperator());
        Ok(())
    }

    /// Probability that every qubit in `qubits` reads 0.
    pub fn zero_probability(&self, qubits: &[usize]) -> f64 {
        let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
        (0..self.dim())
            .filter(|i| i & mask == 0)
            .map(|i| self.get(i, i).re)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::sim::channel::depolarizing_channel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mixed(n: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1 << n;
        // rho = A A^dagger / tr
        let a: Vec<C64> = (0..dim * dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = (0..dim).map(|k| a[r * dim + k] * a[c * dim + k].conj()).sum();
            }
        }
        let tr: C64 = (0..dim).map(|i| data[i * dim + i]).sum();
        for x in &mut data {
            *x /= tr;
        }
        DensityMatrix::from_raw(n, data)
    }

    fn max_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        a.data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn x_on_zero_state() {
        let mut rho = DensityMatrix::zero_state(2);
        rho.apply_unitary(&Gate::single(GateKind::X, 0)).unwrap();
        assert_eq!(rho.get(1, 1), ONE);
        assert_eq!(rho.probabilities(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn involutions_restore_state() {
        let rho0 = random_mixed(3, 7);
        let mut rho = rho0.clone();
        rho.apply_unitary(&Gate::single(GateKind::H, 1)).unwrap();
        rho.apply_unitary(&Gate::single(GateKind::H, 1)).unwrap();
        assert!(max_diff(&rho, &rho0) < 1e-12);
        rho.apply_unitary(&Gate::cx(2, 0)).unwrap();
        rho.apply_unitary(&Gate::cx(2, 0)).unwrap();
        assert!(max_diff(&rho, &rho0) < 1e-12);
    }

    #[test]
    fn measure_and_barrier_are_not_unitaries() {
        let mut rho = DensityMatrix::zero_state(1);
        assert!(matches!(
            rho.apply_unitary(&Gate::barrier([0])),
            Err(SimError::UnsupportedKind("barrier"))
        ));
    }

    #[test]
    fn identity_channel_and_full_depolarizing() {
        let rho0 = random_mixed(3, 11);
        let mut rho = rho0.clone();
        rho.apply_channel(&depolarizing_channel(1, 0.0).unwrap(), &[2]).unwrap();
        assert!(max_diff(&rho, &rho0) < 1e-14);
        for q in 0..3 {
            rho.apply_channel(&depolarizing_channel(1, 1.0).unwrap(), &[q]).unwrap();
        }
        assert!(max_diff(&rho, &DensityMatrix::maximally_mixed(3)) < 1e-14);
        assert!(matches!(
            rho.apply_channel(&depolarizing_channel(2, 0.1).unwrap(), &[0]),
            Err(SimError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn physicality_checks() {
        let rho = random_mixed(2, 3);
        rho.check_physical(1e-9).unwrap();
        assert!(rho.min_eigenvalue() > 0.0);
        let mut bad = rho.data.clone();
        bad[1] += C64::new(0.1, 0.0);
        assert!(DensityMatrix::from_raw(2, bad).check_physical(1e-9).is_err());
    }
}
