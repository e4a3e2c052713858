use num_complex::Complex64 as C64;

use super::linalg::{conj, dagger, gate_matrix, matmul, ONE, ZERO};
use super::SimError;
use crate::circuit::GateKind;

const COMPLETENESS_TOL: f64 = 1e-9;

/// A completely positive trace-preserving map on `k` qubits in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    k: usize,
    operators: Vec<Vec<C64>>,
    superop: Vec<C64>,
}

impl KrausChannel {
    /// Validates shapes and `sum K^dagger K = I`.
    pub fn new(k: usize, operators: Vec<Vec<C64>>) -> Result<Self, SimError> {
        let dim = 1usize << k;
        if operators.is_empty() {
            return Err(SimError::InvalidChannel("no Kraus operators".into()));
        }
        if let Some(op) = operators.iter().find(|op| op.len() != dim * dim) {
            return Err(SimError::InvalidChannel(format!(
                "operator has {} entries, expected {}",
                op.len(),
                dim * dim
            )));
        }
        let mut sum = vec![ZERO; dim * dim];
        for op in &operators {
            for (s, x) in sum.iter_mut().zip(matmul(&dagger(op, dim), op, dim)) {
                *s += x;
            }
        }
        let dev = (0..dim * dim)
            .map(|i| (sum[i] - if i % (dim + 1) == 0 { ONE } else { ZERO }).norm())
            .fold(0.0, f64::max);
        if dev > COMPLETENESS_TOL {
            return Err(SimError::InvalidChannel(format!("completeness violated by {dev:e}")));
        }
        let superop = superoperator(&operators, dim);
        Ok(KrausChannel { k, operators, superop })
    }

    pub fn identity(k: usize) -> Self {
        let dim = 1usize << k;
        let id = (0..dim * dim)
            .map(|i| if i % (dim + 1) == 0 { ONE } else { ZERO })
            .collect();
        KrausChannel::new(k, vec![id]).expect("identity is complete")
    }

    pub fn num_qubits(&self) -> usize {
        self.k
    }

    pub fn operators(&self) -> &[Vec<C64>] {
        &self.operators
    }

    /// Matrix acting on `vec(rho)` restricted to the channel's qubits. Local
    /// index `c + 2^k r` addresses the entry `rho[r][c]`.
    pub(crate) fn superoperator(&self) -> &[C64] {
        &self.superop
    }
}

fn superoperator(ops: &[Vec<C64>], dim: usize) -> Vec<C64> {
    let sd = dim * dim;
    let mut s = vec![ZERO; sd * sd];
    for op in ops {
        let oc = conj(op);
        for r in 0..dim {
            for c in 0..dim {
                let out = c + dim * r;
                for r2 in 0..dim {
                    let a = op[r * dim + r2];
                    if a == ZERO {
                        continue;
                    }
                    for c2 in 0..dim {
                        s[out * sd + c2 + dim * r2] += a * oc[c * dim + c2];
                    }
                }
            }
        }
    }
    s
}

fn kron(a: &[C64], b: &[C64], da: usize, db: usize) -> Vec<C64> {
    // Operand order matches the local bit convention: `a` acts on bit 0.
    let d = da * db;
    let mut out = vec![ZERO; d * d];
    for rb in 0..db {
        for cb in 0..db {
            for ra in 0..da {
                for ca in 0..da {
                    out[(ra + da * rb) * d + ca + da * cb] = a[ra * da + ca] * b[rb * db + cb];
                }
            }
        }
    }
    out
}

/// `rho -> (1 - p) rho + p I / d` on `k` qubits, in Pauli Kraus form.
///
/// Valid for `0 <= p <= d^2 / (d^2 - 1)`; `p = 1` is the fully mixing channel.
pub fn depolarizing_channel(k: usize, p: f64) -> Result<KrausChannel, SimError> {
    if !(k == 1 || k == 2) {
        return Err(SimError::InvalidChannel(format!(
            "depolarizing arity {k} not in {{1, 2}}"
        )));
    }
    let d2 = (1usize << (2 * k)) as f64;
    let pmax = d2 / (d2 - 1.0);
    if !p.is_finite() || p < 0.0 || p > pmax + 1e-12 {
        return Err(SimError::ParameterOutOfRange(format!(
            "depolarizing p = {p} outside [0, {pmax}]"
        )));
    }
    let p = p.min(pmax);
    let paulis: Vec<Vec<C64>> = [GateKind::I, GateKind::X, GateKind::Y, GateKind::Z]
        .iter()
        .map(|&g| gate_matrix(g).expect("pauli"))
        .collect();
    let all: Vec<Vec<C64>> = if k == 1 {
        paulis.clone()
    } else {
        let mut v = Vec::with_capacity(16);
        for b in &paulis {
            for a in &paulis {
                v.push(kron(a, b, 2, 2));
            }
        }
        v
    };
    let w0 = (1.0 - p * (d2 - 1.0) / d2).max(0.0).sqrt();
    let wp = (p / d2).sqrt();
    let ops = all
        .into_iter()
        .enumerate()
        .filter_map(|(i, m)| {
            let w = if i == 0 { w0 } else { wp };
            (w > 0.0).then(|| m.into_iter().map(|x| x * w).collect())
        })
        .collect();
    KrausChannel::new(k, ops)
}

/// Single-qubit amplitude damping followed by pure dephasing over `dt`.
///
/// Times share any unit. `t1` or `t2` may be infinite.
pub fn thermal_relaxation_channel(t1: f64, t2: f64, dt: f64) -> Result<KrausChannel, SimError> {
    if t1.is_nan() || t2.is_nan() || t1 <= 0.0 || t2 <= 0.0 || t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(SimError::ParameterOutOfRange(format!(
            "relaxation times t1 = {t1}, t2 = {t2} violate 0 < t2 <= 2 t1"
        )));
    }
    if !dt.is_finite() || dt < 0.0 {
        return Err(SimError::ParameterOutOfRange(format!(
            "duration {dt} must be finite and >= 0"
        )));
    }
    let gamma = 1.0 - (-dt / t1).exp();
    let inv_tphi = (1.0 / t2 - 1.0 / (2.0 * t1)).max(0.0);
    let lambda = 1.0 - (-2.0 * dt * inv_tphi).exp();
    let r = |x: f64| C64::new(x, 0.0);
    let amp = [
        vec![ONE, ZERO, ZERO, r((1.0 - gamma).sqrt())],
        vec![ZERO, r(gamma.sqrt()), ZERO, ZERO],
    ];
    let phase = [
        vec![ONE, ZERO, ZERO, r((1.0 - lambda).sqrt())],
        vec![ZERO, ZERO, ZERO, r(lambda.sqrt())],
    ];
    let mut ops = Vec::new();
    for p in &phase {
        for a in &amp {
            let m = matmul(p, a, 2);
            if m.iter().any(|x| x.norm() > 0.0) {
                ops.push(m);
            }
        }
    }
    KrausChannel::new(1, ops)
}
