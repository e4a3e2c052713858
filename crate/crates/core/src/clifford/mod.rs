//! Clifford group elements as stabilizer tableaux.
//!
//! A tableau stores the images of the generators `X_0..X_{n-1}` and
//! `Z_0..Z_{n-1}` under conjugation `P -> C P C^dagger`. Each image is a
//! Hermitian Pauli: a sign plus `x` and `z` bit masks.

mod synth;

pub use synth::{enumerate_group, Canonical};

use rand::Rng;
use thiserror::Error;

use crate::circuit::{Gate, GateKind};

/// Largest register a tableau row can hold (`x` and `z` share one `u64`).
pub const MAX_TABLEAU_QUBITS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliffordError {
    #[error("tableau sizes differ: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),
    #[error("gate synthesis supports 1 or 2 qubits, not {0}")]
    Unsupported(usize),
}

/// `i^phase X^x Z^z` over up to 32 qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pauli {
    pub x: u32,
    pub z: u32,
    pub phase: u8,
}

impl Pauli {
    pub fn identity() -> Self {
        Pauli { x: 0, z: 0, phase: 0 }
    }

    /// Hermitian Pauli `(-1)^sign` times the tensor product with `Y` wherever
    /// both bits are set.
    pub fn hermitian(x: u32, z: u32, sign: bool) -> Self {
        Pauli {
            x,
            z,
            phase: ((2 * u32::from(sign) + (x & z).count_ones()) % 4) as u8,
        }
    }

    /// `self * other`.
    pub fn compose(self, other: Pauli) -> Pauli {
        let k = self.phase as u32 + other.phase as u32 + 2 * (self.z & other.x).count_ones();
        Pauli {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: (k % 4) as u8,
        }
    }

    /// Sign bit of a Hermitian Pauli, `None` if the phase is imaginary.
    pub fn sign(self) -> Option<bool> {
        let k = (self.phase as u32 + 4 - (self.x & self.z).count_ones() % 4) % 4;
        match k {
            0 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }

    /// Symplectic product: 1 when the two Paulis anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1
    }
}

/// Clifford element on `n` qubits, up to global phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CliffordTableau {
    n: usize,
    /// `x` bits in `0..n`, `z` bits in `n..2n`; rows `0..n` are the images
    /// of `X_j`, rows `n..2n` those of `Z_j`.
    rows: Vec<u64>,
    signs: u64,
}

fn split(row: u64, n: usize) -> (u32, u32) {
    let mask = (1u64 << n) - 1;
    ((row & mask) as u32, ((row >> n) & mask) as u32)
}

fn join(x: u32, z: u32, n: usize) -> u64 {
    u64::from(x) | (u64::from(z) << n)
}

fn bv_inner(a: u64, b: u64, n: usize) -> bool {
    let (ax, az) = split(a, n);
    let (bx, bz) = split(b, n);
    ((ax & bz).count_ones() + (az & bx).count_ones()) % 2 == 1
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        assert!((1..=MAX_TABLEAU_QUBITS).contains(&n), "tableau size {n} unsupported");
        CliffordTableau {
            n,
            rows: (0..2 * n).map(|i| 1u64 << i).collect(),
            signs: 0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Image of generator `i` (`X_i` for `i < n`, else `Z_{i-n}`).
    pub fn row(&self, i: usize) -> Pauli {
        let (x, z) = split(self.rows[i], self.n);
        Pauli::hermitian(x, z, (self.signs >> i) & 1 == 1)
    }

    fn from_rows(n: usize, images: &[Pauli]) -> Self {
        let mut t = CliffordTableau {
            n,
            rows: Vec::with_capacity(2 * n),
            signs: 0,
        };
        for (i, p) in images.iter().enumerate() {
            t.rows.push(join(p.x, p.z, n));
            if p.sign().expect("Clifford images are Hermitian") {
                t.signs |= 1 << i;
            }
        }
        t
    }

    /// `C P C^dagger`.
    pub fn conjugate(&self, p: Pauli) -> Pauli {
        let mut out = Pauli {
            x: 0,
            z: 0,
            phase: p.phase,
        };
        for j in 0..self.n {
            if (p.x >> j) & 1 == 1 {
                out = out.compose(self.row(j));
            }
        }
        for j in 0..self.n {
            if (p.z >> j) & 1 == 1 {
                out = out.compose(self.row(self.n + j));
            }
        }
        out
    }

    /// `b o a`: the Clifford that applies `self` first and `b` second.
    pub fn compose(&self, b: &CliffordTableau) -> Result<CliffordTableau, CliffordError> {
        if self.n != b.n {
            return Err(CliffordError::SizeMismatch(self.n, b.n));
        }
        let images: Vec<Pauli> = (0..2 * self.n).map(|i| b.conjugate(self.row(i))).collect();
        Ok(CliffordTableau::from_rows(self.n, &images))
    }

    /// Whether the rows obey the canonical commutation relations.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (0..2 * n).all(|j| {
                let want = i != j && (i % n == j % n);
                bv_inner(self.rows[i], self.rows[j], n) == want
            })
        })
    }

    /// The inverse element: `c.compose(&c.invert())` is the identity.
    pub fn invert(&self) -> CliffordTableau {
        let n = self.n;
        // Symplectic inverse: the preimage u of e_j has z-bit i equal to
        // <row(X_i), e_j> and x-bit i equal to <row(Z_i), e_j>.
        let mut rows = vec![0u64; 2 * n];
        for (j, row) in rows.iter_mut().enumerate() {
            let ej = 1u64 << j;
            for i in 0..n {
                if bv_inner(self.rows[i], ej, n) {
                    *row |= 1u64 << (n + i);
                }
                if bv_inner(self.rows[n + i], ej, n) {
                    *row |= 1u64 << i;
                }
            }
        }
        let v0 = CliffordTableau { n, rows, signs: 0 };
        let pauli_part = self.compose(&v0).expect("same size");
        v0.compose(&pauli_part).expect("same size")
    }

    /// Tableau of a single Clifford gate on an `n`-qubit register. `None` for
    /// non-Clifford kinds, barriers and measurements.
    pub fn from_gate(g: &Gate, n: usize) -> Option<CliffordTableau> {
        let mut t = CliffordTableau::identity(n);
        t.apply_gate(g).then_some(t)
    }

    /// Tableau of a gate list; `None` if any gate is not Clifford.
    pub fn from_gates(n: usize, gates: &[Gate]) -> Option<CliffordTableau> {
        let mut t = CliffordTableau::identity(n);
        for g in gates {
            if !t.apply_gate(g) {
                return None;
            }
        }
        Some(t)
    }

    /// Appends `g` (applied after the current element). Returns `false` and
    /// leaves `self` unchanged for non-Clifford gates.
    pub fn apply_gate(&mut self, g: &Gate) -> bool {
        let n = self.n;
        let q = &g.qubits;
        if q.iter().any(|&x| x >= n) {
            return false;
        }
        let (img_x, img_z) = match g.kind {
            GateKind::I => return true,
            GateKind::X => (px(q[0], false), pz(q[0], true)),
            GateKind::Y => (px(q[0], true), pz(q[0], true)),
            GateKind::Z => (px(q[0], true), pz(q[0], false)),
            GateKind::H => (pz(q[0], false), px(q[0], false)),
            GateKind::S => (py(q[0], false), pz(q[0], false)),
            GateKind::Sdg => (py(q[0], true), pz(q[0], false)),
            GateKind::SX => (px(q[0], false), py(q[0], true)),
            GateKind::CX => return self.apply_cx(q[0], q[1]),
            _ => return false,
        };
        let j = q[0];
        let rule = |p: Pauli| -> Pauli {
            let mut rest = p;
            let bit = 1u32 << j;
            rest.x &= !bit;
            rest.z &= !bit;
            // i^k X^x Z^z = i^k (X^x' Z^z') X_j^a Z_j^b since factors on
            // different qubits commute.
            let mut out = Pauli {
                x: rest.x,
                z: rest.z,
                phase: p.phase,
            };
            if p.x & bit != 0 {
                out = out.compose(img_x);
            }
            if p.z & bit != 0 {
                out = out.compose(img_z);
            }
            out
        };
        self.map_rows(rule);
        true
    }

    fn apply_cx(&mut self, c: usize, t: usize) -> bool {
        let img = [
            Pauli::hermitian((1 << c) | (1 << t), 0, false),
            Pauli::hermitian(1 << t, 0, false),
            Pauli::hermitian(0, 1 << c, false),
            Pauli::hermitian(0, (1 << c) | (1 << t), false),
        ];
        let (bc, bt) = (1u32 << c, 1u32 << t);
        let rule = |p: Pauli| -> Pauli {
            let mask = bc | bt;
            let mut out = Pauli {
                x: p.x & !mask,
                z: p.z & !mask,
                phase: p.phase,
            };
            // Factors in canonical order X_c X_t Z_c Z_t after the rest.
            if p.x & bc != 0 {
                out = out.compose(img[0]);
            }
            if p.x & bt != 0 {
                out = out.compose(img[1]);
            }
            if p.z & bc != 0 {
                out = out.compose(img[2]);
            }
            if p.z & bt != 0 {
                out = out.compose(img[3]);
            }
            out
        };
        self.map_rows(rule);
        true
    }

    fn map_rows(&mut self, f: impl Fn(Pauli) -> Pauli) {
        let images: Vec<Pauli> = (0..2 * self.n).map(|i| f(self.row(i))).collect();
        *self = CliffordTableau::from_rows(self.n, &images);
    }
}

fn px(q: usize, sign: bool) -> Pauli {
    Pauli::hermitian(1 << q, 0, sign)
}

fn pz(q: usize, sign: bool) -> Pauli {
    Pauli::hermitian(0, 1 << q, sign)
}

fn py(q: usize, sign: bool) -> Pauli {
    Pauli::hermitian(1 << q, 1 << q, sign)
}

/// Uniformly random element of the `n`-qubit Clifford group.
///
/// Builds the symplectic part one canonical pair `(X_j, Z_j)` at a time: the
/// image of `X_j` is uniform among nonzero vectors symplectically orthogonal
/// to the earlier pairs, the image of `Z_j` uniform among those vectors that
/// anticommute with it. Sign bits are uniform.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordTableau {
    assert!((1..=MAX_TABLEAU_QUBITS).contains(&n), "tableau size {n} unsupported");
    let width = 2 * n;
    let full = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(n);
    let project = |u: u64, pairs: &[(u64, u64)]| -> u64 {
        let mut out = u;
        for &(v, w) in pairs {
            if bv_inner(u, w, n) {
                out ^= v;
            }
            if bv_inner(u, v, n) {
                out ^= w;
            }
        }
        out
    };
    for _ in 0..n {
        let v = loop {
            let u = project(rng.random::<u64>() & full, &pairs);
            if u != 0 {
                break u;
            }
        };
        let w = loop {
            let u = project(rng.random::<u64>() & full, &pairs);
            if bv_inner(v, u, n) {
                break u;
            }
        };
        pairs.push((v, w));
    }
    let mut rows = vec![0u64; width];
    for (j, &(v, w)) in pairs.iter().enumerate() {
        rows[j] = v;
        rows[n + j] = w;
    }
    let signs = rng.random::<u64>() & full;
    CliffordTableau { n, rows, signs }
}
