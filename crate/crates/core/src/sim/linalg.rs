//! Small dense helpers shared by the simulator: gate matrices and in-place
//! application of a local operator to selected bits of a vectorised array.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64 as C64;

use crate::circuit::GateKind;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Applies the `2^k x 2^k` row-major matrix `m` to the bits `bits` of every
/// index of `data`. Local index bit `j` corresponds to global bit `bits[j]`.
pub(crate) fn apply_local(data: &mut [C64], bits: &[usize], m: &[C64]) {
    let k = bits.len();
    let dim = 1usize << k;
    debug_assert_eq!(m.len(), dim * dim);
    let mask: usize = bits.iter().map(|&b| 1usize << b).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|l| (0..k).filter(|&j| (l >> j) & 1 == 1).map(|j| 1usize << bits[j]).sum())
        .collect();
    let mut buf = vec![ZERO; dim];
    for base in 0..data.len() {
        if base & mask != 0 {
            continue;
        }
        for (slot, &off) in buf.iter_mut().zip(&offsets) {
            *slot = data[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &m[r * dim..(r + 1) * dim];
            data[base + off] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
        }
    }
}

fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> Vec<C64> {
    let mut m = vec![ZERO; dim * dim];
    for l in 0..dim {
        m[f(l) * dim + l] = ONE;
    }
    m
}

/// Matrix of a unitary gate kind in the local operand convention (operand
/// `j` is local bit `j`). `None` for barriers and measurements.
pub fn gate_matrix(kind: GateKind) -> Option<Vec<C64>> {
    let i = C64::i();
    let h = FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| C64::new(re, im);
    let m = match kind {
        GateKind::I => vec![ONE, ZERO, ZERO, ONE],
        GateKind::X => vec![ZERO, ONE, ONE, ZERO],
        GateKind::Y => vec![ZERO, -i, i, ZERO],
        GateKind::Z => vec![ONE, ZERO, ZERO, -ONE],
        GateKind::H => vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
        GateKind::S => vec![ONE, ZERO, ZERO, i],
        GateKind::Sdg => vec![ONE, ZERO, ZERO, -i],
        GateKind::T => vec![ONE, ZERO, ZERO, C64::from_polar(1.0, FRAC_PI_4)],
        GateKind::Tdg => vec![ONE, ZERO, ZERO, C64::from_polar(1.0, -FRAC_PI_4)],
        GateKind::SX => vec![c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)],
        GateKind::RZ(theta) => vec![
            C64::from_polar(1.0, -theta / 2.0),
            ZERO,
            ZERO,
            C64::from_polar(1.0, theta / 2.0),
        ],
        GateKind::CX => permutation(4, |l| if l & 1 == 1 { l ^ 2 } else { l }),
        GateKind::SWAP => permutation(4, |l| ((l & 1) << 1) | ((l >> 1) & 1)),
        GateKind::CCX => permutation(8, |l| if l & 3 == 3 { l ^ 4 } else { l }),
        GateKind::CSWAP => permutation(8, |l| {
            if l & 1 == 1 {
                1 | (((l >> 1) & 1) << 2) | (((l >> 2) & 1) << 1)
            } else {
                l
            }
        }),
        GateKind::Barrier | GateKind::Measure => return None,
    };
    Some(m)
}

pub(crate) fn conj(m: &[C64]) -> Vec<C64> {
    m.iter().map(|z| z.conj()).collect()
}

/// `a * b` for square row-major matrices of side `dim`.
pub(crate) fn matmul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let x = a[r * dim + k];
            if x == ZERO {
                continue;
            }
            for c in 0..dim {
                out[r * dim + c] += x * b[k * dim + c];
            }
        }
    }
    out
}

pub(crate) fn dagger(m: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[c * dim + r] = m[r * dim + c].conj();
        }
    }
    out
}
