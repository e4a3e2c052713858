use std::collections::BTreeSet;

use super::{Circuit, CircuitError, Gate, GateKind};

/// Macro gate kinds that [`decompose_to_native`] knows how to lower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MacroKind {
    CCX,
    CSWAP,
    SWAP,
}

impl MacroKind {
    pub const ALL: [MacroKind; 3] = [MacroKind::CCX, MacroKind::CSWAP, MacroKind::SWAP];

    fn of(kind: GateKind) -> Option<MacroKind> {
        match kind {
            GateKind::CCX => Some(MacroKind::CCX),
            GateKind::CSWAP => Some(MacroKind::CSWAP),
            GateKind::SWAP => Some(MacroKind::SWAP),
            _ => None,
        }
    }
}

/// Lowers macro gates to `CX` plus single-qubit gates.
///
/// `extended` lists the macro kinds the caller expects; any other macro in the
/// input is rejected as unknown.
pub fn decompose_to_native(c: &Circuit, extended: &BTreeSet<MacroKind>) -> Result<Circuit, CircuitError> {
    let mut out = Circuit::new(c.num_qubits(), c.num_clbits());
    for g in c.gates() {
        match MacroKind::of(g.kind) {
            None => out.push(g.clone())?,
            Some(m) if !extended.contains(&m) => return Err(CircuitError::UnknownMacro(g.kind.name())),
            Some(_) => {
                for h in lower(g) {
                    out.push(h)?;
                }
            }
        }
    }
    Ok(out)
}

fn lower(g: &Gate) -> Vec<Gate> {
    let q = &g.qubits;
    match g.kind {
        GateKind::SWAP => swap(q[0], q[1]),
        GateKind::CCX => ccx(q[0], q[1], q[2]),
        GateKind::CSWAP => {
            let (ctrl, a, b) = (q[0], q[1], q[2]);
            let mut v = vec![Gate::cx(b, a)];
            v.extend(ccx(ctrl, a, b));
            v.push(Gate::cx(b, a));
            v
        }
        _ => vec![g.clone()],
    }
}

pub(crate) fn swap(a: usize, b: usize) -> Vec<Gate> {
    vec![Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)]
}

/// Standard 6-CX Toffoli network.
pub(crate) fn ccx(a: usize, b: usize, c: usize) -> Vec<Gate> {
    use GateKind::*;
    let s = Gate::single;
    vec![
        s(H, c),
        Gate::cx(b, c),
        s(Tdg, c),
        Gate::cx(a, c),
        s(T, c),
        Gate::cx(b, c),
        s(Tdg, c),
        Gate::cx(a, c),
        s(T, b),
        s(T, c),
        s(H, c),
        Gate::cx(a, b),
        s(T, a),
        s(Tdg, b),
        Gate::cx(a, b),
    ]
}
