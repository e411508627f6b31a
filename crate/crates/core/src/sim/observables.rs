//! Exact `C_ij(t)` and `Ĉ_ij(t)` from evolved string expansions.

use nalgebra::Matrix3;

use crate::curve::BoundCurve;
use crate::graph::NodeId;
use crate::sim::evolve::{evolve_times, Method};
use crate::sim::operator::{pauli_commutator, BasisKind, Hamiltonian, Key, OperatorVector};
use crate::sim::pauli::PauliString;
use crate::sim::SimError;

/// Whether `{Gamma_S, psi_j} != 0`, i.e. `Gamma_S` commutes with `psi_j`:
/// `|S| - [j in S]` even. Odd strings are kept iff they contain `j`.
pub fn majorana_projector_keeps(key: Key, j: usize) -> bool {
    let mask = key as u64;
    let inside = (mask >> j & 1) as u32;
    (mask.count_ones() - inside) % 2 == 0
}

fn keeps(kind: BasisKind, key: Key, j: usize) -> bool {
    match kind {
        BasisKind::Pauli => PauliString::from_key(key).acts_on(j),
        BasisKind::Majorana => majorana_projector_keeps(key, j),
    }
}

/// `(O|P_j|O) / (O|O)`.
pub fn c_ij_squared(op: &OperatorVector, j: usize) -> f64 {
    let total = op.norm_sq();
    if total == 0.0 {
        return 0.0;
    }
    let kept: f64 = op.iter().filter(|&(k, _)| keeps(op.kind, k, j)).map(|(_, c)| c * c).sum();
    (kept / total).clamp(0.0, 1.0)
}

fn check_initial(h: &Hamiltonian, i: NodeId, j: NodeId, a: &OperatorVector) -> Result<(), SimError> {
    if i >= h.n || j >= h.n {
        return Err(SimError::BadInitialOperator(format!("site out of range for {} sites", h.n)));
    }
    if a.is_empty() {
        return Err(SimError::BadInitialOperator("zero operator".into()));
    }
    if a.identity_component() != 0.0 {
        return Err(SimError::BadInitialOperator("operator has a trace".into()));
    }
    if a.support() & !(1u64 << i) != 0 {
        return Err(SimError::BadInitialOperator(format!("operator not supported on site {i} alone")));
    }
    Ok(())
}

fn label(h: &Hamiltonian) -> &'static str {
    match h.kind {
        BasisKind::Pauli => "pauli",
        BasisKind::Majorana => "majorana",
    }
}

/// `C_ij(t) = sqrt((A(t)|P_j|A(t)) / (A|A))` on every time in `times`.
pub fn c_ij_exact(
    h: &Hamiltonian,
    i: NodeId,
    j: NodeId,
    a: &OperatorVector,
    times: &[f64],
    method: Method,
) -> Result<BoundCurve<f64>, SimError> {
    check_initial(h, i, j, a)?;
    let ev = evolve_times(h, a, times, method)?;
    let a2 = a.norm_sq();
    let values = ev
        .iter()
        .map(|e| {
            let kept: f64 = e.op.iter().filter(|&(k, _)| keeps(a.kind, k, j)).map(|(_, c)| c * c).sum();
            // An empty float sum is -0.0; abs keeps the sign off the output.
            (kept / a2).clamp(0.0, 1.0).sqrt().abs()
        })
        .collect();
    let budget = ev.iter().map(|e| e.error_estimate).fold(0.0, f64::max);
    Ok(BoundCurve::new("c_exact", times.to_vec(), values)
        .with_meta("basis", label(h))
        .with_meta("method", format!("{method:?}").to_lowercase())
        .with_meta("error_budget", format!("{budget:e}")))
}

/// `sup_B ||[O, B_j]||_2 / (2 ||a_norm|| ||B_j||_2)` over single-qubit `B_j`,
/// from the 3x3 Gram matrix of `i[O, sigma^a_j]`.
pub fn hatc_ij_value(op: &OperatorVector, j: usize, a_norm: f64) -> Result<f64, SimError> {
    if op.kind != BasisKind::Pauli {
        return Err(SimError::BasisMismatch("Ĉ is defined for qubits only".into()));
    }
    let ws: Vec<OperatorVector> = ['X', 'Y', 'Z']
        .iter()
        .map(|&c| {
            let s = OperatorVector::basis(BasisKind::Pauli, op.n, PauliString::single(j, c)?.to_key())?;
            pauli_commutator(op, &s)
        })
        .collect::<Result<_, _>>()?;
    let mut g = Matrix3::zeros();
    for a in 0..3 {
        for b in a..3 {
            let v = ws[a].dot(&ws[b])?;
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    let top = g.symmetric_eigenvalues().max().max(0.0);
    Ok((top / (4.0 * a_norm * a_norm)).sqrt().min(1.0))
}

pub fn hatc_ij_exact(
    h: &Hamiltonian,
    i: NodeId,
    j: NodeId,
    a: &OperatorVector,
    times: &[f64],
    method: Method,
) -> Result<BoundCurve<f64>, SimError> {
    if h.kind != BasisKind::Pauli {
        return Err(SimError::BasisMismatch("Ĉ is defined for qubits only".into()));
    }
    check_initial(h, i, j, a)?;
    let ev = evolve_times(h, a, times, method)?;
    let an = a.norm();
    let values = ev.iter().map(|e| hatc_ij_value(&e.op, j, an)).collect::<Result<_, _>>()?;
    Ok(BoundCurve::new("hatc_exact", times.to_vec(), values).with_meta("method", format!("{method:?}").to_lowercase()))
}
