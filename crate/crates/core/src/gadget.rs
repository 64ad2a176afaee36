//! T gates through a postselected gadget with one recycled ancilla.
//!
//! `T|ψ⟩ ⊗ |0⟩ = √2 · (1 + Z_A)/2 · CX_{t→A} (|ψ⟩ ⊗ |T⟩)`, so a T gate on
//! qubit `t` becomes an ancilla in `|T⟩`, a CNOT and a measurement of `Z_A`
//! postselected on `+1`. The measurement is removed with [`iccr_step`], after
//! which the ancilla is disentangled from the tableau and dropped.

use rand::Rng;

use crate::error::{IccrError, Result};
use crate::gate::{GateKind, GateRecord};
use crate::pauli::Pauli;
use crate::product_state::{ProductState, SingleQubitState, Stabilizer};
use crate::renorm::{
    iccr_step, rotation_from_z, rotation_to_z, Branch, IterationReport, OutcomePolicy,
    VariationalConfig,
};
use crate::tableau::CliffordTableau;

/// Resource state held by the ancilla before each gadget.
pub fn resource_state() -> SingleQubitState {
    SingleQubitState::t_state()
}

/// Applies `T` on `target` after `u`: on return `u|Ψ⟩` approximates
/// `T_target u_old |Ψ_old⟩`. State and tableau keep their size `N`; the
/// ancilla lives at index `N` only during the call.
pub fn inject_t_gate<R: Rng + ?Sized>(
    state: &mut ProductState,
    u: &mut CliffordTableau,
    target: usize,
    rng: &mut R,
    config: &VariationalConfig,
) -> Result<IterationReport> {
    let n = state.n_qubits();
    if u.n_qubits() != n {
        return Err(IccrError::SizeMismatch {
            expected: n,
            found: u.n_qubits(),
        });
    }
    if target >= n {
        return Err(IccrError::SiteOutOfRange {
            site: target,
            n_qubits: n,
        });
    }
    let a = n;
    state.push(resource_state());
    u.add_qubit();
    u.compose(&[GateRecord::cx(target, a)])?;
    let report = iccr_step(state, u, a, OutcomePolicy::PostselectPlus, rng, config)?;
    if report.branch == Branch::TrivialDrop {
        return Err(IccrError::AncillaEntangled(
            "gadget measurement was deterministic".into(),
        ));
    }
    recycle_ancilla(state, u, a, report.target_site)?;
    Ok(report)
}

/// Disentangles and removes ancilla `a` after the gadget's measurement step.
///
/// `i_star` is the target qubit of that step, which holds `|0⟩`. It is swapped
/// into slot `a`. Clifford corrections that act trivially on the state are then
/// prepended until `u† Z_A u = ±Z_A` and `u† X_A u = ±X_A` or `±Y_A`:
///
/// * for every other qubit `r` on which the image of `Z_A` acts, `r` is an
///   eigenstate of that letter; a CNOT from `r` onto `A` (in the rotated
///   frame of `r`, followed by `X_A` for eigenvalue `-1`) removes it;
/// * the remaining letters of the image of `X_A` are removed with gates
///   controlled on `A`.
///
/// Finally qubit `a` is dropped from both the tableau and the state.
pub fn recycle_ancilla(
    state: &mut ProductState,
    u: &mut CliffordTableau,
    a: usize,
    i_star: Option<usize>,
) -> Result<()> {
    let n = state.n_qubits();
    if u.n_qubits() != n {
        return Err(IccrError::SizeMismatch {
            expected: n,
            found: u.n_qubits(),
        });
    }
    if a >= n {
        return Err(IccrError::SiteOutOfRange {
            site: a,
            n_qubits: n,
        });
    }
    if let Some(i) = i_star {
        if i != a {
            state.swap(i, a)?;
            u.prepend(&[GateRecord::swap(i, a)])?;
        }
    }
    if state.qubit(a).classification() != Some(Stabilizer::ZPlus) {
        return Err(IccrError::AncillaEntangled(format!(
            "ancilla slot holds {}",
            state.qubit(a).label()
        )));
    }

    let zimg = u.z_image(a);
    let mut fix = Vec::new();
    for r in zimg.support() {
        if r == a {
            continue;
        }
        let letter = zimg.get(r);
        let lambda = state
            .qubit(r)
            .classification()
            .and_then(|c| c.eigenvalue(letter))
            .ok_or_else(|| {
                IccrError::AncillaEntangled(format!(
                    "image of Z_A acts with {} on non-eigenstate qubit {}",
                    letter.letter(),
                    r + 1
                ))
            })?;
        fix.extend(rotation_to_z(letter, r));
        fix.push(GateRecord::cx(r, a));
        fix.extend(rotation_from_z(letter, r));
        if lambda < 0 {
            fix.push(GateRecord::x(a));
        }
    }
    u.prepend(&fix)?;

    let ximg = u.x_image(a);
    let controlled: Vec<GateRecord> = ximg
        .support()
        .into_iter()
        .filter(|&i| i != a)
        .map(|i| {
            let kind = match ximg.get(i) {
                Pauli::X => GateKind::CX,
                Pauli::Y => GateKind::CY,
                _ => GateKind::CZ,
            };
            GateRecord::two(kind, a, i)
        })
        .collect();
    u.prepend(&controlled)?;

    u.drop_qubit(a)?;
    state.remove(a)?;
    Ok(())
}
