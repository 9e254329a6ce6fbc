use std::collections::HashMap;

use super::{CutError, CutMethod, CutPlan, Result};
use crate::channels::{psi0_superop, psi1_superop, Superoperator};
use crate::sim::{run_density, Circuit, CircuitOp, DiagonalObservable};

/// Largest number of groups enumerated exactly.
pub const MAX_EXACT_GROUPS: usize = 6;

/// The circuit with a [`CircuitOp::ChannelSlot`] (slot id = group index)
/// inserted at each group position.
pub fn modified_circuit(circuit: &Circuit, plan: &CutPlan) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.num_qubits());
    let groups = plan.groups();
    for (i, op) in circuit.ops().iter().enumerate() {
        for (gi, g) in groups.iter().enumerate() {
            if g.position == i {
                out.push(CircuitOp::ChannelSlot {
                    slot: gi,
                    wires: g.wires.clone(),
                })?;
            }
        }
        out.push(op.clone())?;
    }
    Ok(out)
}

fn check_randomized(plan: &CutPlan) -> Result<()> {
    if plan.groups().iter().any(|g| g.method != CutMethod::Randomized) {
        return Err(CutError::Unsupported(
            "exact cut evaluation supports the randomized method only",
        ));
    }
    if plan.groups().len() > MAX_EXACT_GROUPS {
        return Err(CutError::TooManyGroups {
            groups: plan.groups().len(),
            cap: MAX_EXACT_GROUPS,
        });
    }
    Ok(())
}

/// Runs the modified circuit for every `z ∈ {0,1}^ℓ` and hands the output
/// diagonal to `visit` with the signed weight `∏(d_j+1 or −d_j)` and the
/// probability `∏ Pr(z_j)`.
fn enumerate_z(
    circuit: &Circuit,
    plan: &CutPlan,
    mut visit: impl FnMut(f64, f64, &[f64]),
) -> Result<()> {
    check_randomized(plan)?;
    let modified = modified_circuit(circuit, plan)?;
    let dims: Vec<usize> = plan.groups().iter().map(|g| 1 << g.wires.len()).collect();
    let mut cache: HashMap<(usize, bool), Superoperator> = HashMap::new();
    for &d in &dims {
        cache.entry((d, false)).or_insert_with(|| psi0_superop(d));
        cache.entry((d, true)).or_insert_with(|| psi1_superop(d));
    }
    for z in 0..1u32 << dims.len() {
        let mut bindings = HashMap::new();
        let mut weight = 1.0;
        let mut prob = 1.0;
        for (j, &d) in dims.iter().enumerate() {
            let zj = (z >> j) & 1 == 1;
            let df = d as f64;
            bindings.insert(j, cache[&(d, zj)].clone());
            weight *= if zj { -df } else { df + 1.0 };
            prob *= if zj { df } else { df + 1.0 } / (2.0 * df + 1.0);
        }
        let rho = run_density(&modified, &bindings)?;
        visit(weight, prob, &rho.diagonal());
    }
    Ok(())
}

/// `Σ_z ∏_j w(z_j) · Tr(O_f N'_z(ρ0))`, the exact expectation of the cut
/// estimator.
pub fn exact_cut_expectation(circuit: &Circuit, plan: &CutPlan, obs: &DiagonalObservable) -> Result<f64> {
    let table = obs.table(circuit.num_qubits());
    let mut total = 0.0;
    enumerate_z(circuit, plan, |w, _, diag| {
        total += w * diag.iter().zip(&table).map(|(p, f)| p * f).sum::<f64>();
    })?;
    Ok(total)
}

/// `q̃(x) = E_z[q̃(x | z)]`, the output distribution of the cut circuit with
/// signs and scales discarded.
pub fn exact_qtilde(circuit: &Circuit, plan: &CutPlan) -> Result<Vec<f64>> {
    let mut q = vec![0.0; 1 << circuit.num_qubits()];
    enumerate_z(circuit, plan, |_, p, diag| {
        for (a, b) in q.iter_mut().zip(diag) {
            *a += p * b;
        }
    })?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutting::{plan_bipartition, CutGroup};
    use crate::sim::{exact_distribution, exact_expectation, GateKind};

    fn chain() -> Circuit {
        let mut c = Circuit::new(3);
        c.gate(GateKind::H, &[0]).unwrap();
        c.gate(GateKind::Ry(0.4), &[1]).unwrap();
        c.gate(GateKind::Cnot, &[0, 1]).unwrap();
        c.gate(GateKind::Rx(0.9), &[1]).unwrap();
        c.gate(GateKind::Rzz(0.7), &[1, 2]).unwrap();
        c.gate(GateKind::H, &[2]).unwrap();
        c.measure_all("terminal").unwrap();
        c
    }

    #[test]
    fn two_sequential_cuts_are_unbiased() {
        let c = chain();
        let groups = vec![
            CutGroup {
                position: 2,
                wires: vec![1],
                method: CutMethod::Randomized,
            },
            CutGroup {
                position: 4,
                wires: vec![1],
                method: CutMethod::Randomized,
            },
        ];
        let plan = CutPlan::from_groups(&c, groups).unwrap();
        let obs = DiagonalObservable::z_parity(&[0, 1, 2]);
        let exact = exact_expectation(&c, &obs).unwrap();
        let cut = exact_cut_expectation(&c, &plan, &obs).unwrap();
        assert!((exact - cut).abs() < 1e-10, "{exact} vs {cut}");
    }

    #[test]
    fn no_cuts_matches_uncut() {
        let c = chain();
        let plan = CutPlan::uncut(&c).unwrap();
        let obs = DiagonalObservable::z_parity(&[1]);
        let a = exact_expectation(&c, &obs).unwrap();
        let b = exact_cut_expectation(&c, &plan, &obs).unwrap();
        assert!((a - b).abs() < 1e-12);
        let q = exact_distribution(&c).unwrap();
        let qt = exact_qtilde(&c, &plan).unwrap();
        assert!(q.iter().zip(&qt).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn qtilde_is_normalised_and_dominates() {
        let mut c = Circuit::new(2);
        c.gate(GateKind::H, &[0]).unwrap().gate(GateKind::Cnot, &[0, 1]).unwrap();
        c.measure_all("terminal").unwrap();
        let plan = plan_bipartition(&c, &[0], &[0, 1], CutMethod::Randomized).unwrap();
        let qt = exact_qtilde(&c, &plan).unwrap();
        assert!((qt.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let q = exact_distribution(&c).unwrap();
        for (a, b) in qt.iter().zip(&q) {
            assert!(*a >= b / 5.0 - 1e-10);
        }
    }

    #[test]
    fn pauli_groups_are_rejected() {
        let c = chain();
        let plan = CutPlan::from_groups(
            &c,
            vec![CutGroup {
                position: 2,
                wires: vec![1],
                method: CutMethod::Pauli,
            }],
        )
        .unwrap();
        assert!(matches!(exact_qtilde(&c, &plan), Err(CutError::Unsupported(_))));
    }
}
