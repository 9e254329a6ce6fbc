use super::{Circuit, CircuitOp, DiagonalObservable, Result, SimError, Statevector};
use crate::config::SimLimits;

/// Pre-measurement state of a gate-only circuit; terminal measurements are
/// skipped.
pub fn final_state(circuit: &Circuit) -> Result<Statevector> {
    final_state_with_cap(circuit, SimLimits::DEFAULT.statevector_qubits)
}

fn final_state_with_cap(circuit: &Circuit, cap: usize) -> Result<Statevector> {
    let n = circuit.num_qubits();
    if n > cap {
        return Err(SimError::CapExceeded {
            what: "exact statevector",
            qubits: n,
            cap,
        });
    }
    if !circuit.is_unitary_with_readout() {
        return Err(SimError::Unsupported(
            "exact evaluation needs a gate-only circuit",
        ));
    }
    let mut state = Statevector::zero(n)?;
    for op in circuit.ops() {
        if let CircuitOp::Gate(g) = op {
            state.apply_kind(&g.kind, &g.wires);
        }
    }
    Ok(state)
}

/// Output distribution `q(x) = |⟨x|ψ⟩|²`.
pub fn exact_distribution(circuit: &Circuit) -> Result<Vec<f64>> {
    Ok(final_state(circuit)?.probabilities())
}

/// `Σ_x q(x) f(x)` under the default statevector cap.
pub fn exact_expectation(circuit: &Circuit, obs: &DiagonalObservable) -> Result<f64> {
    exact_expectation_with_cap(circuit, obs, SimLimits::DEFAULT.statevector_qubits)
}

pub fn exact_expectation_with_cap(
    circuit: &Circuit,
    obs: &DiagonalObservable,
    cap: usize,
) -> Result<f64> {
    let state = final_state_with_cap(circuit, cap)?;
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, a)| a.norm_sqr() * obs.evaluate(x as u64))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateKind;

    #[test]
    fn identity_circuit_zz_is_one() {
        let mut c = Circuit::new(2);
        c.measure_all("out").unwrap();
        let zz = DiagonalObservable::z_parity(&[0, 1]);
        assert_eq!(exact_expectation(&c, &zz).unwrap(), 1.0);
    }

    #[test]
    fn cap_and_channel_checks() {
        let c = Circuit::new(4);
        let zz = DiagonalObservable::z_parity(&[0]);
        assert!(matches!(
            exact_expectation_with_cap(&c, &zz, 3),
            Err(SimError::CapExceeded { cap: 3, .. })
        ));
        let mut c = Circuit::new(1);
        c.push(CircuitOp::ChannelSlot { slot: 0, wires: vec![0] }).unwrap();
        assert!(exact_expectation(&c, &zz).is_err());
    }

    #[test]
    fn distribution_sums_to_one() {
        let mut c = Circuit::new(3);
        c.gate(GateKind::H, &[0]).unwrap();
        c.gate(GateKind::Ry(0.3), &[2]).unwrap();
        c.gate(GateKind::Cnot, &[0, 1]).unwrap();
        let q = exact_distribution(&c).unwrap();
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
