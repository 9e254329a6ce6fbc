use std::collections::HashMap;

use rand::Rng;

use super::{Circuit, CircuitOp, Eigen, Pauli, PrepSource, Result, SimError, Statevector};
use crate::CMatrix;

/// A concrete measure-and-prepare channel bound to a [`CircuitOp::ChannelSlot`]
/// for one shot.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelInstance {
    /// Measure in the basis `V|y⟩` and re-prepare `V|y⟩`.
    CliffordBasis { unitary: CMatrix },
    /// Discard the input and prepare the basis state `prepared`.
    Depolarize { prepared: u64 },
    /// One Pauli term per wire: measure in the eigenbasis of the Pauli, then
    /// prepare the labelled eigenstate. `Pauli::I` measures nothing and
    /// prepares `|0⟩` or `|1⟩`.
    Pauli(Vec<(Pauli, Eigen)>),
    Identity,
}

impl ChannelInstance {
    /// Upstream half. Returns the recorded outcome, bit `b` for `wires[b]`.
    pub fn measure_half<R: Rng + ?Sized>(
        &self,
        state: &mut Statevector,
        wires: &[usize],
        rng: &mut R,
    ) -> Result<u64> {
        match self {
            ChannelInstance::CliffordBasis { unitary } => {
                state.apply_unitary(wires, &unitary.adjoint())?;
                state.measure(wires, rng)
            }
            ChannelInstance::Depolarize { .. } => state.measure(wires, rng),
            ChannelInstance::Pauli(terms) => {
                check_width(terms.len(), wires)?;
                for (&(p, _), &w) in terms.iter().zip(wires) {
                    for g in p.measurement_basis_change() {
                        state.apply_kind(g, &[w]);
                    }
                }
                state.measure(wires, rng)
            }
            ChannelInstance::Identity => Ok(0),
        }
    }

    /// Downstream half: resets `wires` and prepares the output state given the
    /// upstream outcome.
    pub fn prepare_half<R: Rng + ?Sized>(
        &self,
        state: &mut Statevector,
        wires: &[usize],
        outcome: u64,
        rng: &mut R,
    ) -> Result<()> {
        match self {
            ChannelInstance::CliffordBasis { unitary } => {
                state.reset(wires, outcome, rng)?;
                state.apply_unitary(wires, unitary)
            }
            ChannelInstance::Depolarize { prepared } => state.reset(wires, *prepared, rng),
            ChannelInstance::Pauli(terms) => {
                check_width(terms.len(), wires)?;
                let bits: u64 = terms
                    .iter()
                    .enumerate()
                    .map(|(b, &(p, e))| if p == Pauli::I || p == Pauli::Z { e.bit() << b } else { 0 })
                    .sum();
                state.reset(wires, bits, rng)?;
                for (&(p, e), &w) in terms.iter().zip(wires) {
                    if p == Pauli::X || p == Pauli::Y {
                        if e == Eigen::Minus {
                            state.apply_kind(&super::GateKind::X, &[w]);
                        }
                        for g in p.preparation() {
                            state.apply_kind(g, &[w]);
                        }
                    }
                }
                Ok(())
            }
            ChannelInstance::Identity => Ok(()),
        }
    }

    /// Estimator sign carried by the measured outcome. Only Pauli terms have
    /// outcome-dependent signs.
    pub fn outcome_sign(&self, outcome: u64) -> f64 {
        match self {
            ChannelInstance::Pauli(terms) => terms
                .iter()
                .enumerate()
                .filter(|(_, (p, _))| *p != Pauli::I)
                .map(|(b, (_, e))| {
                    let o = if (outcome >> b) & 1 == 0 { 1.0 } else { -1.0 };
                    o * e.sign()
                })
                .product(),
            _ => 1.0,
        }
    }

    /// Measure then prepare on the same register.
    pub fn apply<R: Rng + ?Sized>(
        &self,
        state: &mut Statevector,
        wires: &[usize],
        rng: &mut R,
    ) -> Result<f64> {
        let y = self.measure_half(state, wires, rng)?;
        self.prepare_half(state, wires, y, rng)?;
        Ok(self.outcome_sign(y))
    }
}

fn check_width(terms: usize, wires: &[usize]) -> Result<()> {
    if terms != wires.len() {
        return Err(SimError::Arity {
            kind: "pauli term",
            expected: terms,
            got: wires.len(),
        });
    }
    Ok(())
}

/// Result of one Monte Carlo execution.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    /// Terminal computational-basis sample, bit `w` for wire `w`.
    pub bits: u64,
    /// Every non-terminal measurement outcome in execution order.
    pub mid: Vec<(String, u64)>,
    /// Product of channel outcome signs.
    pub sign: f64,
}

/// Executes `circuit` once, sampling every measurement and applying the bound
/// channel instance at each slot.
pub fn run_shot<R: Rng + ?Sized>(
    circuit: &Circuit,
    rng: &mut R,
    bindings: &HashMap<usize, ChannelInstance>,
) -> Result<ShotRecord> {
    let terminal = circuit.terminal_measurements();
    if terminal.iter().all(Option::is_none) {
        return Err(SimError::NoTerminalMeasurement);
    }
    if let Some(w) = terminal.iter().position(Option::is_none) {
        return Err(SimError::MissingTerminalMeasurement(w));
    }
    for op in circuit.ops() {
        if let CircuitOp::ChannelSlot { slot, .. } = op {
            if !bindings.contains_key(slot) {
                return Err(SimError::UnboundSlot(*slot));
            }
        }
    }

    let mut state = Statevector::zero(circuit.num_qubits())?;
    let mut recorded: HashMap<&str, u64> = HashMap::new();
    let mut record = ShotRecord {
        bits: 0,
        mid: Vec::new(),
        sign: 1.0,
    };
    for (i, op) in circuit.ops().iter().enumerate() {
        match op {
            CircuitOp::Gate(g) => state.apply_kind(&g.kind, &g.wires),
            CircuitOp::MeasureZ { wires, tag } => {
                let y = state.measure(wires, rng)?;
                let mut all_terminal = true;
                for (b, &w) in wires.iter().enumerate() {
                    if terminal[w] == Some(i) {
                        record.bits |= ((y >> b) & 1) << w;
                    } else {
                        all_terminal = false;
                    }
                }
                if !all_terminal {
                    record.mid.push((tag.clone(), y));
                }
                recorded.insert(tag.as_str(), y);
            }
            CircuitOp::PrepareBasis { wires, source } => {
                let bits = match source {
                    PrepSource::Fixed(b) => *b,
                    PrepSource::Recorded(tag) => *recorded
                        .get(tag.as_str())
                        .ok_or_else(|| SimError::UnknownTag(tag.clone()))?,
                };
                state.reset(wires, bits, rng)?;
            }
            CircuitOp::ChannelSlot { slot, wires } => {
                record.sign *= bindings[slot].apply(&mut state, wires, rng)?;
            }
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateKind;

    #[test]
    fn bell_outcomes_are_correlated() {
        let mut c = Circuit::new(2);
        c.gate(GateKind::H, &[0]).unwrap().gate(GateKind::Cnot, &[0, 1]).unwrap();
        c.measure_all("out").unwrap();
        let mut rng = crate::rng::stream(3, 0);
        let mut counts = [0usize; 4];
        for _ in 0..2000 {
            let r = run_shot(&c, &mut rng, &HashMap::new()).unwrap();
            counts[r.bits as usize] += 1;
        }
        assert_eq!(counts[1] + counts[2], 0);
        assert!(counts[0] > 800 && counts[3] > 800);
    }

    #[test]
    fn missing_measurement_is_an_error() {
        let mut c = Circuit::new(1);
        c.gate(GateKind::H, &[0]).unwrap();
        let mut rng = crate::rng::stream(0, 0);
        let err = run_shot(&c, &mut rng, &HashMap::new()).unwrap_err();
        assert_eq!(err.to_string(), "no terminal measurement");
    }

    #[test]
    fn measure_then_prepare_same_outcome_is_idempotent() {
        let mut c = Circuit::new(2);
        c.gate(GateKind::X, &[1]).unwrap();
        c.push(CircuitOp::MeasureZ { wires: vec![0, 1], tag: "m".into() }).unwrap();
        c.push(CircuitOp::PrepareBasis {
            wires: vec![0, 1],
            source: PrepSource::Recorded("m".into()),
        })
        .unwrap();
        c.measure_all("out").unwrap();
        let mut rng = crate::rng::stream(0, 0);
        for _ in 0..20 {
            let r = run_shot(&c, &mut rng, &HashMap::new()).unwrap();
            assert_eq!(r.bits, 0b10);
            assert_eq!(r.mid, vec![("m".to_string(), 0b10)]);
        }
    }

    #[test]
    fn unbound_slot_is_an_error() {
        let mut c = Circuit::new(1);
        c.push(CircuitOp::ChannelSlot { slot: 4, wires: vec![0] }).unwrap();
        c.measure_all("out").unwrap();
        let mut rng = crate::rng::stream(0, 0);
        assert_eq!(
            run_shot(&c, &mut rng, &HashMap::new()),
            Err(SimError::UnboundSlot(4))
        );
    }

    #[test]
    fn pauli_instance_on_plus_state() {
        // X term with + label on |+⟩ always records o = +1
        let inst = ChannelInstance::Pauli(vec![(Pauli::X, Eigen::Plus)]);
        let mut rng = crate::rng::stream(9, 0);
        for _ in 0..20 {
            let mut s = Statevector::zero(1).unwrap();
            s.apply_kind(&GateKind::H, &[0]);
            assert_eq!(inst.apply(&mut s, &[0], &mut rng).unwrap(), 1.0);
            // re-prepared |+⟩
            assert!((s.probabilities()[0] - 0.5).abs() < 1e-12);
        }
    }
}
