use rand::Rng;

use super::kernels::{apply_dense, apply_gate_kind};
use super::{Gate, GateKind, Result, SimError};
use crate::config::{SimLimits, NORM_TOL, ZERO_BRANCH_TOL};
use crate::{CMatrix, C64};

/// Pure state of `n` qubits as `2^n` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Statevector> {
        let cap = SimLimits::DEFAULT.statevector_qubits;
        if num_qubits > cap {
            return Err(SimError::CapExceeded {
                what: "statevector",
                qubits: num_qubits,
                cap,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Statevector { num_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Statevector> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(SimError::BadLength(len));
        }
        let sv = Statevector {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SimError::NormDrift(norm));
        }
        Ok(sv)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_wires(&self, wires: &[usize]) -> Result<()> {
        for &w in wires {
            if w >= self.num_qubits {
                return Err(SimError::WireOutOfRange {
                    wire: w,
                    num_qubits: self.num_qubits,
                });
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        self.check_wires(&gate.wires)?;
        if gate.kind.arity() != gate.wires.len() {
            return Err(SimError::Arity {
                kind: gate.kind.name(),
                expected: gate.kind.arity(),
                got: gate.wires.len(),
            });
        }
        apply_gate_kind(&mut self.amps, &gate.kind, &gate.wires, false);
        Ok(())
    }

    /// Applies `kind` to already-validated wires.
    pub(crate) fn apply_kind(&mut self, kind: &GateKind, wires: &[usize]) {
        apply_gate_kind(&mut self.amps, kind, wires, false);
    }

    /// Applies a dense unitary on `wires`; local bit `b` is `wires[b]`.
    pub fn apply_unitary(&mut self, wires: &[usize], u: &CMatrix) -> Result<()> {
        self.check_wires(wires)?;
        if u.nrows() != 1 << wires.len() {
            return Err(SimError::Arity {
                kind: "unitary",
                expected: u.nrows().trailing_zeros() as usize,
                got: wires.len(),
            });
        }
        apply_dense(&mut self.amps, wires, u);
        Ok(())
    }

    /// Joint Born-rule measurement of `wires`, collapsing the state.
    /// Bit `b` of the returned outcome is the result on `wires[b]`.
    pub fn measure<R: Rng + ?Sized>(&mut self, wires: &[usize], rng: &mut R) -> Result<u64> {
        self.check_wires(wires)?;
        let extract = |i: usize| -> usize {
            wires
                .iter()
                .enumerate()
                .map(|(b, &q)| ((i >> q) & 1) << b)
                .sum()
        };
        let mut probs = vec![0.0; 1 << wires.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[extract(i)] += a.norm_sqr();
        }
        let total: f64 = probs.iter().sum();
        let r = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = probs.len() - 1;
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                outcome = k;
                break;
            }
        }
        // rounding can leave the fallback on an empty branch
        while probs[outcome] <= 0.0 && outcome > 0 {
            outcome -= 1;
        }
        let p = probs[outcome];
        if p <= ZERO_BRANCH_TOL {
            return Err(SimError::ZeroProbabilityBranch(p));
        }
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if extract(i) == outcome {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(outcome as u64)
    }

    /// Resets `wires` to the computational basis state `bits` (bit `b` on
    /// `wires[b]`). The wires are measured first so the rest of the register
    /// keeps its reduced state.
    pub fn reset<R: Rng + ?Sized>(&mut self, wires: &[usize], bits: u64, rng: &mut R) -> Result<()> {
        let current = self.measure(wires, rng)?;
        let flip = current ^ bits;
        for (b, &q) in wires.iter().enumerate() {
            if (flip >> b) & 1 == 1 {
                self.apply_kind(&GateKind::X, &[q]);
            }
        }
        Ok(())
    }

    /// Samples all qubits without collapsing.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let r = rng.gen::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
            }
            acc += p;
            if r < acc {
                return i as u64;
            }
        }
        last_nonzero as u64
    }
}

/// Functional form of [`Statevector::apply`].
pub fn apply_gate(state: &Statevector, gate: &Gate) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn hadamard_on_zero() {
        let mut s = Statevector::zero(1).unwrap();
        s.apply(&Gate::new(GateKind::H, [0])).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn x_flips_and_rzz_is_phase_only() {
        let s = Statevector::zero(1).unwrap();
        let s = apply_gate(&s, &Gate::new(GateKind::X, [0])).unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 1.0]);

        let s = Statevector::zero(2).unwrap();
        let t = apply_gate(&s, &Gate::new(GateKind::Rzz(0.8), [0, 1])).unwrap();
        assert_eq!(t.probabilities(), s.probabilities());
        assert!((t.amplitudes()[0] - C64::from_polar(1.0, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn wire_out_of_range_is_rejected() {
        let mut s = Statevector::zero(2).unwrap();
        assert!(matches!(
            s.apply(&Gate::new(GateKind::H, [5])),
            Err(SimError::WireOutOfRange { wire: 5, .. })
        ));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            Statevector::zero(17),
            Err(SimError::CapExceeded { cap: 16, .. })
        ));
    }

    #[test]
    fn measure_collapses_and_reset_sets_bits() {
        let mut rng = crate::rng::stream(1, 0);
        let mut s = Statevector::zero(2).unwrap();
        s.apply(&Gate::new(GateKind::H, [0])).unwrap();
        s.apply(&Gate::new(GateKind::Cnot, [0, 1])).unwrap();
        let m = s.measure(&[0], &mut rng).unwrap();
        // Bell correlations survive the collapse
        let again = s.measure(&[1], &mut rng).unwrap();
        assert_eq!(m, again);
        s.reset(&[0, 1], 0b10, &mut rng).unwrap();
        assert!((s.probabilities()[0b10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_amplitudes_checks_norm() {
        let bad = vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        assert!(matches!(
            Statevector::from_amplitudes(bad),
            Err(SimError::NormDrift(_))
        ));
        assert!(matches!(
            Statevector::from_amplitudes(vec![C64::new(1.0, 0.0); 3]),
            Err(SimError::BadLength(3))
        ));
    }
}
