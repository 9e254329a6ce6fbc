use std::collections::HashMap;

use nalgebra::DMatrix;

use super::kernels::{apply_dense, apply_gate_kind};
use super::{Circuit, CircuitOp, DiagonalObservable, GateKind, PrepSource, Result, SimError};
use crate::channels::Superoperator;
use crate::config::{SimLimits, DENSITY_TOL, PSD_TOL, TRACE_DRIFT_TOL};
use crate::{CMatrix, C64};

/// Mixed state on `n` qubits, stored column-stacked: entry `ρ[i, j]` lives at
/// `i + 2^n·j`. Row bits are the low `n` index bits, column bits the high `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    vec: Vec<C64>,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero(num_qubits: usize) -> Result<DensityMatrix> {
        let cap = SimLimits::DEFAULT.density_qubits;
        if num_qubits > cap {
            return Err(SimError::CapExceeded {
                what: "density matrix",
                qubits: num_qubits,
                cap,
            });
        }
        let mut vec = vec![C64::new(0.0, 0.0); 1 << (2 * num_qubits)];
        vec[0] = C64::new(1.0, 0.0);
        Ok(DensityMatrix { num_qubits, vec })
    }

    pub fn from_matrix(m: &CMatrix) -> Result<DensityMatrix> {
        let d = m.nrows();
        if !d.is_power_of_two() || m.ncols() != d {
            return Err(SimError::BadLength(d));
        }
        let rho = DensityMatrix {
            num_qubits: d.trailing_zeros() as usize,
            vec: m.as_slice().to_vec(),
        };
        rho.check_invariants()?;
        Ok(rho)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.vec[i + self.dim() * j]
    }

    pub fn matrix(&self) -> CMatrix {
        let d = self.dim();
        DMatrix::from_column_slice(d, d, &self.vec)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i).re).collect()
    }

    pub fn expectation(&self, obs: &DiagonalObservable) -> f64 {
        self.diagonal()
            .iter()
            .enumerate()
            .map(|(x, p)| p * obs.evaluate(x as u64))
            .sum()
    }

    /// Reduced state on `keep`, in the listed order.
    pub fn marginal(&self, keep: &[usize]) -> CMatrix {
        let n = self.num_qubits;
        let dk = 1 << keep.len();
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let spread = |local: usize, qs: &[usize]| -> usize {
            qs.iter()
                .enumerate()
                .map(|(b, &q)| ((local >> b) & 1) << q)
                .sum()
        };
        let mut out = CMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let ia = spread(a, keep);
                let ib = spread(b, keep);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..1usize << traced.len() {
                    let it = spread(t, &traced);
                    acc += self.entry(ia | it, ib | it);
                }
                out[(a, b)] = acc;
            }
        }
        out
    }

    /// Hermiticity, unit trace and eigenvalue floor.
    pub fn check_invariants(&self) -> Result<()> {
        let m = self.matrix();
        let herm = (&m - m.adjoint()).norm();
        if herm > DENSITY_TOL {
            return Err(SimError::Format(format!(
                "density matrix is not Hermitian (residual {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(SimError::NormDrift(tr.re));
        }
        let min = m
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min < PSD_TOL {
            return Err(SimError::Format(format!(
                "density matrix has eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    fn apply_gate(&mut self, kind: &GateKind, wires: &[usize]) {
        let n = self.num_qubits;
        apply_gate_kind(&mut self.vec, kind, wires, false);
        let cols: Vec<usize> = wires.iter().map(|w| w + n).collect();
        apply_gate_kind(&mut self.vec, kind, &cols, true);
    }

    fn superop_targets(&self, wires: &[usize]) -> Vec<usize> {
        let n = self.num_qubits;
        wires.iter().copied().chain(wires.iter().map(|w| w + n)).collect()
    }

    /// Applies a superoperator on `wires` (local bit `b` is `wires[b]`).
    pub fn apply_superop(&mut self, wires: &[usize], s: &Superoperator) {
        let targets = self.superop_targets(wires);
        apply_dense(&mut self.vec, &targets, s.matrix());
    }

    /// Removes coherences between computational basis states of `wires`.
    fn dephase(&mut self, wires: &[usize]) {
        let d = self.dim();
        let n = self.num_qubits;
        let mask: usize = wires.iter().map(|&w| 1 << w).sum();
        for (idx, v) in self.vec.iter_mut().enumerate() {
            let (i, j) = (idx % d, idx >> n);
            if (i ^ j) & mask != 0 {
                *v = C64::new(0.0, 0.0);
            }
        }
    }

    /// Traces out `wires` and replaces them with `|bits⟩`.
    fn reset(&mut self, wires: &[usize], bits: u64) {
        let d = self.dim();
        let mask: usize = wires.iter().map(|&w| 1 << w).sum();
        let target: usize = wires
            .iter()
            .enumerate()
            .map(|(b, &w)| (((bits >> b) & 1) as usize) << w)
            .sum();
        let mut out = vec![C64::new(0.0, 0.0); self.vec.len()];
        for j in 0..d {
            for i in 0..d {
                if (i ^ j) & mask != 0 {
                    continue;
                }
                let v = self.vec[i + d * j];
                let (ni, nj) = ((i & !mask) | target, (j & !mask) | target);
                out[ni + d * nj] += v;
            }
        }
        self.vec = out;
    }
}

/// Exact channel-level evaluation of `circuit` on `|0…0⟩⟨0…0|`: gates act by
/// conjugation, measurements dephase, preparations reset, and every slot is
/// replaced by its bound superoperator.
pub fn run_density(
    circuit: &Circuit,
    bindings: &HashMap<usize, Superoperator>,
) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::zero(circuit.num_qubits())?;
    for op in circuit.ops() {
        match op {
            CircuitOp::Gate(g) => rho.apply_gate(&g.kind, &g.wires),
            CircuitOp::MeasureZ { wires, .. } => rho.dephase(wires),
            CircuitOp::PrepareBasis {
                wires,
                source: PrepSource::Fixed(bits),
            } => rho.reset(wires, *bits),
            CircuitOp::PrepareBasis { .. } => {
                return Err(SimError::Unsupported(
                    "outcome-conditioned preparation on the density path",
                ))
            }
            CircuitOp::ChannelSlot { slot, wires } => {
                let s = bindings.get(slot).ok_or(SimError::UnboundSlot(*slot))?;
                if s.dim() != 1 << wires.len() {
                    return Err(SimError::BindingWidth {
                        slot: *slot,
                        expected: s.dim().trailing_zeros() as usize,
                        got: wires.len(),
                    });
                }
                let before = rho.trace();
                rho.apply_superop(wires, s);
                let drift = (rho.trace() - before).norm();
                if drift > TRACE_DRIFT_TOL {
                    return Err(SimError::NonTracePreserving {
                        slot: *slot,
                        drift,
                    });
                }
            }
        }
    }
    Ok(rho)
}
