use std::f64::consts::FRAC_1_SQRT_2;

use super::GateKind;
use crate::{CMatrix, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// 2×2 matrix of a single-qubit gate; `None` for two-qubit kinds.
pub(crate) fn single_qubit_matrix(kind: &GateKind) -> Option<[[C64; 2]; 2]> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    Some(match *kind {
        GateKind::H => [[h, h], [h, -h]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::Rx(t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
        }
        GateKind::Ry(t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
        }
        GateKind::Rz(t) => [
            [C64::from_polar(1.0, -t / 2.0), ZERO],
            [ZERO, C64::from_polar(1.0, t / 2.0)],
        ],
        GateKind::Cnot | GateKind::Cz | GateKind::Rzz(_) => return None,
    })
}

/// Dense matrix of a gate. For two-qubit gates local index bit 0 is the
/// gate's first wire (the control of `Cnot`).
pub fn gate_matrix(kind: &GateKind) -> CMatrix {
    if let Some(m) = single_qubit_matrix(kind) {
        return CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
    }
    let mut m = CMatrix::zeros(4, 4);
    match *kind {
        GateKind::Cnot => {
            for l in 0..4usize {
                let out = if l & 1 == 1 { l ^ 2 } else { l };
                m[(out, l)] = ONE;
            }
        }
        GateKind::Cz => {
            for l in 0..4 {
                m[(l, l)] = if l == 3 { -ONE } else { ONE };
            }
        }
        GateKind::Rzz(t) => {
            for l in 0..4usize {
                let parity = (l ^ (l >> 1)) & 1;
                let phase = if parity == 0 { -t / 2.0 } else { t / 2.0 };
                m[(l, l)] = C64::from_polar(1.0, phase);
            }
        }
        _ => unreachable!(),
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_unitary(m: &CMatrix) -> bool {
        let n = m.nrows();
        (m.adjoint() * m - CMatrix::identity(n, n)).norm() < 1e-12
    }

    #[test]
    fn all_gates_unitary() {
        let kinds = [
            GateKind::H,
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::S,
            GateKind::Sdg,
            GateKind::Rx(0.3),
            GateKind::Ry(-1.1),
            GateKind::Rz(2.0),
            GateKind::Cnot,
            GateKind::Cz,
            GateKind::Rzz(0.7),
        ];
        for k in kinds {
            assert!(is_unitary(&gate_matrix(&k)), "{k:?}");
        }
    }

    #[test]
    fn rotation_conventions() {
        // RX(θ) = cos(θ/2) 1 - i sin(θ/2) X
        let t = 0.9;
        let x = gate_matrix(&GateKind::X);
        let expect = CMatrix::identity(2, 2) * C64::new((t / 2.0f64).cos(), 0.0)
            - x * C64::new(0.0, (t / 2.0f64).sin());
        assert!((gate_matrix(&GateKind::Rx(t)) - expect).norm() < 1e-14);
        // RZZ(θ) = exp(-iθ/2 Z⊗Z): |00⟩ picks up exp(-iθ/2)
        let rzz = gate_matrix(&GateKind::Rzz(t));
        assert!((rzz[(0, 0)] - C64::from_polar(1.0, -t / 2.0)).norm() < 1e-14);
        assert!((rzz[(1, 1)] - C64::from_polar(1.0, t / 2.0)).norm() < 1e-14);
    }
}
