use serde::{Deserialize, Serialize};

use super::GateKind;
use crate::{CMatrix, C64};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Eigenvalue label of a Pauli eigenstate. For `Pauli::I` it selects `|0⟩`
/// (`Plus`) or `|1⟩` (`Minus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Eigen {
    Plus,
    Minus,
}

impl Eigen {
    pub fn sign(self) -> f64 {
        match self {
            Eigen::Plus => 1.0,
            Eigen::Minus => -1.0,
        }
    }

    /// Computational-basis bit that maps to this eigenstate under
    /// [`Pauli::preparation`].
    pub fn bit(self) -> u64 {
        match self {
            Eigen::Plus => 0,
            Eigen::Minus => 1,
        }
    }
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let v = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        CMatrix::from_row_slice(2, 2, &v)
    }

    /// Gates that rotate this Pauli's eigenbasis onto the computational basis,
    /// in application order. Outcome bit 0 corresponds to eigenvalue +1.
    pub fn measurement_basis_change(self) -> &'static [GateKind] {
        match self {
            Pauli::I | Pauli::Z => &[],
            Pauli::X => &[GateKind::H],
            Pauli::Y => &[GateKind::Sdg, GateKind::H],
        }
    }

    /// Gates that map `|e.bit()⟩` to the eigenstate with eigenvalue `e`.
    pub fn preparation(self) -> &'static [GateKind] {
        match self {
            Pauli::I | Pauli::Z => &[],
            Pauli::X => &[GateKind::H],
            Pauli::Y => &[GateKind::H, GateKind::S],
        }
    }

    /// Projector onto the eigenstate prepared by [`Pauli::preparation`].
    pub fn eigenprojector(self, e: Eigen) -> CMatrix {
        let mut psi = nalgebra::DVector::from_element(2, C64::new(0.0, 0.0));
        psi[e.bit() as usize] = C64::new(1.0, 0.0);
        for g in self.preparation() {
            psi = super::gate_matrix(g) * psi;
        }
        &psi * psi.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenprojectors_match_eigenvalues() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            for e in [Eigen::Plus, Eigen::Minus] {
                let proj = p.eigenprojector(e);
                let lhs = p.matrix() * &proj;
                let rhs = &proj * C64::new(e.sign(), 0.0);
                assert!((lhs - rhs).norm() < 1e-12, "{p:?} {e:?}");
            }
        }
    }

    #[test]
    fn basis_change_undoes_preparation() {
        for p in Pauli::ALL {
            let mut m = CMatrix::identity(2, 2);
            for g in p.preparation() {
                m = super::super::gate_matrix(g) * m;
            }
            for g in p.measurement_basis_change() {
                m = super::super::gate_matrix(g) * m;
            }
            assert!((m - CMatrix::identity(2, 2)).norm() < 1e-12, "{p:?}");
        }
    }
}
