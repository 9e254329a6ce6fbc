//! Clifford tableaux, exact uniform sampling and the second-moment check.
//!
//! A tableau on `k` qubits stores the images of the generators under
//! conjugation `P ↦ U P U†`. Row `i < k` is the image of `X_i`, row `k + i` the
//! image of `Z_i`. Each row packs a Pauli string into a `u32`: bits `0..k` are
//! the X part, bits `k..2k` the Z part. The string `(x, z)` denotes the
//! Hermitian operator `i^{|x∧z|} X^x Z^z`, and a set phase bit negates it.
//!
//! The randomized channel only relies on the Clifford group being a unitary
//! 2-design, which is what [`verify_2design`] checks. The stronger 3-design
//! property is not tested.

use rand::Rng;
use thiserror::Error;

use crate::config::{MAX_CLIFFORD_QUBITS, MAX_CLIFFORD_UNITARY_QUBITS};
use crate::{CMatrix, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliffordError {
    #[error("clifford register of {k} qubits outside 1..={max}")]
    QubitsOutOfRange { k: usize, max: usize },
    #[error("tableau rows violate the symplectic condition")]
    NotSymplectic,
    #[error("tableau needs {expected} rows and phases, got {got}")]
    Shape { expected: usize, got: usize },
}

/// `⟨a, b⟩` of the standard symplectic form over GF(2).
pub fn symplectic_product(a: u32, b: u32, k: usize) -> u32 {
    let mask = (1u32 << k) - 1;
    let (ax, az) = (a & mask, a >> k);
    let (bx, bz) = (b & mask, b >> k);
    ((ax & bz) ^ (az & bx)).count_ones() & 1
}

/// `i^phase X^x Z^z` on `k` qubits; `phase` is taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOp {
    pub x: u32,
    pub z: u32,
    pub phase: u8,
}

impl PauliOp {
    pub fn identity() -> PauliOp {
        PauliOp { x: 0, z: 0, phase: 0 }
    }

    /// The Hermitian string `i^{|x∧z|} X^x Z^z`, negated when `negate` is set.
    pub fn hermitian(x: u32, z: u32, negate: bool) -> PauliOp {
        let phase = (x & z).count_ones() as u8 + if negate { 2 } else { 0 };
        PauliOp { x, z, phase: phase % 4 }
    }

    fn scalar(&self) -> C64 {
        [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ][self.phase as usize % 4]
    }

    /// Applies the operator to a state vector of length `2^k`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let s = self.scalar();
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (b, &a) in v.iter().enumerate() {
            let sign = if (self.z as usize & b).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            out[b ^ self.x as usize] = s * a * sign;
        }
        out
    }

    pub fn matrix(&self, k: usize) -> CMatrix {
        let d = 1usize << k;
        let mut m = CMatrix::zeros(d, d);
        for b in 0..d {
            let mut e = vec![C64::new(0.0, 0.0); d];
            e[b] = C64::new(1.0, 0.0);
            for (r, v) in self.apply(&e).into_iter().enumerate() {
                m[(r, b)] = v;
            }
        }
        m
    }
}

impl std::ops::Mul for PauliOp {
    type Output = PauliOp;

    fn mul(self, o: PauliOp) -> PauliOp {
        let swap = 2 * ((self.z & o.x).count_ones() as u8 & 1);
        PauliOp {
            x: self.x ^ o.x,
            z: self.z ^ o.z,
            phase: (self.phase + o.phase + swap) % 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    k: usize,
    rows: Vec<u32>,
    phases: Vec<bool>,
}

fn check_k(k: usize, max: usize) -> Result<(), CliffordError> {
    if k == 0 || k > max {
        return Err(CliffordError::QubitsOutOfRange { k, max });
    }
    Ok(())
}

impl CliffordTableau {
    pub fn identity(k: usize) -> Result<CliffordTableau, CliffordError> {
        check_k(k, MAX_CLIFFORD_QUBITS)?;
        let rows = (0..2 * k).map(|i| 1u32 << i).collect();
        Ok(CliffordTableau {
            k,
            rows,
            phases: vec![false; 2 * k],
        })
    }

    pub fn from_rows(k: usize, rows: Vec<u32>, phases: Vec<bool>) -> Result<CliffordTableau, CliffordError> {
        check_k(k, MAX_CLIFFORD_QUBITS)?;
        for len in [rows.len(), phases.len()] {
            if len != 2 * k {
                return Err(CliffordError::Shape {
                    expected: 2 * k,
                    got: len,
                });
            }
        }
        let t = CliffordTableau { k, rows, phases };
        if !t.is_symplectic() {
            return Err(CliffordError::NotSymplectic);
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn phases(&self) -> &[bool] {
        &self.phases
    }

    /// `S Ω Sᵀ = Ω` checked row by row.
    pub fn is_symplectic(&self) -> bool {
        let k = self.k;
        let limit = 1u64 << (2 * k);
        if self.rows.iter().any(|&r| r as u64 >= limit) {
            return false;
        }
        (0..2 * k).all(|i| {
            (0..2 * k).all(|j| {
                let expected = u32::from(i + k == j || j + k == i);
                symplectic_product(self.rows[i], self.rows[j], k) == expected
            })
        })
    }

    /// `U X_i U†` for `i < k`, `U Z_{i-k} U†` otherwise.
    pub fn generator_image(&self, i: usize) -> PauliOp {
        let mask = (1u32 << self.k) - 1;
        let r = self.rows[i];
        PauliOp::hermitian(r & mask, r >> self.k, self.phases[i])
    }

    /// `U P U†` as prescribed by the tableau.
    pub fn conjugate(&self, p: &PauliOp) -> PauliOp {
        let mut out = PauliOp {
            x: 0,
            z: 0,
            phase: p.phase,
        };
        for j in 0..self.k {
            if (p.x >> j) & 1 == 1 {
                out = out * self.generator_image(j);
            }
        }
        for j in 0..self.k {
            if (p.z >> j) & 1 == 1 {
                out = out * self.generator_image(self.k + j);
            }
        }
        out
    }

    /// A unitary realising the tableau, fixed up to global phase.
    pub fn to_unitary(&self) -> Result<CMatrix, CliffordError> {
        tableau_to_unitary(self)
    }
}

/// Projects `x` onto the symplectic complement of the listed hyperbolic pairs.
fn project(mut x: u32, pairs: &[(u32, u32)], k: usize) -> u32 {
    for &(v, w) in pairs {
        let xv = symplectic_product(x, v, k);
        let xw = symplectic_product(x, w, k);
        if xw == 1 {
            x ^= v;
        }
        if xv == 1 {
            x ^= w;
        }
    }
    x
}

/// Draws a tableau uniformly from the `k`-qubit Clifford group modulo global
/// phase: a uniform symplectic basis followed by uniform phase bits.
pub fn sample_uniform_clifford<R: Rng + ?Sized>(
    k: usize,
    rng: &mut R,
) -> Result<CliffordTableau, CliffordError> {
    check_k(k, MAX_CLIFFORD_QUBITS)?;
    let full = (1u64 << (2 * k)) as u32;
    let draw = |rng: &mut R| -> u32 {
        if 2 * k == 32 {
            rng.gen()
        } else {
            rng.gen_range(0..full)
        }
    };
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(k);
    for _ in 0..k {
        let v = loop {
            let v = project(draw(rng), &pairs, k);
            if v != 0 {
                break v;
            }
        };
        let w = loop {
            let w = project(draw(rng), &pairs, k);
            if symplectic_product(v, w, k) == 1 {
                break w;
            }
        };
        pairs.push((v, w));
    }
    let mut rows = vec![0u32; 2 * k];
    for (j, &(v, w)) in pairs.iter().enumerate() {
        rows[j] = v;
        rows[k + j] = w;
    }
    let phases = (0..2 * k).map(|_| rng.gen::<bool>()).collect();
    Ok(CliffordTableau { k, rows, phases })
}

/// Every element of the `k`-qubit Clifford group modulo global phase
/// (24 for `k = 1`, 11520 for `k = 2`).
pub fn enumerate_cliffords(k: usize) -> Result<Vec<CliffordTableau>, CliffordError> {
    check_k(k, 2)?;
    let mut bases = Vec::new();
    let mut current = Vec::new();
    extend_bases(k, &mut current, &mut bases);
    let mut out = Vec::with_capacity(bases.len() << (2 * k));
    for pairs in bases {
        let mut rows = vec![0u32; 2 * k];
        for (j, &(v, w)) in pairs.iter().enumerate() {
            rows[j] = v;
            rows[k + j] = w;
        }
        for bits in 0..1u32 << (2 * k) {
            let phases = (0..2 * k).map(|i| (bits >> i) & 1 == 1).collect();
            out.push(CliffordTableau {
                k,
                rows: rows.clone(),
                phases,
            });
        }
    }
    Ok(out)
}

fn extend_bases(k: usize, current: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    let full = 1u32 << (2 * k);
    let orthogonal = |x: u32, cur: &[(u32, u32)]| {
        cur.iter()
            .all(|&(v, w)| symplectic_product(x, v, k) == 0 && symplectic_product(x, w, k) == 0)
    };
    for v in 1..full {
        if !orthogonal(v, current) {
            continue;
        }
        for w in 1..full {
            if symplectic_product(v, w, k) == 1 && orthogonal(w, current) {
                current.push((v, w));
                extend_bases(k, current, out);
                current.pop();
            }
        }
    }
}

/// Dense unitary `U` with `U P U† = t.conjugate(P)` for every Pauli `P`.
/// Debug builds verify the generator images on every call.
pub fn tableau_to_unitary(t: &CliffordTableau) -> Result<CMatrix, CliffordError> {
    let k = t.k;
    check_k(k, MAX_CLIFFORD_UNITARY_QUBITS)?;
    let d = 1usize << k;

    // U|0⟩ is the joint +1 eigenvector of the images of Z_j.
    let stabilizers: Vec<PauliOp> = (0..k).map(|j| t.generator_image(k + j)).collect();
    let project_all = |mut v: Vec<C64>| {
        for s in &stabilizers {
            let sv = s.apply(&v);
            for (a, b) in v.iter_mut().zip(sv) {
                *a = (*a + b) * 0.5;
            }
        }
        v
    };
    let mut psi0 = None;
    let mut best: Option<(f64, Vec<C64>)> = None;
    for i in 0..d {
        let mut e = vec![C64::new(0.0, 0.0); d];
        e[i] = C64::new(1.0, 0.0);
        let v = project_all(e);
        let n2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if n2 > 0.5 / d as f64 {
            psi0 = Some((n2, v));
            break;
        }
        if best.as_ref().is_none_or(|(b, _)| n2 > *b) {
            best = Some((n2, v));
        }
    }
    let (n2, psi0) = psi0.or(best).expect("non-empty register");
    let norm = n2.sqrt();
    let psi0: Vec<C64> = psi0.into_iter().map(|a| a / norm).collect();

    let mut u = CMatrix::zeros(d, d);
    for x in 0..d {
        let mut col = psi0.clone();
        for j in 0..k {
            if (x >> j) & 1 == 1 {
                col = t.generator_image(j).apply(&col);
            }
        }
        u.set_column(x, &nalgebra::DVector::from_vec(col));
    }

    #[cfg(debug_assertions)]
    debug_check_conjugation(t, &u);

    Ok(u)
}

/// Checks `U G = image(G) U` for every generator `G`. Paulis are monomial, so
/// both sides cost `O(d²)`.
#[cfg(debug_assertions)]
fn debug_check_conjugation(t: &CliffordTableau, u: &CMatrix) {
    let k = t.k;
    let d = 1usize << k;
    for g in 0..2 * k {
        let gen = if g < k {
            PauliOp { x: 1 << g, z: 0, phase: 0 }
        } else {
            PauliOp { x: 0, z: 1 << (g - k), phase: 0 }
        };
        let image = t.generator_image(g);
        for b in 0..d {
            let mut e = vec![C64::new(0.0, 0.0); d];
            e[b] = C64::new(1.0, 0.0);
            let ge = gen.apply(&e);
            let (c, coeff) = ge
                .iter()
                .enumerate()
                .find(|(_, a)| a.norm_sqr() > 0.5)
                .map(|(c, a)| (c, *a))
                .expect("pauli column");
            let lhs: Vec<C64> = u.column(c).iter().map(|a| a * coeff).collect();
            let col: Vec<C64> = u.column(b).iter().copied().collect();
            let rhs = image.apply(&col);
            let err: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(err.sqrt() < 1e-9, "tableau_to_unitary conjugation mismatch");
        }
    }
}

/// Whether `‖U†U − 1‖_max ≤ tol`.
pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    let d = u.nrows();
    let prod = u.adjoint() * u;
    (0..d).all(|i| {
        (0..d).all(|j| {
            let target = if i == j { 1.0 } else { 0.0 };
            (prod[(i, j)] - C64::new(target, 0.0)).norm() <= tol
        })
    })
}

/// How the second moment is averaged in [`verify_2design`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignMode {
    /// Average over the whole group (`k ≤ 2`).
    Exhaustive,
    /// Average over `samples` uniform draws from the given seed.
    Sampled { samples: usize, seed: u64 },
}

/// Frobenius distance between `avg_U Σ_j (U|j⟩⟨j|U†)^{⊗2}` and the Haar value
/// `(𝟙⊗𝟙 + W)/(d+1)`, with `W` the swap.
pub fn verify_2design(k: usize, mode: DesignMode) -> Result<f64, CliffordError> {
    check_k(k, MAX_CLIFFORD_UNITARY_QUBITS)?;
    let unitaries: Vec<CMatrix> = match mode {
        DesignMode::Exhaustive => enumerate_cliffords(k)?
            .iter()
            .map(tableau_to_unitary)
            .collect::<Result<_, _>>()?,
        DesignMode::Sampled { samples, seed } => {
            let mut rng = crate::rng::stream(seed, 0);
            (0..samples)
                .map(|_| sample_uniform_clifford(k, &mut rng).and_then(|t| tableau_to_unitary(&t)))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(second_moment_deviation(&unitaries))
}

/// The deviation of [`verify_2design`] for an arbitrary finite ensemble of
/// equal-weight `d × d` unitaries.
pub fn second_moment_deviation(ensemble: &[CMatrix]) -> f64 {
    assert!(!ensemble.is_empty(), "empty ensemble");
    let d = ensemble[0].nrows();
    let dd = d * d;
    let mut acc = CMatrix::zeros(dd, dd);
    let mut vv = vec![C64::new(0.0, 0.0); dd];
    for u in ensemble {
        for j in 0..d {
            let col = u.column(j);
            for a in 0..d {
                for b in 0..d {
                    vv[a * d + b] = col[a] * col[b];
                }
            }
            for r in 0..dd {
                for c in 0..dd {
                    acc[(r, c)] += vv[r] * vv[c].conj();
                }
            }
        }
    }
    acc /= C64::new(ensemble.len() as f64, 0.0);
    let mut target = CMatrix::zeros(dd, dd);
    let w = 1.0 / (d as f64 + 1.0);
    for a in 0..d {
        for b in 0..d {
            target[(a * d + b, a * d + b)] += C64::new(w, 0.0);
            target[(a * d + b, b * d + a)] += C64::new(w, 0.0);
        }
    }
    (acc - target).norm()
}
