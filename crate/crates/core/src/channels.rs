//! Measure-and-prepare channels and the two identity decompositions.
//!
//! Superoperators act on column-stacked operators: `vec(X)[i + d·j] = X[i, j]`,
//! so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. This is nalgebra's native column-major
//! layout.

use rand::Rng;
use thiserror::Error;

use crate::clifford::{enumerate_cliffords, sample_uniform_clifford, tableau_to_unitary, CliffordError};
use crate::sim::{Eigen, Pauli};
use crate::{CMatrix, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("dimension {0} is not 2^k for 1 <= k <= 5")]
    Dimension(usize),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// Largest register for which superoperators are formed explicitly.
pub const MAX_SUPEROP_QUBITS: usize = 5;

fn qubits_of(d: usize) -> Result<usize, ChannelError> {
    if !d.is_power_of_two() || !(2..=1 << MAX_SUPEROP_QUBITS).contains(&d) {
        return Err(ChannelError::Dimension(d));
    }
    Ok(d.trailing_zeros() as usize)
}

fn unvec(v: &[C64], d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v)
}

/// Linear map on `d × d` operators as a `d² × d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: CMatrix) -> Superoperator {
        assert_eq!(matrix.shape(), (dim * dim, dim * dim), "superoperator shape");
        Superoperator { dim, matrix }
    }

    /// Builds the matrix column by column from the action on `|i⟩⟨j|`.
    pub fn from_fn(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Superoperator {
        let dd = dim * dim;
        let mut matrix = CMatrix::zeros(dd, dd);
        for j in 0..dim {
            for i in 0..dim {
                let mut e = CMatrix::zeros(dim, dim);
                e[(i, j)] = C64::new(1.0, 0.0);
                let out = f(&e);
                matrix.column_mut(i + dim * j).copy_from_slice(out.as_slice());
            }
        }
        Superoperator { dim, matrix }
    }

    pub fn identity(dim: usize) -> Superoperator {
        Superoperator {
            dim,
            matrix: CMatrix::identity(dim * dim, dim * dim),
        }
    }

    /// `X ↦ U X U†`.
    pub fn unitary(u: &CMatrix) -> Superoperator {
        Superoperator {
            dim: u.nrows(),
            matrix: u.map(|a| a.conj()).kronecker(u),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let v = &self.matrix * nalgebra::DVector::from_column_slice(x.as_slice());
        unvec(v.as_slice(), self.dim)
    }

    pub fn scaled(&self, c: f64) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix * C64::new(c, 0.0),
        }
    }

    pub fn add(&self, other: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, other.dim, "superoperator dimensions differ");
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        }
    }

    /// `self` on the low-order subsystem, `other` on the high-order one,
    /// matching the local-bit order of multi-wire slots.
    pub fn tensor(&self, other: &Superoperator) -> Superoperator {
        let (da, db) = (self.dim, other.dim);
        Superoperator::from_fn(da * db, |x| {
            // x = |i⟩⟨j| with i = ia + da·ib
            let (mut i, mut j) = (0, 0);
            for c in 0..da * db {
                for r in 0..da * db {
                    if x[(r, c)].norm_sqr() > 0.0 {
                        i = r;
                        j = c;
                    }
                }
            }
            let mut ea = CMatrix::zeros(da, da);
            ea[(i % da, j % da)] = C64::new(1.0, 0.0);
            let mut eb = CMatrix::zeros(db, db);
            eb[(i / da, j / da)] = C64::new(1.0, 0.0);
            other.apply(&eb).kronecker(&self.apply(&ea))
        })
    }

    /// `‖⟨⟨𝟙| S − ⟨⟨𝟙|‖`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d = self.dim;
        let mut res = 0.0;
        for c in 0..d * d {
            let s: C64 = (0..d).map(|i| self.matrix[(i + d * i, c)]).sum();
            let target = if c % (d + 1) == 0 { 1.0 } else { 0.0 };
            res += (s - C64::new(target, 0.0)).norm_sqr();
        }
        res.sqrt()
    }

    /// `J = Σ_{ij} |i⟩⟨j| ⊗ S(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut j = CMatrix::zeros(d * d, d * d);
        for b in 0..d {
            for a in 0..d {
                let out = unvec(self.matrix.column(a + d * b).as_slice(), d);
                for c in 0..d {
                    for r in 0..d {
                        j[(a * d + r, b * d + c)] = out[(r, c)];
                    }
                }
            }
        }
        j
    }

    /// Smallest eigenvalue of the Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        self.choi()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn distance(&self, other: &Superoperator) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }
}

fn trace(x: &CMatrix) -> C64 {
    x.trace()
}

/// `X ↦ (Tr(X)𝟙 + X)/(d+1)`.
pub fn psi0_superop(d: usize) -> Superoperator {
    Superoperator::from_fn(d, |x| {
        (CMatrix::identity(d, d) * trace(x) + x) / C64::new(d as f64 + 1.0, 0.0)
    })
}

/// `X ↦ Tr(X)𝟙/d`.
pub fn psi1_superop(d: usize) -> Superoperator {
    Superoperator::from_fn(d, |x| CMatrix::identity(d, d) * trace(x) / C64::new(d as f64, 0.0))
}

/// `Σ_y vec(U|y⟩⟨y|U†) vec(U|y⟩⟨y|U†)†`: measure in the rotated basis and
/// re-prepare the rotated outcome.
pub fn clifford_measure_prepare(u: &CMatrix) -> Superoperator {
    let d = u.nrows();
    let mut m = CMatrix::zeros(d * d, d * d);
    for y in 0..d {
        let col = u.column(y);
        let proj = col * col.adjoint();
        let v = nalgebra::DVector::from_column_slice(proj.as_slice());
        m += &v * v.adjoint();
    }
    Superoperator { dim: d, matrix: m }
}

/// Average of [`clifford_measure_prepare`] over the whole Clifford group.
pub fn psi0_exhaustive(k: usize) -> Result<Superoperator, ChannelError> {
    let d = 1usize << k;
    let group = enumerate_cliffords(k)?;
    let mut acc = CMatrix::zeros(d * d, d * d);
    for t in &group {
        acc += clifford_measure_prepare(&tableau_to_unitary(t)?).matrix;
    }
    Ok(Superoperator {
        dim: d,
        matrix: acc / C64::new(group.len() as f64, 0.0),
    })
}

/// Monte Carlo average of [`clifford_measure_prepare`] over uniform draws.
pub fn psi0_sampled<R: Rng + ?Sized>(k: usize, samples: usize, rng: &mut R) -> Result<Superoperator, ChannelError> {
    let d = 1usize << k;
    let mut acc = CMatrix::zeros(d * d, d * d);
    for _ in 0..samples {
        let t = sample_uniform_clifford(k, rng)?;
        acc += clifford_measure_prepare(&tableau_to_unitary(&t)?).matrix;
    }
    Ok(Superoperator {
        dim: d,
        matrix: acc / C64::new(samples as f64, 0.0),
    })
}

/// What a term measures on its input.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// A fresh uniform Clifford `V` per use; measure in `V|y⟩`.
    RandomClifford,
    /// One Pauli eigenbasis per wire. `Pauli::I` wires are traced out and
    /// contribute no sign; other wires contribute their ±1 outcome.
    PauliBasis(Vec<Pauli>),
    /// Discard the input.
    TraceOnly,
}

/// What a term prepares on its output.
#[derive(Debug, Clone, PartialEq)]
pub enum PrepareSpec {
    /// `V|y⟩` for the recorded outcome `y` and the same `V`.
    CliffordRotatedOutcome,
    /// A uniformly random computational basis state.
    UniformRandomBasis,
    /// The labelled eigenstate of each wire's Pauli. For `Pauli::I` the label
    /// picks `|0⟩` (plus) or `|1⟩` (minus).
    PauliEigenstates(Vec<(Pauli, Eigen)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurePrepTerm {
    pub coefficient: f64,
    pub measure: MeasureSpec,
    pub prepare: PrepareSpec,
}

impl MeasurePrepTerm {
    /// The term's map (without its coefficient). For Pauli terms this includes
    /// the outcome sign, so it is a signed map rather than a channel.
    pub fn superop(&self, dim: usize) -> Result<Superoperator, ChannelError> {
        let k = qubits_of(dim)?;
        match (&self.measure, &self.prepare) {
            (MeasureSpec::RandomClifford, _) if k == 1 => psi0_exhaustive(1),
            (MeasureSpec::RandomClifford, _) => Ok(psi0_superop(dim)),
            (MeasureSpec::TraceOnly, PrepareSpec::UniformRandomBasis) => Ok(psi1_superop(dim)),
            (_, PrepareSpec::PauliEigenstates(labels)) => {
                let mut out: Option<Superoperator> = None;
                for &(p, e) in labels {
                    let s = pauli_term_superop(p, e);
                    out = Some(match out {
                        None => s,
                        Some(acc) => acc.tensor(&s),
                    });
                }
                Ok(out.expect("at least one wire"))
            }
            _ => Ok(psi1_superop(dim)),
        }
    }
}

/// Single-wire Pauli term: `X ↦ e·Tr(P X)·Π_e` for `P ≠ I`, and
/// `X ↦ Tr(X)|b⟩⟨b|` for `P = I`.
fn pauli_term_superop(p: Pauli, e: Eigen) -> Superoperator {
    match p {
        Pauli::I => {
            let b = e.bit() as usize;
            Superoperator::from_fn(2, |x| {
                let mut out = CMatrix::zeros(2, 2);
                out[(b, b)] = trace(x);
                out
            })
        }
        _ => {
            let pm = p.matrix();
            let proj = p.eigenprojector(e);
            Superoperator::from_fn(2, |x| &proj * (trace(&(&pm * x)) * e.sign()))
        }
    }
}

/// Signed list of measure-and-prepare terms reconstructing the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDecomposition {
    pub dim: usize,
    pub terms: Vec<MeasurePrepTerm>,
    pub one_norm: f64,
}

impl QuasiDecomposition {
    fn new(dim: usize, terms: Vec<MeasurePrepTerm>) -> QuasiDecomposition {
        let one_norm = terms.iter().map(|t| t.coefficient.abs()).sum();
        QuasiDecomposition {
            dim,
            terms,
            one_norm,
        }
    }

    pub fn reconstruct(&self) -> Result<Superoperator, ChannelError> {
        let mut acc = Superoperator::from_fn(self.dim, |_| CMatrix::zeros(self.dim, self.dim));
        for t in &self.terms {
            acc = acc.add(&t.superop(self.dim)?.scaled(t.coefficient));
        }
        Ok(acc)
    }
}

/// `id = (d+1)Ψ0 − dΨ1` on `k` wires.
pub fn randomized_decomposition(k: usize) -> Result<QuasiDecomposition, ChannelError> {
    if k == 0 || k > MAX_SUPEROP_QUBITS {
        return Err(ChannelError::Dimension(1 << k.min(31)));
    }
    let d = (1usize << k) as f64;
    Ok(QuasiDecomposition::new(
        1 << k,
        vec![
            MeasurePrepTerm {
                coefficient: d + 1.0,
                measure: MeasureSpec::RandomClifford,
                prepare: PrepareSpec::CliffordRotatedOutcome,
            },
            MeasurePrepTerm {
                coefficient: -d,
                measure: MeasureSpec::TraceOnly,
                prepare: PrepareSpec::UniformRandomBasis,
            },
        ],
    ))
}

/// The eight single-wire Pauli terms, all with coefficient `+1/2`.
pub fn pauli_decomposition() -> QuasiDecomposition {
    let mut terms = Vec::with_capacity(8);
    for p in Pauli::ALL {
        for e in [Eigen::Plus, Eigen::Minus] {
            terms.push(MeasurePrepTerm {
                coefficient: 0.5,
                measure: if p == Pauli::I {
                    MeasureSpec::TraceOnly
                } else {
                    MeasureSpec::PauliBasis(vec![p])
                },
                prepare: PrepareSpec::PauliEigenstates(vec![(p, e)]),
            });
        }
    }
    QuasiDecomposition::new(2, terms)
}

/// Term-by-term tensor power of [`pauli_decomposition`] over `k` wires.
pub fn pauli_decomposition_wires(k: usize) -> Result<QuasiDecomposition, ChannelError> {
    if k == 0 || k > MAX_SUPEROP_QUBITS {
        return Err(ChannelError::Dimension(1 << k.min(31)));
    }
    let single: Vec<(Pauli, Eigen)> = Pauli::ALL
        .iter()
        .flat_map(|&p| [(p, Eigen::Plus), (p, Eigen::Minus)])
        .collect();
    let mut labels: Vec<Vec<(Pauli, Eigen)>> = vec![Vec::new()];
    for _ in 0..k {
        labels = labels
            .into_iter()
            .flat_map(|l| {
                single.iter().map(move |&s| {
                    let mut l = l.clone();
                    l.push(s);
                    l
                })
            })
            .collect();
    }
    let terms = labels
        .into_iter()
        .map(|l| {
            let measure = if l.iter().all(|(p, _)| *p == Pauli::I) {
                MeasureSpec::TraceOnly
            } else {
                MeasureSpec::PauliBasis(l.iter().map(|(p, _)| *p).collect())
            };
            MeasurePrepTerm {
                coefficient: 0.5f64.powi(k as i32),
                measure,
                prepare: PrepareSpec::PauliEigenstates(l),
            }
        })
        .collect();
    Ok(QuasiDecomposition::new(1 << k, terms))
}

/// [`pauli_decomposition`] with the Y-basis minus term preparing the wrong
/// eigenstate. Used as a negative control by the self test.
pub fn corrupted_pauli_decomposition() -> QuasiDecomposition {
    let mut d = pauli_decomposition();
    for t in &mut d.terms {
        if t.prepare == PrepareSpec::PauliEigenstates(vec![(Pauli::Y, Eigen::Minus)]) {
            t.prepare = PrepareSpec::PauliEigenstates(vec![(Pauli::Y, Eigen::Plus)]);
        }
    }
    d
}

/// `‖Σ_i a_i S(Φ_i) − id‖_F`.
pub fn verify_identity(decomp: &QuasiDecomposition) -> Result<f64, ChannelError> {
    Ok(decomp
        .reconstruct()?
        .distance(&Superoperator::identity(decomp.dim)))
}

/// One draw from a decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledTerm<'a> {
    pub index: usize,
    pub term: &'a MeasurePrepTerm,
    pub scale: f64,
    pub sign: f64,
}

/// Picks term `i` with probability `|a_i| / one_norm`.
pub fn sample_term<'a, R: Rng + ?Sized>(decomp: &'a QuasiDecomposition, rng: &mut R) -> SampledTerm<'a> {
    let r = rng.gen::<f64>() * decomp.one_norm;
    let mut acc = 0.0;
    let mut index = decomp.terms.len() - 1;
    for (i, t) in decomp.terms.iter().enumerate() {
        acc += t.coefficient.abs();
        if r < acc {
            index = i;
            break;
        }
    }
    let term = &decomp.terms[index];
    SampledTerm {
        index,
        term,
        scale: decomp.one_norm,
        sign: term.coefficient.signum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_state(d: usize, i: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        m
    }

    #[test]
    fn column_stacking_round_trip() {
        let mut rng = crate::rng::stream(2, 0);
        let rand_mat = |rng: &mut crate::rng::StreamRng| {
            CMatrix::from_fn(3, 3, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        };
        let (a, b, x) = (rand_mat(&mut rng), rand_mat(&mut rng), rand_mat(&mut rng));
        let direct = &a * &x * &b;
        let s = Superoperator::new(3, b.transpose().kronecker(&a));
        assert!((s.apply(&x) - direct).norm() < 1e-12);
        let from_fn = Superoperator::from_fn(3, |y| &a * y * &b);
        assert!(from_fn.distance(&s) < 1e-12);
    }

    #[test]
    fn psi0_on_ground_state() {
        let out = psi0_superop(2).apply(&basis_state(2, 0));
        assert!((out[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((out[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
        let half = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!((psi0_superop(2).apply(&half) - &half).norm() < 1e-15);
    }

    #[test]
    fn psi1_values() {
        let s = psi1_superop(2);
        let half = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!((s.apply(&basis_state(2, 1)) - &half).norm() < 1e-15);
        assert!(s.apply(&Pauli::X.matrix()).norm() < 1e-15);
    }

    #[test]
    fn one_norms() {
        assert_eq!(randomized_decomposition(1).unwrap().one_norm, 5.0);
        assert_eq!(randomized_decomposition(2).unwrap().one_norm, 9.0);
        assert_eq!(pauli_decomposition().one_norm, 4.0);
        assert_eq!(pauli_decomposition_wires(2).unwrap().one_norm, 16.0);
    }

    #[test]
    fn channels_are_cptp() {
        for d in [2, 4] {
            for s in [psi0_superop(d), psi1_superop(d)] {
                assert!(s.trace_preservation_residual() < 1e-12);
                assert!(s.choi_min_eigenvalue() > -1e-9);
            }
        }
        // transpose map is trace preserving but not CP
        let t = Superoperator::from_fn(2, |x| x.transpose());
        assert!(t.choi_min_eigenvalue() < -0.5);
    }

    #[test]
    fn tensor_matches_kronecker_action() {
        let a = Superoperator::unitary(&Pauli::X.matrix());
        let b = psi1_superop(2);
        let ab = a.tensor(&b);
        // ρ = |0⟩⟨0| on the low qubit, |1⟩⟨1| on the high qubit
        let rho = basis_state(2, 1).kronecker(&basis_state(2, 0));
        let expected = b.apply(&basis_state(2, 1)).kronecker(&a.apply(&basis_state(2, 0)));
        assert!((ab.apply(&rho) - expected).norm() < 1e-15);
    }

    #[test]
    fn corrupted_table_fails() {
        assert!(verify_identity(&corrupted_pauli_decomposition()).unwrap() > 0.1);
    }

    #[test]
    fn sample_scale_and_sign() {
        let d = randomized_decomposition(1).unwrap();
        let mut rng = crate::rng::stream(0, 0);
        for _ in 0..100 {
            let s = sample_term(&d, &mut rng);
            assert_eq!(s.scale, 5.0);
            assert_eq!(s.sign, if s.index == 0 { 1.0 } else { -1.0 });
        }
    }
}
