//! In-place amplitude kernels. Qubit `q` is bit `q` of the amplitude index.

use super::gates::single_qubit_matrix;
use super::GateKind;
use crate::{CMatrix, C64};
use std::f64::consts::FRAC_1_SQRT_2;

pub fn apply_single(amps: &mut [C64], q: usize, m: &[[C64; 2]; 2]) {
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
            let (a0, a1) = (*x, *y);
            *x = m[0][0] * a0 + m[0][1] * a1;
            *y = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn pairs(amps: &mut [C64], q: usize, mut f: impl FnMut(&mut C64, &mut C64)) {
    let stride = 1usize << q;
    for chunk in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
            f(x, y);
        }
    }
}

/// `cos·a − i sin·b` with real arithmetic.
#[inline(always)]
fn rx_pair(c: f64, s: f64, x: &mut C64, y: &mut C64) {
    let (a, b) = (*x, *y);
    *x = C64::new(c * a.re + s * b.im, c * a.im - s * b.re);
    *y = C64::new(c * b.re + s * a.im, c * b.im - s * a.re);
}

/// Applies a dense `2^t × 2^t` matrix to the listed qubits. Local index bit
/// `b` corresponds to `targets[b]`.
pub fn apply_dense(amps: &mut [C64], targets: &[usize], m: &CMatrix) {
    let t = targets.len();
    let dim = 1usize << t;
    debug_assert_eq!(m.nrows(), dim);
    if t == 1 {
        let a = [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
        apply_single(amps, targets[0], &a);
        return;
    }
    let offsets: Vec<usize> = (0..dim)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|(b, _)| (l >> b) & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        })
        .collect();
    let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
    // row-major copy for a cache-friendly inner loop
    let rows: Vec<C64> = (0..dim)
        .flat_map(|r| (0..dim).map(move |c| (r, c)))
        .map(|(r, c)| m[(r, c)])
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &rows[r * dim..(r + 1) * dim];
            let mut acc = C64::new(0.0, 0.0);
            for (x, y) in row.iter().zip(&buf) {
                acc += x * y;
            }
            amps[base + off] = acc;
        }
    }
}

/// Applies a gate with wires already mapped onto local qubit positions.
/// `conj` applies the complex-conjugated gate, used for the column half of a
/// vectorised density matrix.
pub(crate) fn apply_gate_kind(amps: &mut [C64], kind: &GateKind, wires: &[usize], conj: bool) {
    match *kind {
        GateKind::H => {
            let h = FRAC_1_SQRT_2;
            return pairs(amps, wires[0], |x, y| {
                let (a, b) = (*x, *y);
                *x = (a + b) * h;
                *y = (a - b) * h;
            });
        }
        GateKind::X => return pairs(amps, wires[0], std::mem::swap),
        GateKind::Rx(t) => {
            let (s, c) = (t / 2.0).sin_cos();
            let s = if conj { -s } else { s };
            return pairs(amps, wires[0], |x, y| rx_pair(c, s, x, y));
        }
        _ => {}
    }
    if let Some(mut m) = single_qubit_matrix(kind) {
        if conj {
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v = v.conj();
                }
            }
        }
        apply_single(amps, wires[0], &m);
        return;
    }
    let a = 1usize << wires[0];
    let b = 1usize << wires[1];
    match *kind {
        GateKind::Cnot => {
            for i in 0..amps.len() {
                if i & a != 0 && i & b == 0 {
                    amps.swap(i, i | b);
                }
            }
        }
        GateKind::Cz => {
            for (i, v) in amps.iter_mut().enumerate() {
                if i & a != 0 && i & b != 0 {
                    *v = -*v;
                }
            }
        }
        GateKind::Rzz(t) => {
            let sign = if conj { -1.0 } else { 1.0 };
            let phase = [
                C64::from_polar(1.0, -sign * t / 2.0),
                C64::from_polar(1.0, sign * t / 2.0),
            ];
            let (qa, qb) = (wires[0], wires[1]);
            for (i, v) in amps.iter_mut().enumerate() {
                *v *= phase[((i >> qa) ^ (i >> qb)) & 1];
            }
        }
        _ => unreachable!("single-qubit kinds handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::super::gate_matrix;
    use super::*;

    fn random_amps(n: usize, seed: u64) -> Vec<C64> {
        use rand::Rng;
        let mut rng = crate::rng::stream(seed, 0);
        (0..1 << n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    /// Full-space matrix of a local gate, built by Kronecker placement.
    fn embed(m: &CMatrix, targets: &[usize], n: usize) -> CMatrix {
        let dim = 1 << n;
        let mut full = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let lc: usize = targets
                .iter()
                .enumerate()
                .map(|(b, &q)| ((col >> q) & 1) << b)
                .sum();
            let rest = col & !targets.iter().map(|&q| 1 << q).sum::<usize>();
            for lr in 0..m.nrows() {
                let row = rest
                    | targets
                        .iter()
                        .enumerate()
                        .map(|(b, &q)| ((lr >> b) & 1) << q)
                        .sum::<usize>();
                full[(row, col)] = m[(lr, lc)];
            }
        }
        full
    }

    #[test]
    fn kernels_match_embedded_matrices() {
        let n = 4;
        let cases: Vec<(GateKind, Vec<usize>)> = vec![
            (GateKind::H, vec![2]),
            (GateKind::Ry(0.4), vec![0]),
            (GateKind::Rx(0.9), vec![3]),
            (GateKind::X, vec![1]),
            (GateKind::S, vec![0]),
            (GateKind::Cnot, vec![3, 1]),
            (GateKind::Cz, vec![0, 2]),
            (GateKind::Rzz(1.3), vec![1, 3]),
        ];
        for (kind, wires) in cases {
            let psi = random_amps(n, 11);
            let mut fast = psi.clone();
            apply_gate_kind(&mut fast, &kind, &wires, false);
            let reference =
                embed(&gate_matrix(&kind), &wires, n) * nalgebra::DVector::from_vec(psi.clone());
            let mut dense = psi.clone();
            apply_dense(&mut dense, &wires, &gate_matrix(&kind));
            for i in 0..1 << n {
                assert!((fast[i] - reference[i]).norm() < 1e-12, "{kind:?}");
                assert!((dense[i] - reference[i]).norm() < 1e-12, "{kind:?}");
            }
        }
    }

    #[test]
    fn conjugated_kernels() {
        for (kind, wires) in [
            (GateKind::Rx(0.9), vec![2]),
            (GateKind::Ry(0.3), vec![1]),
            (GateKind::S, vec![0]),
            (GateKind::Rzz(1.1), vec![3, 0]),
        ] {
            let psi = random_amps(4, 4);
            let mut fast = psi.clone();
            apply_gate_kind(&mut fast, &kind, &wires, true);
            let mut dense = psi.clone();
            apply_dense(&mut dense, &wires, &gate_matrix(&kind).map(|v| v.conj()));
            for i in 0..psi.len() {
                assert!((fast[i] - dense[i]).norm() < 1e-12, "{kind:?}");
            }
        }
    }

    #[test]
    fn three_qubit_dense_kernel() {
        let n = 5;
        let mut rng = crate::rng::stream(5, 1);
        use rand::Rng;
        let m = CMatrix::from_fn(8, 8, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let targets = [4, 0, 2];
        let psi = random_amps(n, 3);
        let mut out = psi.clone();
        apply_dense(&mut out, &targets, &m);
        let reference = embed(&m, &targets, n) * nalgebra::DVector::from_vec(psi);
        for i in 0..1 << n {
            assert!((out[i] - reference[i]).norm() < 1e-12);
        }
    }
}
