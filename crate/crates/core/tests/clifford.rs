use std::collections::HashMap;

use wirecut::clifford::{
    enumerate_cliffords, is_unitary, sample_uniform_clifford, second_moment_deviation, tableau_to_unitary, PauliOp,
};
use wirecut::rng::stream;
use wirecut::{CMatrix, C64};

/// Pearson statistic against the uniform distribution over `classes` cells.
fn chi_square(counts: &HashMap<Vec<u32>, u64>, classes: usize, draws: u64) -> f64 {
    assert_eq!(counts.len(), classes, "unexpected number of classes");
    let expect = draws as f64 / classes as f64;
    counts.values().map(|&c| (c as f64 - expect).powi(2) / expect).sum()
}

/// Upper tail cut for a chi-square with `dof` degrees of freedom, about six
/// standard deviations above the mean.
fn chi_square_cut(dof: usize) -> f64 {
    dof as f64 + 6.0 * (2.0 * dof as f64).sqrt()
}

#[test]
fn samples_are_symplectic() {
    for k in 1..=3 {
        let mut rng = stream(1, k as u64);
        for _ in 0..10_000 {
            let t = sample_uniform_clifford(k, &mut rng).unwrap();
            assert!(t.is_symplectic(), "k={k}: {t:?}");
        }
    }
}

#[test]
fn sampled_unitaries_conjugate_paulis_as_the_tableau_says() {
    for k in 1..=3 {
        let mut rng = stream(2, k as u64);
        let full = 1u32 << k;
        for _ in 0..20 {
            let t = sample_uniform_clifford(k, &mut rng).unwrap();
            let u = tableau_to_unitary(&t).unwrap();
            assert!(is_unitary(&u, 1e-10));
            for x in 0..full {
                for z in 0..full {
                    if x == 0 && z == 0 {
                        continue;
                    }
                    let p = PauliOp::hermitian(x, z, false);
                    let lhs = &u * p.matrix(k) * u.adjoint();
                    let rhs = t.conjugate(&p).matrix(k);
                    assert!((lhs - rhs).norm() < 1e-10, "k={k} x={x} z={z}");
                }
            }
        }
    }
}

#[test]
fn single_qubit_draws_are_uniform_over_the_group() {
    let group = enumerate_cliffords(1).unwrap();
    assert_eq!(group.len(), 24);
    let draws = 48_000;
    let mut rng = stream(3, 0);
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for _ in 0..draws {
        let t = sample_uniform_clifford(1, &mut rng).unwrap();
        let key: Vec<u32> = t.rows().iter().copied().chain(t.phases().iter().map(|&b| b as u32)).collect();
        *counts.entry(key).or_default() += 1;
    }
    let stat = chi_square(&counts, 24, draws);
    assert!(stat < chi_square_cut(23), "chi-square {stat:.1}");
}

#[test]
fn two_qubit_generator_images_are_uniform() {
    // images of (X_0, Z_0) up to sign: 15 nontrivial strings times the 8 that
    // anticommute with each
    let draws = 120_000;
    let mut rng = stream(4, 0);
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for _ in 0..draws {
        let t = sample_uniform_clifford(2, &mut rng).unwrap();
        let (a, b) = (t.generator_image(0), t.generator_image(2));
        *counts.entry(vec![a.x, a.z, b.x, b.z]).or_default() += 1;
    }
    let stat = chi_square(&counts, 120, draws);
    assert!(stat < chi_square_cut(119), "chi-square {stat:.1}");
}

#[test]
fn two_qubit_group_conjugation_covers_every_pauli() {
    let group = enumerate_cliffords(2).unwrap();
    assert_eq!(group.len(), 11520);
    for x in 0..4u32 {
        for z in 0..4u32 {
            if x == 0 && z == 0 {
                continue;
            }
            let p = PauliOp::hermitian(x, z, false);
            let mut images: HashMap<(u32, u32, u8), usize> = HashMap::new();
            for t in &group {
                let q = t.conjugate(&p);
                *images.entry((q.x, q.z, q.phase)).or_default() += 1;
            }
            // every signed nontrivial Hermitian string, equally often
            assert_eq!(images.len(), 30, "x={x} z={z}");
            assert!(images.values().all(|&c| c == 11520 / 30));
        }
    }
}

#[test]
fn identity_and_hadamard_are_not_a_design() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)],
    );
    let dev = second_moment_deviation(&[CMatrix::identity(2, 2), h]);
    assert!(dev > 0.1, "deviation {dev}");
}
