// SPDX-License-Identifier: Apache-2.0

use fermicomm::clifford_core::{number_op, parity_op, SparseOperator};
use fermicomm::gaussian_group::{
    compile_gaussian, compile_pp_gaussian, creation_covariance_residual, majorana_covariance_residual, orthogonal_log,
    sample_gaussian_unitary, sample_orthogonal, sample_pp_gaussian_unitary, sample_unitary, slater_state, substream,
    OrthogonalMatrix, UnitaryMatrix, MAX_COMPILE_MODES,
};
use fermicomm::{Error, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn substreams_are_reproducible_and_distinct() {
    let a: Vec<u64> = (0..4).map(|_| substream(7, 3).random()).collect();
    let b: Vec<u64> = (0..4).map(|_| substream(7, 3).random()).collect();
    assert_eq!(a, b);
    let x: u64 = substream(7, 3).random();
    let y: u64 = substream(7, 4).random();
    let z: u64 = substream(8, 3).random();
    assert!(x != y && x != z);
}

#[test]
fn orthogonal_matrix_validation() {
    let mut reflection = DMatrix::<f64>::identity(2, 2);
    reflection[(0, 0)] = -1.0;
    assert!(matches!(OrthogonalMatrix::new(reflection), Err(Error::Domain(_))));
    assert!(OrthogonalMatrix::new(DMatrix::identity(3, 3)).is_err());
    assert!(OrthogonalMatrix::new(DMatrix::from_element(2, 2, 1.0)).is_err());
    let nonunitary = DMatrix::<C64>::from_element(2, 2, C64::new(1.0, 0.0));
    assert!(UnitaryMatrix::new(nonunitary).is_err());
}

#[test]
fn identity_compiles_to_identity() {
    let r = compile_gaussian(&OrthogonalMatrix::identity(3)).unwrap();
    assert!(r.distance(&SparseOperator::identity(8)).unwrap() < 1e-14);
    let r = compile_pp_gaussian(&UnitaryMatrix::identity(3)).unwrap();
    assert!(r.distance(&SparseOperator::identity(8)).unwrap() < 1e-14);
}

#[test]
fn compilation_is_capped() {
    let mut rng = substream(1, 0);
    let u = sample_orthogonal(MAX_COMPILE_MODES + 1, &mut rng).unwrap();
    assert!(matches!(compile_gaussian(&u), Err(Error::Resource(_))));
}

#[test]
fn slater_state_is_the_ordered_creation_string() {
    let psi = slater_state(4, &[2, 4]).unwrap();
    assert_eq!(psi.amplitudes()[0b0101], C64::new(1.0, 0.0));
    assert!(slater_state(4, &[5]).is_err());
    assert!(slater_state(0, &[]).is_err());
}

#[test]
fn haar_second_moments() {
    // E[O_11^2] = 1/(2n) on SO(2n) and E[|U_11|^2] = 1/n on U(n).
    let n = 2;
    let samples = 20_000;
    let mut rng = substream(99, 0);
    let mut so = Vec::with_capacity(samples);
    let mut un = Vec::with_capacity(samples);
    for _ in 0..samples {
        so.push(sample_orthogonal(n, &mut rng).unwrap().matrix()[(0, 0)].powi(2));
        un.push(sample_unitary(n, &mut rng).unwrap().matrix()[(0, 0)].norm_sqr());
    }
    for (values, target) in [(so, 1.0 / (2 * n) as f64), (un, 1.0 / n as f64)] {
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let se = (var / m).sqrt();
        assert!((mean - target).abs() < 4.0 * se, "mean {mean} target {target} se {se}");
    }
}

#[test]
fn compiled_unitaries_preserve_parity_and_number() {
    let mut rng = substream(4, 0);
    let n = 3;
    let (_, rg) = sample_gaussian_unitary(n, &mut rng).unwrap();
    let (_, rp) = sample_pp_gaussian_unitary(n, &mut rng).unwrap();
    assert!(rg.commutator(&parity_op(n).unwrap()).unwrap().frobenius_norm() < 1e-12);
    assert!(rp.commutator(&number_op(n).unwrap()).unwrap().frobenius_norm() < 1e-12);
    for r in [&rg, &rp] {
        let id = SparseOperator::identity(1 << n);
        assert!((&r.adjoint() * r).distance(&id).unwrap() < 1e-12);
    }
}

#[test]
fn compilation_is_a_projective_antihomomorphism() {
    // R(U1) R(U2) rotates c by U2 U1, so it equals R(U2 U1) up to sign.
    let mut rng = substream(21, 0);
    let n = 2;
    let u1 = sample_orthogonal(n, &mut rng).unwrap();
    let u2 = sample_orthogonal(n, &mut rng).unwrap();
    let (r1, r2) = (compile_gaussian(&u1).unwrap(), compile_gaussian(&u2).unwrap());
    let r21 = compile_gaussian(&u2.compose(&u1)).unwrap();
    let prod = &r1 * &r2;
    let d = prod.distance(&r21).unwrap().min(prod.distance(&r21.scale_real(-1.0)).unwrap());
    assert!(d < 1e-10, "distance {d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampled_orthogonal_matrices_are_special(seed in 0u64..10_000, n in 1usize..=4) {
        let u = sample_orthogonal(n, &mut substream(seed, 0)).unwrap();
        let m = u.matrix();
        prop_assert!((m.transpose() * m - DMatrix::identity(2 * n, 2 * n)).norm() < 1e-12);
        prop_assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn logarithm_exponentiates_back(seed in 0u64..10_000, n in 1usize..=3) {
        let u = sample_orthogonal(n, &mut substream(seed, 1)).unwrap();
        if let Ok(l) = orthogonal_log(&u) {
            prop_assert!((&l + l.transpose()).norm() < 1e-12);
            prop_assert!((l.exp() - u.matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn compiled_unitaries_rotate_majoranas(seed in 0u64..10_000, n in 1usize..=4) {
        let (u, r) = sample_gaussian_unitary(n, &mut substream(seed, 2)).unwrap();
        prop_assert!(majorana_covariance_residual(&u, &r).unwrap() < 1e-9);
    }

    #[test]
    fn compiled_unitaries_rotate_creators(seed in 0u64..10_000, n in 1usize..=4) {
        let (u, r) = sample_pp_gaussian_unitary(n, &mut substream(seed, 3)).unwrap();
        prop_assert!(creation_covariance_residual(&u, &r).unwrap() < 1e-9);
    }
}
