// SPDX-License-Identifier: Apache-2.0

use fermicomm::clifford_core::{
    ladder, majorana, number_op, occupation_index, parity_op, pauli_string, Pauli, SparseOperator,
};
use fermicomm::{StateVector, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn majorana_matrices_on_one_mode() {
    let c1 = majorana(1, 1).unwrap().to_dense();
    let c2 = majorana(1, 2).unwrap().to_dense();
    assert_eq!(c1[(0, 1)], c(1.0, 0.0));
    assert_eq!(c1[(1, 0)], c(1.0, 0.0));
    assert_eq!(c2[(0, 1)], c(0.0, -1.0));
    assert_eq!(c2[(1, 0)], c(0.0, 1.0));
}

#[test]
fn majorana_carries_parity_string() {
    let expected = pauli_string(&[Pauli::Z, Pauli::Z, Pauli::Y]);
    assert_eq!(majorana(3, 6).unwrap(), expected);
}

#[test]
fn majorana_rejects_bad_indices() {
    assert!(majorana(2, 0).is_err());
    assert!(majorana(2, 5).is_err());
    assert!(majorana(0, 1).is_err());
    assert!(ladder(2, 3, true).is_err());
}

#[test]
fn creation_fills_the_vacuum() {
    let n = 3;
    let vac = StateVector::basis(1 << n, 0).unwrap();
    let psi = ladder(n, 2, true).unwrap().apply(&vac).unwrap();
    let target = occupation_index(n, &[2]).unwrap();
    assert_eq!(target, 0b010);
    assert!((psi.amplitudes()[target] - c(1.0, 0.0)).norm() < 1e-15);
    assert!((psi.norm() - 1.0).abs() < 1e-15);
}

#[test]
fn number_operator_is_sum_of_occupations() {
    let n = 3;
    let mut acc = SparseOperator::zero(1 << n);
    for p in 1..=n {
        let a = ladder(n, p, false).unwrap();
        let ad = ladder(n, p, true).unwrap();
        acc = &acc + &(&ad * &a);
    }
    assert!(acc.distance(&number_op(n).unwrap()).unwrap() < 1e-14);
}

#[test]
fn parity_anticommutes_with_majoranas() {
    let n = 3;
    let g = parity_op(n).unwrap();
    for mu in 1..=2 * n {
        let m = majorana(n, mu).unwrap();
        assert!(g.anticommutator(&m).unwrap().frobenius_norm() < 1e-14);
    }
}

#[test]
fn product_of_all_majoranas_is_parity_up_to_phase() {
    let n = 2;
    let mut prod = SparseOperator::identity(1 << n);
    for mu in 1..=2 * n {
        prod = &prod * &majorana(n, mu).unwrap();
    }
    // c_1 c_2 = i Z per mode, so the full product is (i)^n Z^n.
    let expected = parity_op(n).unwrap().scale(c(0.0, 1.0).powu(n as u32));
    assert!(prod.distance(&expected).unwrap() < 1e-14);
}

#[test]
fn dense_round_trip_and_trace() {
    let a =
        pauli_string(&[Pauli::X, Pauli::Y]).lin_comb(c(0.5, 0.0), &SparseOperator::identity(4), c(2.0, 1.0)).unwrap();
    let back = SparseOperator::from_dense(&a.to_dense()).unwrap();
    assert_eq!(a, back);
    assert!((a.trace() - c(8.0, 4.0)).norm() < 1e-14);
}

#[test]
fn shape_mismatch_is_a_domain_error() {
    let a = SparseOperator::identity(2);
    let b = SparseOperator::identity(4);
    assert!(matches!(a.try_mul(&b), Err(fermicomm::Error::Domain(_))));
    assert!(a.try_add(&b).is_err());
    assert!(a.apply(&StateVector::basis(4, 0).unwrap()).is_err());
}

#[test]
fn qubit_permutation_moves_factors() {
    let a = pauli_string(&[Pauli::X, Pauli::I, Pauli::Z]);
    let moved = a.permute_qubits(&[2, 0, 1]).unwrap();
    assert_eq!(moved, pauli_string(&[Pauli::I, Pauli::Z, Pauli::X]));
    assert!(a.permute_qubits(&[0, 0, 1]).is_err());
}

#[test]
fn tensor_power_matches_repeated_tensor() {
    let x = pauli_string(&[Pauli::Y]);
    assert_eq!(x.tensor_power(3), x.tensor(&x).tensor(&x));
    let psi = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    assert_eq!(psi.tensor_power(2), psi.tensor(&psi));
}

#[test]
fn occupation_index_validates() {
    assert_eq!(occupation_index(4, &[1, 4]).unwrap(), 0b1001);
    assert!(occupation_index(4, &[2, 2]).is_err());
    assert!(occupation_index(4, &[5]).is_err());
}

proptest! {
    #[test]
    fn majoranas_satisfy_clifford_relations(n in 1usize..=4, mu in 1usize..=8, nu in 1usize..=8) {
        prop_assume!(mu <= 2 * n && nu <= 2 * n);
        let a = majorana(n, mu).unwrap();
        let b = majorana(n, nu).unwrap();
        let anti = a.anticommutator(&b).unwrap();
        let expected = if mu == nu {
            SparseOperator::identity(1 << n).scale_real(2.0)
        } else {
            SparseOperator::zero(1 << n)
        };
        prop_assert!(anti.distance(&expected).unwrap() < 1e-14);
        prop_assert!(a.is_hermitian(1e-15));
    }

    #[test]
    fn ladders_satisfy_car(n in 1usize..=4, p in 1usize..=4, q in 1usize..=4) {
        prop_assume!(p <= n && q <= n);
        let ap = ladder(n, p, false).unwrap();
        let aqd = ladder(n, q, true).unwrap();
        let aq = ladder(n, q, false).unwrap();
        let id = SparseOperator::identity(1 << n);
        let expected = if p == q { id } else { SparseOperator::zero(1 << n) };
        prop_assert!(ap.anticommutator(&aqd).unwrap().distance(&expected).unwrap() < 1e-14);
        prop_assert!(ap.anticommutator(&aq).unwrap().frobenius_norm() < 1e-14);
        prop_assert!(aqd.distance(&aq.adjoint()).unwrap() < 1e-15);
    }

    #[test]
    fn hilbert_schmidt_inner_is_trace_of_product(
        xs in proptest::collection::vec(0u8..4, 2),
        ys in proptest::collection::vec(0u8..4, 2),
    ) {
        let to = |v: &[u8]| v.iter().map(|&k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize]).collect::<Vec<_>>();
        let a = pauli_string(&to(&xs));
        let b = pauli_string(&to(&ys));
        let via_product = (&a.adjoint() * &b).trace();
        prop_assert!((a.hs_inner(&b).unwrap() - via_product).norm() < 1e-14);
        let expected = if xs == ys { 4.0 } else { 0.0 };
        prop_assert!((via_product - c(expected, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn permutation_round_trip(seed in 0u64..1000) {
        let perm = [2usize, 0, 1];
        let inverse = [1usize, 2, 0];
        let ops = [Pauli::X, Pauli::Y, Pauli::Z, Pauli::I];
        let a = pauli_string(&[ops[(seed % 4) as usize], ops[(seed / 4 % 4) as usize], ops[(seed / 16 % 4) as usize]]);
        let back = a.permute_qubits(&perm).unwrap().permute_qubits(&inverse).unwrap();
        prop_assert_eq!(a, back);
    }
}
