// SPDX-License-Identifier: Apache-2.0

use fermicomm::clifford_core::{pauli_string, Pauli, SparseOperator};
use fermicomm::dimensions::{binomial, weyl_ut_irrep_dim};
use fermicomm::gaussian_group::{slater_state, substream};
use fermicomm::gt_basis::Partition;
use fermicomm::magic::{
    avg_gauss_s4_exact, avg_pp_s4_exact, baseline_s4, catalan, generalized_pochhammer, hook_content_dim, m_lin,
    mc_average_s4, mc_so6_moment, replica_operator, s4, s4_direct, s4_replica, sample_state, to_f64, zonal_ck,
    zonal_terms, Baseline, Ensemble, McEstimate,
};
use fermicomm::{Error, StateVector, C64};
use num::{BigInt, BigRational, One};
use proptest::prelude::*;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn t_state() -> StateVector {
    let phase = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    StateVector::new(vec![C64::new(1.0, 0.0), phase]).unwrap().normalized().unwrap()
}

fn haar_state(n: usize, seed: u64) -> StateVector {
    sample_state(n, Ensemble::Haar, &mut substream(seed, 0)).unwrap()
}

// ------------------------------------------------------------------ S4

#[test]
fn stabilizer_states() {
    for n in 1..=5 {
        let vac = slater_state(n, &[]).unwrap();
        assert!((s4(&vac, n).unwrap() - 0.5f64.powi(n as i32)).abs() < 1e-14);
        assert!(m_lin(&vac, n).unwrap().abs() < 1e-14);
    }
    let plus = StateVector::new(vec![C64::new(1.0, 0.0); 4]).unwrap().normalized().unwrap();
    assert!(m_lin(&plus, 2).unwrap().abs() < 1e-14);
}

#[test]
fn t_state_values() {
    let t = t_state();
    assert!((s4(&t, 1).unwrap() - 0.375).abs() < 1e-14);
    assert!((s4_direct(&t, 1).unwrap() - 0.375).abs() < 1e-14);
    assert!((m_lin(&t, 1).unwrap() - 0.25).abs() < 1e-14);
}

#[test]
fn s4_rejects_bad_input() {
    let bad = StateVector::new(vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
    assert!(matches!(s4(&bad, 1), Err(Error::Domain(_))));
    assert!(s4(&t_state(), 2).is_err());
    assert!(matches!(replica_operator(4), Err(Error::Resource(_))));
}

#[test]
fn s4_is_clifford_covariant() {
    let r = 0.5f64.sqrt();
    let h = (&pauli_string(&[Pauli::X]) + &pauli_string(&[Pauli::Z])).scale_real(r);
    let s = SparseOperator::from_diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    let id = SparseOperator::identity(2);
    let psi = haar_state(3, 5);
    let base = s4(&psi, 3).unwrap();
    for gate in [h.tensor(&id).tensor(&id), id.tensor(&s).tensor(&h), pauli_string(&[Pauli::Y, Pauli::X, Pauli::I])] {
        let moved = gate.apply(&psi).unwrap();
        assert!((s4(&moved, 3).unwrap() - base).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fast_and_direct_routes_agree(seed in 0u64..100_000, n in 1usize..=4) {
        let psi = haar_state(n, seed);
        let fast = s4(&psi, n).unwrap();
        prop_assert!((fast - s4_direct(&psi, n).unwrap()).abs() < 1e-10);
        prop_assert!(fast > 0.0 && fast <= 1.0 + 1e-12);
        let m = m_lin(&psi, n).unwrap();
        prop_assert!((-1e-12..1.0).contains(&m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn replica_identity(seed in 0u64..100_000, n in 1usize..=3) {
        let psi = haar_state(n, seed);
        prop_assert!((s4_replica(&psi, n).unwrap() - s4(&psi, n).unwrap()).abs() < 1e-10);
    }
}

// ------------------------------------------------------ exact averages

#[test]
fn catalan_numbers() {
    let got: Vec<String> = (0..=6).map(|m| catalan(m).to_string()).collect();
    assert_eq!(got, ["1", "1", "2", "5", "14", "42", "132"]);
}

#[test]
fn gaussian_averages() {
    assert_eq!(avg_gauss_s4_exact(1).unwrap(), q(1, 2));
    assert_eq!(avg_gauss_s4_exact(2).unwrap(), q(1, 5));
    assert_eq!(avg_gauss_s4_exact(3).unwrap(), q(1, 14));
    assert_eq!(avg_gauss_s4_exact(4).unwrap(), q(1, 42));
    assert!(avg_gauss_s4_exact(0).is_err());
    let vac = slater_state(1, &[]).unwrap();
    assert_eq!(s4(&vac, 1).unwrap(), to_f64(&avg_gauss_s4_exact(1).unwrap()));
}

#[test]
fn hook_content_dimensions() {
    assert_eq!(hook_content_dim(7, 0).unwrap(), BigInt::one());
    assert_eq!(hook_content_dim(1, 1).unwrap(), BigInt::one());
    assert_eq!(hook_content_dim(4, 1).unwrap(), BigInt::from(35));
    assert!(hook_content_dim(2, 3).is_err());
}

proptest! {
    #[test]
    fn hook_content_is_the_weyl_dimension(n in 1u64..=8, r in 0u64..=8) {
        prop_assume!(r <= n);
        let rect = Partition::new(vec![4; r as usize]).unwrap();
        prop_assert_eq!(hook_content_dim(n, r).unwrap(), weyl_ut_irrep_dim(&rect, n as usize).unwrap());
    }

    #[test]
    fn single_row_hook_content(n in 1u64..=30) {
        prop_assert_eq!(hook_content_dim(n, 1).unwrap(), binomial(n as i64 + 3, 4));
    }

    #[test]
    fn single_part_pochhammer_is_rising_factorial(a in 1i64..=9, k in 0usize..=6) {
        let x = q(a, 2);
        let expected = (0..k).fold(BigRational::one(), |acc, i| acc * (&x + q(i as i64, 1)));
        let lambda = Partition::new(vec![k]).unwrap();
        prop_assert_eq!(generalized_pochhammer(&x, &lambda), expected);
    }
}

#[test]
fn zonal_coefficients() {
    assert_eq!(zonal_ck(0), q(1, 1));
    assert_eq!(zonal_ck(1), q(2, 1));
    assert_eq!(zonal_ck(2), q(57, 5));
    assert_eq!(zonal_ck(3), q(102, 1));
    let terms = zonal_terms(2);
    let shapes: Vec<String> = terms.iter().map(|t| t.lambda.to_string()).collect();
    assert_eq!(shapes, ["(2,0,0)", "(1,1,0)"]);
    assert!(zonal_terms(4).iter().all(|t| t.lambda.len() <= 3));
}

#[test]
fn zonal_coefficients_match_so6_moments() {
    for (k, exact) in [(1u32, 2.0), (2, 57.0 / 5.0)] {
        let est = mc_so6_moment(k, 20_000, 77 + k as u64).unwrap();
        let scale = 4f64.powi(k as i32);
        let scaled = McEstimate { mean: est.mean * scale, std_error: est.std_error * scale, ..est };
        assert!(scaled.sigmas_from(exact) < 3.0, "k={k}: {} +- {}", scaled.mean, scaled.std_error);
    }
}

#[test]
fn pp_average_anchors() {
    for n in 1..=8 {
        let corner = q(1, 1) / BigRational::from_integer(BigInt::from(2).pow(n as u32));
        assert_eq!(avg_pp_s4_exact(n, 0).unwrap(), corner);
        assert_eq!(avg_pp_s4_exact(n, n).unwrap(), corner);
    }
    assert_eq!(avg_pp_s4_exact(1, 1).unwrap(), q(1, 2));
    let one = slater_state(1, &[1]).unwrap();
    assert_eq!(s4(&one, 1).unwrap(), 0.5);
    assert!(avg_pp_s4_exact(2, 3).is_err());
}

#[test]
fn pp_average_is_particle_hole_symmetric() {
    for n in 1..=8u64 {
        for r in 0..=n {
            assert_eq!(avg_pp_s4_exact(n, r).unwrap(), avg_pp_s4_exact(n, n - r).unwrap());
        }
    }
}

#[test]
fn baselines() {
    assert_eq!(baseline_s4(1, Baseline::Haar).unwrap(), q(2, 5));
    assert_eq!(baseline_s4(1, Baseline::Product).unwrap(), q(2, 5));
    assert_eq!(baseline_s4(2, Baseline::Product).unwrap(), q(4, 25));
    assert_eq!(baseline_s4(3, Baseline::Haar).unwrap(), q(1, 22));
    assert!(baseline_s4(0, Baseline::Haar).is_err());
}

#[test]
fn large_n_ordering() {
    // Haar states have the least stabilizer purity and products of qubits the most.
    for n in 6..=8u64 {
        let gauss = avg_gauss_s4_exact(n).unwrap();
        let haar = baseline_s4(n, Baseline::Haar).unwrap();
        let product = baseline_s4(n, Baseline::Product).unwrap();
        assert!(haar < gauss && gauss < product, "n={n}");
        let envelope = to_f64(&haar) * (n as f64).powf(1.5) * std::f64::consts::PI.sqrt() / 4.0 * 1.2;
        assert!(to_f64(&gauss) < envelope);
    }
}

#[test]
fn gaussian_average_asymptotics() {
    let target = std::f64::consts::PI.sqrt() / 4.0;
    let ratio = |n: u64| to_f64(&avg_gauss_s4_exact(n).unwrap()) * 4f64.powi(n as i32) / (n as f64).powf(1.5);
    // The correction is O(1/n); it is ~34% at n = 8 and under 15% from n = 20.
    assert!((ratio(20) / target - 1.0).abs() < 0.15);
    assert!((ratio(200) / target - 1.0).abs() < 0.02);
    assert!((ratio(40) - target).abs() < (ratio(20) - target).abs());
}

// -------------------------------------------------------- Monte Carlo

#[test]
fn ensemble_names() {
    for e in [Ensemble::Gauss, Ensemble::GaussOdd, Ensemble::Pp(2), Ensemble::Haar, Ensemble::Product] {
        assert_eq!(e.to_string().parse::<Ensemble>().unwrap(), e);
    }
    assert!(matches!("clifford".parse::<Ensemble>(), Err(Error::Domain(_))));
    assert!("pp:x".parse::<Ensemble>().is_err());
}

#[test]
fn estimator_bookkeeping() {
    let est = McEstimate::from_values(&[1.0, 2.0, 3.0], 4);
    assert_eq!(est.mean, 2.0);
    assert!((est.std_error - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert_eq!((est.samples, est.seed), (3, 4));
    assert!(matches!(mc_average_s4(2, Ensemble::Gauss, 99, 0), Err(Error::Domain(_))));
    assert!(sample_state(2, Ensemble::Pp(3), &mut substream(0, 0)).is_err());
}

#[test]
fn estimates_are_reproducible() {
    let a = mc_average_s4(2, Ensemble::Gauss, 200, 5).unwrap();
    let b = mc_average_s4(2, Ensemble::Gauss, 200, 5).unwrap();
    assert_eq!(a, b);
}

#[test]
fn monte_carlo_matches_exact_averages() {
    let cases = [
        (2, Ensemble::Gauss, avg_gauss_s4_exact(2).unwrap()),
        (3, Ensemble::Pp(1), avg_pp_s4_exact(3, 1).unwrap()),
        (4, Ensemble::Pp(2), avg_pp_s4_exact(4, 2).unwrap()),
        (3, Ensemble::Haar, baseline_s4(3, Baseline::Haar).unwrap()),
        (2, Ensemble::Product, baseline_s4(2, Baseline::Product).unwrap()),
    ];
    for (n, ensemble, exact) in cases {
        let est = mc_average_s4(n, ensemble, 4000, 1234).unwrap();
        let sig = est.sigmas_from(to_f64(&exact));
        assert!(sig < 3.0, "{ensemble} n={n}: mean {} exact {} ({sig} sigma)", est.mean, to_f64(&exact));
    }
}

#[test]
fn linear_entropy_of_gaussian_states() {
    let n = 2;
    let values: Vec<f64> = (0..1000)
        .map(|i| m_lin(&sample_state(n, Ensemble::Gauss, &mut substream(88, i)).unwrap(), n).unwrap())
        .collect();
    let est = McEstimate::from_values(&values, 88);
    assert!(est.sigmas_from(0.2) < 3.0, "mean {} +- {}", est.mean, est.std_error);
}

#[test]
fn parity_sectors_share_the_average() {
    for n in 2..=3 {
        let even = mc_average_s4(n, Ensemble::Gauss, 4000, 21).unwrap();
        let odd = mc_average_s4(n, Ensemble::GaussOdd, 4000, 22).unwrap();
        let se = (even.std_error.powi(2) + odd.std_error.powi(2)).sqrt();
        assert!((even.mean - odd.mean).abs() < 3.0 * se, "n={n}");
    }
}
