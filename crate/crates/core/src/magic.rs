// SPDX-License-Identifier: Apache-2.0

//! Stabilizer entropy `S_4 = 4^-n sum_P tr[rho P]^4`, its exact averages over
//! free-fermion state ensembles, reference baselines, and Monte Carlo
//! estimators.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::clifford_core::{pauli_string, Pauli, SparseOperator, StateVector, C64, ZERO};
use crate::dimensions::{binomial, factorial};
use crate::error::{domain, Error, Result};
use crate::gaussian_group::{
    sample_gaussian_unitary, sample_orthogonal, sample_pp_gaussian_unitary, slater_state, substream,
};
use crate::gt_basis::Partition;

/// Largest mode count for the direct sum over all `4^n` Pauli strings.
pub const DIRECT_MAX_MODES: usize = 6;

/// Largest mode count for the replica evaluation on `4n` qubits.
pub const REPLICA_MAX_MODES: usize = 3;

/// Smallest accepted Monte Carlo sample count.
pub const MIN_SAMPLES: usize = 100;

fn check_state(psi: &StateVector, n: usize) -> Result<()> {
    if n == 0 || n > 26 || psi.dim() != 1usize << n {
        return domain(format!("state of dimension {} does not describe {n} qubits", psi.dim()));
    }
    psi.require_normalized()
}

/// In-place Walsh-Hadamard transform (unnormalized).
fn walsh_hadamard(v: &mut [C64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// `S_4` from all Pauli expectations at once: for each bit-flip mask `x`,
/// the Walsh-Hadamard transform of `conj(psi(b ^ x)) psi(b)` lists
/// `<psi| X^x Z^z |psi>` over every phase mask `z`.
pub fn s4(psi: &StateVector, n: usize) -> Result<f64> {
    check_state(psi, n)?;
    let amps = psi.amplitudes();
    let dim = amps.len();
    let total: f64 = (0..dim)
        .into_par_iter()
        .map_init(
            || vec![ZERO; dim],
            |buf, x| {
                for (b, slot) in buf.iter_mut().enumerate() {
                    *slot = amps[b ^ x].conj() * amps[b];
                }
                walsh_hadamard(buf);
                buf.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum::<f64>()
            },
        )
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(total / (dim as f64 * dim as f64))
}

/// `S_4` by building each of the `4^n` Pauli strings.
pub fn s4_direct(psi: &StateVector, n: usize) -> Result<f64> {
    check_state(psi, n)?;
    if n > DIRECT_MAX_MODES {
        return Err(Error::Resource(format!("direct Pauli sum limited to n <= {DIRECT_MAX_MODES}")));
    }
    let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut total = 0.0;
    for code in 0..(1usize << (2 * n)) {
        let ops: Vec<Pauli> = (0..n).map(|q| letters[(code >> (2 * q)) & 3]).collect();
        let e = psi.expectation(&pauli_string(&ops))?;
        total += e.norm_sqr() * e.norm_sqr();
    }
    Ok(total / 4f64.powi(n as i32))
}

/// `q = I^4 + X^4 + Y^4 + Z^4` on four qubits.
pub fn replica_q() -> SparseOperator {
    [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
        .iter()
        .map(|&p| pauli_string(&[p; 4]))
        .fold(SparseOperator::zero(16), |acc, x| &acc + &x)
}

/// `sum_P P^{(x)4}` on four replicas of `n` qubits, replica-major order.
pub fn replica_operator(n: usize) -> Result<SparseOperator> {
    if n == 0 || n > REPLICA_MAX_MODES {
        return Err(Error::Resource(format!("replica operator limited to 1 <= n <= {REPLICA_MAX_MODES}")));
    }
    let qubit_major = replica_q().tensor_power(n);
    // Position 4i + r (qubit i, replica r) moves to r n + i.
    let perm: Vec<usize> = (0..4 * n).map(|pos| (pos % 4) * n + pos / 4).collect();
    qubit_major.permute_qubits(&perm)
}

/// `S_4 = 4^-n tr[rho^{(x)4} Q_n]`.
pub fn s4_replica(psi: &StateVector, n: usize) -> Result<f64> {
    check_state(psi, n)?;
    let q = replica_operator(n)?;
    let e = psi.tensor_power(4).expectation(&q)?;
    Ok(e.re / 4f64.powi(n as i32))
}

/// Linear stabilizer entropy `1 - 2^n S_4`.
pub fn m_lin(psi: &StateVector, n: usize) -> Result<f64> {
    Ok(1.0 - (1u64 << n) as f64 * s4(psi, n)?)
}

pub fn catalan(m: u64) -> BigInt {
    binomial(2 * m as i64, m as i64) / BigInt::from(m + 1)
}

/// Average of `S_4` over Gaussian states of either parity: `1 / Cat_{n+1}`.
pub fn avg_gauss_s4_exact(n: u64) -> Result<BigRational> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    Ok(BigRational::new(BigInt::one(), catalan(n + 1)))
}

/// Dimension of the `U(n)` irrep with rectangular diagram of `r` rows and
/// four columns.
pub fn hook_content_dim(n: u64, r: u64) -> Result<BigInt> {
    if r > n {
        return domain(format!("need 0 <= r <= n (got n={n}, r={r})"));
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 1..=r as i64 {
        for j in 1..=4i64 {
            num *= n as i64 + j - i;
            den *= r as i64 + 5 - i - j;
        }
    }
    let q = BigRational::new(num, den);
    if !q.is_integer() || !q.is_positive() {
        return Err(Error::Internal(format!("hook-content dimension at n={n}, r={r} is {q}, not a positive integer")));
    }
    Ok(q.to_integer())
}

/// Rising factorial `(x)_k`.
fn rising(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, i| acc * (x + BigRational::from_integer(BigInt::from(i))))
}

/// Generalized Pochhammer symbol `(a)_lambda = prod_j (a - (j-1)/2)_{lambda_j}`.
pub fn generalized_pochhammer(a: &BigRational, lambda: &Partition) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    lambda.parts().iter().enumerate().fold(BigRational::one(), |acc, (j, &part)| {
        let shift = &half * BigRational::from_integer(BigInt::from(j));
        acc * rising(&(a - shift), part)
    })
}

/// One term of the zonal sum for `c_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZonalTerm {
    pub lambda: Partition,
    /// Hook product of the doubled diagram `2 lambda`.
    pub hook: BigInt,
    pub pochhammer_num: BigRational,
    pub pochhammer_den: BigRational,
}

/// Partitions of `k` with at most three rows, reverse lexicographic.
pub fn zonal_terms(k: usize) -> Vec<ZonalTerm> {
    let three_halves = BigRational::new(BigInt::from(3), BigInt::from(2));
    let three = BigRational::from_integer(BigInt::from(3));
    Partition::all_of_size(k, 3, k)
        .into_iter()
        .map(|lambda| {
            let doubled = Partition::new(lambda.parts().iter().map(|p| 2 * p).collect()).expect("still decreasing");
            ZonalTerm {
                hook: doubled.hook_product(),
                pochhammer_num: generalized_pochhammer(&three_halves, &lambda),
                pochhammer_den: generalized_pochhammer(&three, &lambda),
                lambda,
            }
        })
        .collect()
}

/// `c_k = 4^k sum_{lambda |- k, l(lambda) <= 3} (2k)!/H(2 lambda) (3/2)_lambda/(3)_lambda`.
pub fn zonal_ck(k: usize) -> BigRational {
    let pref = BigRational::from_integer(BigInt::from(4).pow(k as u32) * factorial(2 * k as u64));
    let sum = zonal_terms(k).into_iter().fold(BigRational::zero(), |acc, term| {
        acc + BigRational::new(BigInt::one(), term.hook) * term.pochhammer_num / term.pochhammer_den
    });
    pref * sum
}

/// Average of `S_4` over `r`-particle Slater-orbit states of `n` modes.
pub fn avg_pp_s4_exact(n: u64, r: u64) -> Result<BigRational> {
    if r > n {
        return domain(format!("need 0 <= r <= n (got n={n}, r={r})"));
    }
    let mut sum = BigRational::zero();
    for k in 0..=r.min(n - r) {
        let coeff = BigRational::new(factorial(n), factorial(n - r - k) * factorial(2 * k) * factorial(r - k));
        sum += coeff * zonal_ck(k as usize);
    }
    let den = BigInt::from(2).pow(n as u32) * hook_content_dim(n, r)?;
    Ok(sum / BigRational::from_integer(den))
}

/// Reference ensembles without free-fermion structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    Haar,
    Product,
}

/// Exact `S_4` averages: `1 / (2^{n-2} (2^n + 3))` for Haar states and
/// `(2/5)^n` for products of Haar qubits.
pub fn baseline_s4(n: u64, kind: Baseline) -> Result<BigRational> {
    if n == 0 {
        return domain("qubit count must be positive");
    }
    let two_n = BigInt::from(2).pow(n as u32);
    Ok(match kind {
        Baseline::Haar => BigRational::new(BigInt::from(4), &two_n * (&two_n + BigInt::from(3))),
        Baseline::Product => BigRational::new(BigInt::from(2).pow(n as u32), BigInt::from(5).pow(n as u32)),
    })
}

/// State ensembles accepted by the Monte Carlo estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ensemble {
    /// `R(U)|0>` with `U` Haar on `SO(2n)`.
    Gauss,
    /// `R(U) c_1 |0>`, the odd-parity sector.
    GaussOdd,
    /// `R(U)|1...r 0...0>` with `U` Haar on `U(n)`.
    Pp(usize),
    Haar,
    Product,
}

impl std::str::FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" => Ok(Ensemble::Gauss),
            "gauss-odd" => Ok(Ensemble::GaussOdd),
            "haar" => Ok(Ensemble::Haar),
            "product" => Ok(Ensemble::Product),
            other => match other.strip_prefix("pp:").map(str::parse::<usize>) {
                Some(Ok(r)) => Ok(Ensemble::Pp(r)),
                _ => domain(format!("unknown ensemble '{other}' (expected gauss, gauss-odd, pp:R, haar, product)")),
            },
        }
    }
}

impl std::fmt::Display for Ensemble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ensemble::Gauss => f.write_str("gauss"),
            Ensemble::GaussOdd => f.write_str("gauss-odd"),
            Ensemble::Pp(r) => write!(f, "pp:{r}"),
            Ensemble::Haar => f.write_str("haar"),
            Ensemble::Product => f.write_str("product"),
        }
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Unbiased sample standard deviation over `sqrt(samples)`.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Mean and standard error of values listed in sample order.
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        McEstimate { mean, std_error: (var / m).sqrt(), samples: values.len(), seed }
    }

    /// `|mean - target|` in units of the standard error.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.std_error
        }
    }
}

fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<StateVector> {
    let amps: Vec<C64> = (0..dim).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    StateVector::new(amps)?.normalized()
}

/// One state of the ensemble drawn from `rng`.
pub fn sample_state<R: Rng + ?Sized>(n: usize, ensemble: Ensemble, rng: &mut R) -> Result<StateVector> {
    match ensemble {
        Ensemble::Gauss | Ensemble::GaussOdd => {
            let (_, r) = sample_gaussian_unitary(n, rng)?;
            let start = if ensemble == Ensemble::Gauss { slater_state(n, &[])? } else { slater_state(n, &[1])? };
            r.apply(&start)
        }
        Ensemble::Pp(occ) => {
            if occ > n {
                return domain(format!("particle number {occ} exceeds {n} modes"));
            }
            let (_, r) = sample_pp_gaussian_unitary(n, rng)?;
            let occupied: Vec<usize> = (1..=occ).collect();
            r.apply(&slater_state(n, &occupied)?)
        }
        Ensemble::Haar => haar_vector(1 << n, rng),
        Ensemble::Product => {
            let mut psi = haar_vector(2, rng)?;
            for _ in 1..n {
                psi = psi.tensor(&haar_vector(2, rng)?);
            }
            Ok(psi)
        }
    }
}

/// Monte Carlo average of `S_4`; sample `i` draws from substream `i` of the
/// seed, so the estimate does not depend on scheduling.
pub fn mc_average_s4(n: usize, ensemble: Ensemble, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return domain(format!("need at least {MIN_SAMPLES} samples (got {samples})"));
    }
    if n == 0 {
        return domain("mode count must be positive");
    }
    let values = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let psi = sample_state(n, ensemble, &mut rng)?;
            s4(&psi, n)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_values(&values, seed))
}

/// Monte Carlo estimate of `mu_k = E_{O in SO(6)} (O_11 + O_22 + O_33)^{2k}`,
/// so that `4^k mu_k` estimates `c_k`.
pub fn mc_so6_moment(k: u32, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return domain(format!("need at least {MIN_SAMPLES} samples (got {samples})"));
    }
    let values = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let o = sample_orthogonal(3, &mut rng)?;
            let m = o.matrix();
            let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
            Ok(tr.powi(2 * k as i32))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_values(&values, seed))
}

/// Exact rational as a float.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
