// SPDX-License-Identifier: Apache-2.0

//! Exact commutant dimensions, their leading asymptotics, and a brute-force
//! nullspace oracle that does not rely on any closed form.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::clifford_core::{ladder, majorana, SparseOperator, C64, I};
use crate::error::{domain, Error, Result};
use crate::gt_basis::Partition;

/// Default cap on `n * t` for the brute-force oracle (operator space `4^6`).
pub const ORACLE_MAX_QUBITS: usize = 6;

/// Relative singular-value threshold of the oracle.
pub const ORACLE_SV_TOL: f64 = 1e-8;

/// Which Gaussian group acts on the copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// Number-preserving Gaussian unitaries, `U(n)`.
    Pp,
    /// All Gaussian unitaries, `SO(2n)`.
    Gauss,
}

impl std::str::FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pp" => Ok(Group::Pp),
            "gauss" => Ok(Group::Gauss),
            other => domain(format!("unknown group '{other}' (expected pp or gauss)")),
        }
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Group::Pp => "pp",
            Group::Gauss => "gauss",
        })
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn to_integer(q: BigRational, what: &str) -> Result<BigInt> {
    if !q.is_integer() {
        return Err(Error::Internal(format!("{what} evaluated to the non-integer {q}")));
    }
    Ok(q.to_integer())
}

/// Product of factorial ratios `prod_j j! (j+2t)! / (j+t)!^2`.
pub fn dim_pp_factorial_form(t: u64, n: u64) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, j| acc * ratio(factorial(j) * factorial(j + 2 * t), factorial(j + t).pow(2)))
}

/// Double product `prod_{i,j=1..t} (n+i+j-1)/(i+j-1)`.
pub fn dim_pp_double_product(t: u64, n: u64) -> BigRational {
    let mut acc = BigRational::one();
    for i in 1..=t {
        for j in 1..=t {
            acc *= ratio(BigInt::from(n + i + j - 1), BigInt::from(i + j - 1));
        }
    }
    acc
}

/// Dimension of the `t`-copy commutant of number-preserving Gaussian
/// unitaries on `n` modes. Both product forms are evaluated and must agree.
pub fn dim_pp_commutant(t: u64, n: u64) -> Result<BigInt> {
    let a = dim_pp_factorial_form(t, n);
    let b = dim_pp_double_product(t, n);
    if a != b {
        return Err(Error::Internal(format!("product forms disagree at t={t}, n={n}: {a} vs {b}")));
    }
    to_integer(a, "number-preserving commutant dimension")
}

/// Dimension of the `t`-copy commutant of all Gaussian unitaries on `n` modes.
pub fn dim_gauss_commutant(t: u64, n: u64) -> Result<BigInt> {
    if t == 0 || n == 0 {
        return domain(format!("need t >= 1 and n >= 1 (got t={t}, n={n})"));
    }
    let mut acc = ratio(BigInt::one(), BigInt::from(2u32).pow((n - 1) as u32));
    for j in 0..n {
        acc *= ratio(factorial(2 * j) * factorial(2 * t + 2 * j), factorial(t + j) * factorial(t + n + j - 1));
    }
    to_integer(acc, "Gaussian commutant dimension")
}

/// Leading coefficient of the degree-`t^2` polynomial `n -> dim_pp_commutant(t, n)`.
pub fn pp_dim_leading_coefficient(t: u64) -> Result<BigRational> {
    if t == 0 {
        return domain("leading coefficient needs t >= 1");
    }
    Ok((1..=t).fold(BigRational::one(), |acc, k| acc * ratio(factorial(k - 1), factorial(t + k - 1))))
}

/// Prefactor `K_n` of the large-`t` law `dim ~ K_n 4^(n t) t^(-n^2/2)`.
pub fn pp_dim_large_t_prefactor(n: u64) -> f64 {
    let nf = n as f64;
    let mut k = std::f64::consts::PI.powf(-nf / 2.0) * 2f64.powf(nf * (nf - 1.0) / 2.0);
    for j in 0..n {
        k *= factorial(j).to_f64().unwrap_or(f64::INFINITY);
    }
    k
}

/// Dimension of the `U(t)` irrep with highest weight `lambda`.
pub fn weyl_ut_irrep_dim(lambda: &Partition, t: usize) -> Result<BigInt> {
    if lambda.len() > t {
        return domain(format!("partition {lambda} has more than {t} parts"));
    }
    let l: Vec<i64> = (0..t).map(|i| lambda.part(i) as i64).collect();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..t {
        for j in i + 1..t {
            num *= l[i] - l[j] + (j - i) as i64;
            den *= (j - i) as i64;
        }
    }
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() || q.is_negative() {
        return Err(Error::Internal(format!("Weyl dimension of {lambda} is not a natural number")));
    }
    Ok(q)
}

/// One-copy Lie algebra generators of the group, as Hermitian operators.
fn one_copy_generators(n: usize, group: Group) -> Result<Vec<SparseOperator>> {
    let mut out = Vec::new();
    match group {
        Group::Pp => {
            let cr: Vec<_> = (1..=n).map(|p| ladder(n, p, true)).collect::<Result<_>>()?;
            let an: Vec<_> = (1..=n).map(|p| ladder(n, p, false)).collect::<Result<_>>()?;
            for p in 0..n {
                out.push(&cr[p] * &an[p]);
                for q in p + 1..n {
                    let hop = &cr[p] * &an[q];
                    let back = hop.adjoint();
                    out.push(&hop + &back);
                    out.push((&hop - &back).scale(I));
                }
            }
        }
        Group::Gauss => {
            let c: Vec<_> = (1..=2 * n).map(|mu| majorana(n, mu)).collect::<Result<_>>()?;
            for mu in 0..2 * n {
                for nu in mu + 1..2 * n {
                    out.push((&c[mu] * &c[nu]).scale(I));
                }
            }
        }
    }
    Ok(out)
}

/// `sum_j 1 x ... x g (slot j) x ... x 1`.
fn lift_diagonal(g: &SparseOperator, t: usize) -> SparseOperator {
    let d = g.dim();
    let id = SparseOperator::identity(d);
    let total = d.pow(t as u32);
    let mut acc = SparseOperator::zero(total);
    for j in 0..t {
        let mut term = SparseOperator::identity(1);
        for k in 0..t {
            term = term.tensor(if k == j { g } else { &id });
        }
        acc = &acc + &term;
    }
    acc
}

fn is_diagonal(op: &SparseOperator) -> bool {
    op.entries().all(|(r, c, _)| r == c)
}

/// Numerical dimension of the `t`-copy commutant, from the nullspace of the
/// stacked commutator superoperators `X -> [L, X]` of the lifted generators.
///
/// Only matrix units `|a><b|` with equal eigenvalues under every diagonal
/// generator can appear in a commuting operator, so the superoperators are
/// restricted to that subspace before the singular value decomposition.
pub fn brute_force_commutant_dim(n: usize, t: usize, group: Group) -> Result<usize> {
    brute_force_commutant_dim_capped(n, t, group, ORACLE_MAX_QUBITS)
}

pub fn brute_force_commutant_dim_capped(n: usize, t: usize, group: Group, max_qubits: usize) -> Result<usize> {
    if n == 0 || t == 0 {
        return domain(format!("need n >= 1 and t >= 1 (got n={n}, t={t})"));
    }
    if n * t > max_qubits {
        return Err(Error::Resource(format!("oracle limited to n*t <= {max_qubits} qubits (got {})", n * t)));
    }
    let lifted: Vec<SparseOperator> = one_copy_generators(n, group)?.iter().map(|g| lift_diagonal(g, t)).collect();
    let dim = 1usize << (n * t);

    // Signature of every basis state under the diagonal generators.
    let diagonal: Vec<&SparseOperator> = lifted.iter().filter(|l| is_diagonal(l)).collect();
    let signature = |b: usize| -> Vec<i64> { diagonal.iter().map(|l| (l.get(b, b).re * 2.0).round() as i64).collect() };
    let mut classes: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for b in 0..dim {
        classes.entry(signature(b)).or_default().push(b);
    }
    let mut keys: Vec<_> = classes.keys().cloned().collect();
    keys.sort();
    let mut domain_units: Vec<(usize, usize)> = Vec::new();
    for key in &keys {
        let members = &classes[key];
        for &a in members {
            for &b in members {
                domain_units.push((a, b));
            }
        }
    }
    let cols = domain_units.len();

    // Rows of the stacked superoperator, keyed by (generator, target unit).
    let mut row_index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
    let off_diag: Vec<&SparseOperator> = lifted.iter().filter(|l| !is_diagonal(l)).collect();
    let lifted_cols: Vec<Vec<Vec<(usize, C64)>>> = off_diag
        .iter()
        .map(|l| {
            let mut by_col = vec![Vec::new(); dim];
            for (r, c, v) in l.entries() {
                by_col[c].push((r, v));
            }
            by_col
        })
        .collect();
    let lifted_rows: Vec<Vec<Vec<(usize, C64)>>> = off_diag
        .iter()
        .map(|l| {
            let mut by_row = vec![Vec::new(); dim];
            for (r, c, v) in l.entries() {
                by_row[r].push((c, v));
            }
            by_row
        })
        .collect();
    for (gi, _) in off_diag.iter().enumerate() {
        for (col, &(a, b)) in domain_units.iter().enumerate() {
            // [L, |a><b|] = sum_c L_ca |c><b| - sum_d L_bd |a><d|
            let mut push = |r: usize, c: usize, v: C64| {
                let next = row_index.len();
                let row = *row_index.entry((gi, r, c)).or_insert(next);
                triplets.push((row, col, v));
            };
            for &(c, v) in &lifted_cols[gi][a] {
                push(c, b, v);
            }
            for &(d, v) in &lifted_rows[gi][b] {
                push(a, d, -v);
            }
        }
    }
    let rows = row_index.len();
    if rows == 0 {
        return Ok(cols);
    }
    let mut m = DMatrix::<C64>::zeros(rows, cols);
    for (r, c, v) in triplets {
        m[(r, c)] += v;
    }
    let sv = m.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > ORACLE_SV_TOL * smax).count();
    Ok(cols - rank)
}
