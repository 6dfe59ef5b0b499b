// SPDX-License-Identifier: Apache-2.0

//! Resource quantifiers read off from overlaps of `rho^{(x)t}` with commutant
//! elements: two-copy Majorana spectra, spin-sector weights of fixed-particle
//! states, reduced-density-matrix purities, the Plucker rank, and
//! annihilation witnesses for free states.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, One, ToPrimitive};

use crate::clifford_core::{ladder, number_op, parity_op, SparseOperator, StateVector, C64, ZERO};
use crate::dimensions::{binomial, Group};
use crate::error::{domain, Error, Result};
use crate::gt_basis::{certify_spectrum, majorana_product, pp_t2_spin, subsets};
use crate::multicopy::{generators, CopySpace};

/// Tolerance on `||(N - r) psi||` for fixed-particle inputs.
pub const FIXED_PARTICLE_TOL: f64 = 1e-10;

/// Norm below which a vector counts as annihilated.
pub const ANNIHILATION_TOL: f64 = 1e-9;

/// Labelled invariant values with residuals and a free-form description.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantReport {
    pub n: usize,
    pub t: usize,
    pub description: String,
    pub values: BTreeMap<String, f64>,
    pub residuals: BTreeMap<String, f64>,
}

fn check_state(psi: &StateVector, n: usize) -> Result<()> {
    if n == 0 || n > 30 || psi.dim() != 1usize << n {
        return domain(format!("state of dimension {} does not describe {n} modes", psi.dim()));
    }
    psi.require_normalized()
}

/// Weights `p_{k,i}` of the two-copy Majorana invariants, `k = 0..=2n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaSpectrum {
    /// `p[k][i]`.
    pub p: Vec<[f64; 2]>,
    /// Largest imaginary part discarded from the real-valued weights.
    pub imag_residual: f64,
}

impl MajoranaSpectrum {
    /// `sum_k p_{k,0}`, equal to the purity of the state.
    pub fn plain_total(&self) -> f64 {
        self.p.iter().map(|x| x[0]).sum()
    }

    pub fn to_report(&self, n: usize, description: &str) -> InvariantReport {
        let mut r = InvariantReport { n, t: 2, description: description.to_string(), ..Default::default() };
        for (k, pair) in self.p.iter().enumerate() {
            for (i, v) in pair.iter().enumerate() {
                r.values.insert(format!("p[k={k},i={i}]"), *v);
            }
        }
        r.values.insert("sum_k p[k,0]".into(), self.plain_total());
        r.residuals.insert("imaginary part".into(), self.imag_residual);
        r
    }
}

/// `p_{k,i} = (-1)^{floor(k/2)} / 2^n tr[rho^{(x)2} Q^i_k]` for a pure state.
pub fn p_ki_spectrum(psi: &StateVector, n: usize) -> Result<MajoranaSpectrum> {
    check_state(psi, n)?;
    majorana_spectrum_with(n, |op| psi.expectation(op))
}

/// The same weights for a density operator.
pub fn p_ki_spectrum_density(rho: &SparseOperator, n: usize) -> Result<MajoranaSpectrum> {
    if rho.dim() != 1usize << n {
        return domain(format!("density operator of dimension {} does not describe {n} modes", rho.dim()));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return domain(format!("density operator has trace {tr}"));
    }
    majorana_spectrum_with(n, |op| rho.try_mul(op).map(|m| m.trace()))
}

/// `tr[rho^{(x)2} (A (x) B)] = tr[rho A] tr[rho B]`, so only one-copy
/// expectations are needed.
fn majorana_spectrum_with(n: usize, expect: impl Fn(&SparseOperator) -> Result<C64>) -> Result<MajoranaSpectrum> {
    let gamma = parity_op(n)?;
    let d = (1u64 << n) as f64;
    let mut p = Vec::with_capacity(2 * n + 1);
    let mut imag_residual = 0.0f64;
    for k in 0..=2 * n {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = [ZERO, ZERO];
        for s in subsets(2 * n, k) {
            let one_based: Vec<usize> = s.iter().map(|&x| x + 1).collect();
            let cs = majorana_product(n, &one_based)?;
            let plain = expect(&cs)?;
            let dressed = expect(&gamma.try_mul(&cs)?)?;
            acc[0] += plain * plain;
            acc[1] += dressed * plain;
        }
        let vals = acc.map(|z| z * (sign / d));
        imag_residual = imag_residual.max(vals[0].im.abs()).max(vals[1].im.abs());
        // Adding 0.0 maps a signed zero to +0.0.
        p.push([vals[0].re + 0.0, vals[1].re + 0.0]);
    }
    Ok(MajoranaSpectrum { p, imag_residual })
}

/// Particle number of a fixed-particle state, or a domain error naming the
/// residual `||(N - r) psi||` for the nearest `r`.
pub fn particle_number(psi: &StateVector, n: usize) -> Result<usize> {
    check_state(psi, n)?;
    let num = number_op(n)?;
    let mean = psi.expectation(&num)?.re;
    let r = mean.round().clamp(0.0, n as f64) as usize;
    let shifted = num.shift(C64::new(-(r as f64), 0.0)).apply(psi)?;
    let residual = shifted.norm();
    if residual > FIXED_PARTICLE_TOL {
        return domain(format!("state is not a particle-number eigenstate (||(N - {r}) psi|| = {residual:e})"));
    }
    Ok(r)
}

/// Spin-sector weights `p_j` of `psi (x) psi`, `j = 0..=min(r, n - r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSectors {
    pub r: usize,
    pub p: Vec<f64>,
}

impl SpinSectors {
    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// `sum_j (r - j(j+1)) p_j`, the one-body purity.
    pub fn one_body_purity(&self) -> f64 {
        self.p.iter().enumerate().map(|(j, pj)| (self.r as f64 - (j * (j + 1)) as f64) * pj).sum()
    }

    pub fn to_report(&self, n: usize, description: &str) -> InvariantReport {
        let mut rep = InvariantReport { n, t: 2, description: description.to_string(), ..Default::default() };
        for (j, v) in self.p.iter().enumerate() {
            rep.values.insert(format!("p_j[{j}]"), *v);
        }
        rep.values.insert("sum_j p_j".into(), self.total());
        rep.values.insert("one-body purity".into(), self.one_body_purity());
        rep
    }
}

/// `p_j` as the weight of `psi (x) psi` on the `J^2 = j(j+1)` eigenspace of
/// the two-copy spin. Because `psi (x) psi` already has `N_1 = N_2 = r`, this
/// equals its overlap with the diagonal matrix unit at zero magnetization.
pub fn spin_sector_probs(psi: &StateVector, n: usize, r: usize) -> Result<SpinSectors> {
    let actual = particle_number(psi, n)?;
    if actual != r {
        return domain(format!("state has {actual} particles, not {r}"));
    }
    let g = generators(CopySpace::new(n, 2)?)?;
    let spin = pp_t2_spin(&g)?;
    let values: Vec<f64> = (0..=n)
        .map(|tj| {
            let j = tj as f64 / 2.0;
            j * (j + 1.0)
        })
        .collect();
    certify_spectrum(&spin.casimir, &values, "J^2")?;
    let pair = psi.tensor(psi);
    let jmax = r.min(n - r);
    let p = (0..=jmax)
        .map(|j| {
            let target = (j * (j + 1)) as f64;
            let mut v = pair.clone();
            for &s in &values {
                if (s - target).abs() > 1e-12 {
                    let av = spin.casimir.apply(&v)?;
                    v = av.try_sub(&v.scale(C64::new(s, 0.0)))?.scale(C64::new(1.0 / (target - s), 0.0));
                }
            }
            Ok(pair.inner(&v)?.re)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpinSectors { r, p })
}

/// `C_alpha = a_{i_K} ... a_{i_1}`, the adjoint of the ordered creation string.
fn annihilation_string(ops: &[SparseOperator], alpha: &[usize], dim: usize) -> Result<SparseOperator> {
    let mut acc = SparseOperator::identity(dim);
    for &i in alpha.iter().rev() {
        acc = acc.try_mul(&ops[i])?;
    }
    Ok(acc)
}

/// `K`-body reduced density matrix `rho_{a a'} = <psi| C_{a'}^dag C_a |psi>`,
/// indexed by increasing `K`-tuples in lexicographic order and left
/// unnormalized (its trace is `<C(N, K)>`).
pub fn rdm(psi: &StateVector, n: usize, k: usize) -> Result<DMatrix<C64>> {
    check_state(psi, n)?;
    if k > n {
        return domain(format!("body order {k} outside 0..={n}"));
    }
    let an: Vec<SparseOperator> = (1..=n).map(|p| ladder(n, p, false)).collect::<Result<_>>()?;
    let tuples = subsets(n, k);
    let vecs: Vec<StateVector> =
        tuples.iter().map(|alpha| annihilation_string(&an, alpha, 1 << n)?.apply(psi)).collect::<Result<_>>()?;
    let m = tuples.len();
    let mut out = DMatrix::<C64>::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            out[(a, b)] = vecs[b].inner(&vecs[a])?;
        }
    }
    Ok(out)
}

/// `tr[(rho^{(K)})^2]`.
pub fn purity(psi: &StateVector, n: usize, k: usize) -> Result<f64> {
    let m = rdm(psi, n, k)?;
    Ok((&m * &m).trace().re)
}

/// Normalized quadratic entropy `1 - tr[(rho^{(K)})^2] / C(r, K)^2`.
pub fn quadratic_entropy(psi: &StateVector, n: usize, k: usize) -> Result<f64> {
    let r = particle_number(psi, n)?;
    if k > r {
        return domain(format!("body order {k} exceeds the particle number {r}"));
    }
    let c = binomial(r as i64, k as i64).to_f64().unwrap_or(f64::NAN);
    Ok(1.0 - purity(psi, n, k)? / (c * c))
}

/// `Omega_K = sum_{a,a'} C_{a'}^dag(1) C_a(1) C_a^dag(2) C_{a'}(2)` with
/// dressed ladder operators, so that `tr[rho^{(x)2} Omega_K] = tr[(rho^{(K)})^2]`.
pub fn omega_k(n: usize, k: usize) -> Result<SparseOperator> {
    if k > n {
        return domain(format!("body order {k} outside 0..={n}"));
    }
    let cs = CopySpace::new(n, 2)?;
    let g = generators(cs)?;
    let dim = cs.dim();
    let an = |j: usize| -> Vec<SparseOperator> { (1..=n).map(|p| g.ladder(p, j, false).clone()).collect() };
    let (an1, an2) = (an(1), an(2));
    let tuples = subsets(n, k);
    let c1: Vec<SparseOperator> = tuples.iter().map(|a| annihilation_string(&an1, a, dim)).collect::<Result<_>>()?;
    let c2: Vec<SparseOperator> = tuples.iter().map(|a| annihilation_string(&an2, a, dim)).collect::<Result<_>>()?;
    let c1d: Vec<SparseOperator> = c1.iter().map(|x| x.adjoint()).collect();
    let c2d: Vec<SparseOperator> = c2.iter().map(|x| x.adjoint()).collect();
    let mut acc = SparseOperator::zero(dim);
    for a in 0..tuples.len() {
        for b in 0..tuples.len() {
            let term = c1d[b].try_mul(&c1[a])?.try_mul(&c2d[a])?.try_mul(&c2[b])?;
            acc = acc.try_add(&term)?;
        }
    }
    Ok(acc)
}

/// Smallest `k >= 1` with `Omega_12^k (psi (x) psi) = 0`, cross-checked
/// against the largest occupied spin sector.
pub fn plucker_rank(psi: &StateVector, n: usize) -> Result<usize> {
    let r = particle_number(psi, n)?;
    let g = generators(CopySpace::new(n, 2)?)?;
    let hop = g.omega(1, 2);
    let mut v = psi.tensor(psi);
    let mut rank = None;
    for k in 1..=n + 1 {
        v = hop.apply(&v)?;
        if v.norm() < ANNIHILATION_TOL {
            rank = Some(k);
            break;
        }
    }
    let rank = rank.ok_or_else(|| Error::Internal("no power of the hopping generator annihilates the state".into()))?;
    let sectors = spin_sector_probs(psi, n, r)?;
    let support = sectors.p.iter().rposition(|&p| p > ANNIHILATION_TOL).map_or(0, |j| j) + 1;
    if support != rank {
        return Err(Error::Internal(format!("Plucker rank {rank} disagrees with the spin-sector support {support}")));
    }
    Ok(rank)
}

/// Largest `||G_ij psi^{(x)t}||` over copy pairs, with `G` the hopping
/// generators (`pp`) or the Majorana bilinears (`gauss`).
pub fn free_state_annihilation(psi: &StateVector, n: usize, t: usize, kind: Group) -> Result<f64> {
    check_state(psi, n)?;
    if t < 2 {
        return domain("the witness needs at least two copies");
    }
    let g = generators(CopySpace::new(n, t)?)?;
    let copies = psi.tensor_power(t);
    let mut worst = 0.0f64;
    for i in 1..=t {
        for j in 1..=t {
            let op = match kind {
                Group::Pp if i != j => g.omega(i, j),
                Group::Gauss if i < j => g.qtilde(i, j),
                _ => continue,
            };
            worst = worst.max(op.apply(&copies)?.norm());
        }
    }
    Ok(worst)
}

/// Multiplicity `d_{r,j} = (2j+1)/(r+j+1) C(n+1, r-j) C(n, r+j)` of the spin-`j`
/// sector in two copies of the `r`-particle space.
pub fn d_rj(n: u64, r: u64, j: u64) -> Result<BigInt> {
    if r > n || j > r.min(n - r) {
        return domain(format!("need 0 <= j <= min(r, n - r) (got n={n}, r={r}, j={j})"));
    }
    let (n, r, j) = (n as i64, r as i64, j as i64);
    let num = BigInt::from(2 * j + 1) * binomial(n + 1, r - j) * binomial(n, r + j);
    let q = BigRational::new(num, BigInt::from(r + j + 1));
    if !q.denom().is_one() {
        return Err(Error::Internal(format!("d_{{r,j}} is not an integer at n={n}, r={r}, j={j}")));
    }
    Ok(q.to_integer())
}
