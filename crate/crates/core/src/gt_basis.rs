// SPDX-License-Identifier: Apache-2.0

//! Gelfand-Tsetlin labels and explicit commutant bases.
//!
//! Weights and patterns are enumerated for any number of copies. Operator
//! bases are built for the number-preserving group at one and two copies and
//! for the full Gaussian group at one to four copies. Every projector is a
//! Lagrange polynomial in a copy-side observable whose spectrum is certified
//! first; matrix units are lowering strings applied to highest-weight
//! projectors.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::clifford_core::{majorana, parity_op, pauli_string, Pauli, SparseOperator, C64, I, ONE};
use crate::dimensions::{binomial, Group};
use crate::error::{domain, Error, Result};
use crate::multicopy::{generators, CopySpace, Generators};

/// Tolerance for spectrum certification before interpolation.
pub const SPECTRUM_TOL: f64 = 1e-8;

/// Tolerance of the change-of-basis identities.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Weakly decreasing sequence of nonnegative integers. Trailing zeros are
/// kept, so `(1,0)` and `(1)` are distinct values with the same shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("parts {parts:?} are not weakly decreasing"));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `i`-th part (0-based), zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.iter().filter(|&&p| p > 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Conjugate partition, without trailing zeros.
    pub fn transpose(&self) -> Partition {
        let first = self.part(0);
        let parts = (0..first).map(|j| self.parts.iter().filter(|&&p| p > j).count()).collect();
        Partition { parts }
    }

    /// Zero-padded to `len` entries, or an error if there are more nonzero parts.
    pub fn padded(&self, len: usize) -> Result<Partition> {
        if self.len() > len {
            return domain(format!("partition {self} has more than {len} nonzero parts"));
        }
        Ok(Partition { parts: (0..len).map(|i| self.part(i)).collect() })
    }

    /// Dominance order `self >= other` for partitions of the same size.
    pub fn dominates(&self, other: &Partition) -> bool {
        if self.size() != other.size() {
            return false;
        }
        let len = self.parts.len().max(other.parts.len());
        let (mut a, mut b) = (0usize, 0usize);
        for i in 0..len {
            a += self.part(i);
            b += other.part(i);
            if a < b {
                return false;
            }
        }
        true
    }

    /// Diagram containment `other` inside `self`.
    pub fn contains(&self, other: &Partition) -> bool {
        (0..other.parts.len()).all(|i| other.part(i) <= self.part(i))
    }

    /// Product of all hook lengths.
    pub fn hook_product(&self) -> BigInt {
        let conj = self.transpose();
        let mut acc = BigInt::one();
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                acc *= row - j + conj.part(j) - i - 1;
            }
        }
        acc
    }

    /// Every partition of `k` with at most `max_parts` parts, each at most
    /// `max_part`, zero-padded to `max_parts` entries, in reverse
    /// lexicographic order.
    pub fn all_of_size(k: usize, max_parts: usize, max_part: usize) -> Vec<Partition> {
        fn rec(rem: usize, slots: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if slots == 0 {
                if rem == 0 {
                    out.push(Partition { parts: cur.clone() });
                }
                return;
            }
            for p in (0..=cap.min(rem)).rev() {
                if p * slots < rem {
                    break;
                }
                cur.push(p);
                rec(rem - p, slots - 1, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, max_parts, max_part, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", body.join(","))
    }
}

/// Highest weight of an irrep of the copy-side algebra: a partition for
/// `u(t)`, an integer vector of length `t/2` for `so(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weight {
    Unitary(Partition),
    Orthogonal(Vec<i64>),
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Unitary(p) => write!(f, "{p}"),
            Weight::Orthogonal(v) => {
                let body: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", body.join(","))
            }
        }
    }
}

/// Chain of interlacing rows, top row first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GtPattern {
    pub rows: Vec<Vec<i64>>,
}

impl fmt::Display for GtPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Label of one basis vector inside a copy-side irrep.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    Pattern(GtPattern),
    /// Magnetizations of the two commuting `su(2)` factors at four copies,
    /// stored doubled.
    Spins {
        twice_m_plus: i64,
        twice_m_minus: i64,
    },
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Pattern(p) => write!(f, "{p}"),
            StateLabel::Spins { twice_m_plus, twice_m_minus } => {
                write!(f, "(m+={}, m-={})", half(*twice_m_plus), half(*twice_m_minus))
            }
        }
    }
}

fn half(twice: i64) -> String {
    if twice % 2 == 0 {
        (twice / 2).to_string()
    } else {
        format!("{twice}/2")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParityFlag {
    Plain,
    /// Left-multiplied by the parity of copy 1.
    Gamma1,
}

impl fmt::Display for ParityFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityFlag::Plain => "plain",
            ParityFlag::Gamma1 => "gamma1",
        })
    }
}

/// One matrix unit of a commutant basis.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub weight: Weight,
    pub row: StateLabel,
    pub col: StateLabel,
    pub parity: ParityFlag,
    pub op: SparseOperator,
}

/// Highest weights for `t` copies of `n` modes, lexicographically sorted.
pub fn enumerate_weights(group: Group, t: usize, n: usize) -> Result<Vec<Weight>> {
    if t == 0 {
        return domain("need at least one copy");
    }
    let n = n as i64;
    let mut out = Vec::new();
    match group {
        Group::Pp => {
            let mut cur = Vec::new();
            decreasing_sequences(t, 0, n, &mut cur, &mut |v| {
                let parts = v.iter().map(|&x| x as usize).collect();
                out.push(Weight::Unitary(Partition { parts }));
            });
        }
        Group::Gauss => {
            let r = t / 2;
            if t % 2 == 1 || r == 0 {
                let mut cur = Vec::new();
                decreasing_sequences(r, 0, n, &mut cur, &mut |v| out.push(Weight::Orthogonal(v.to_vec())));
            } else {
                let mut cur = Vec::new();
                decreasing_sequences(r - 1, 0, n, &mut cur, &mut |v| {
                    let bound = v.last().copied().unwrap_or(n);
                    for last in -bound..=bound {
                        let mut w = v.to_vec();
                        w.push(last);
                        out.push(Weight::Orthogonal(w));
                    }
                });
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Calls `f` on every weakly decreasing sequence of length `len` with entries
/// in `[lo, hi]`.
fn decreasing_sequences(len: usize, lo: i64, hi: i64, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    if cur.len() == len {
        f(cur);
        return;
    }
    let cap = cur.last().copied().unwrap_or(hi);
    for x in lo..=cap {
        cur.push(x);
        decreasing_sequences(len, lo, hi, cur, f);
        cur.pop();
    }
}

fn check_weight(weight: &Weight, group: Group, t: usize) -> Result<Vec<i64>> {
    match (group, weight) {
        (Group::Pp, Weight::Unitary(p)) => {
            let padded = p.padded(t)?;
            Ok(padded.parts.iter().map(|&x| x as i64).collect())
        }
        (Group::Gauss, Weight::Orthogonal(v)) => {
            let r = t / 2;
            if v.len() != r {
                return domain(format!("so({t}) weight needs {r} entries, got {weight}"));
            }
            if t % 2 == 1 {
                if v.windows(2).any(|w| w[0] < w[1]) || v.last().is_some_and(|&x| x < 0) {
                    return domain(format!("{weight} is not a dominant so({t}) weight"));
                }
            } else if r >= 2 {
                let head = &v[..r - 1];
                if head.windows(2).any(|w| w[0] < w[1]) || head[r - 2] < v[r - 1].abs() {
                    return domain(format!("{weight} is not a dominant so({t}) weight"));
                }
            }
            Ok(v.clone())
        }
        _ => domain(format!("weight {weight} does not belong to group {group}")),
    }
}

/// Admissible next rows of the unitary chain below `row`.
fn unitary_branch(row: &[i64]) -> Vec<Vec<i64>> {
    let ranges: Vec<(i64, i64)> = (0..row.len() - 1).map(|i| (row[i + 1], row[i])).collect();
    cartesian(&ranges)
}

/// Admissible next rows of the orthogonal chain below `row` at `level`.
fn orthogonal_branch(row: &[i64], level: usize) -> Vec<Vec<i64>> {
    let r = row.len();
    let ranges: Vec<(i64, i64)> = if level % 2 == 1 {
        // so(2r+1) -> so(2r)
        (0..r).map(|i| if i + 1 < r { (row[i + 1], row[i]) } else { (-row[i], row[i]) }).collect()
    } else {
        // so(2r) -> so(2r-1)
        (0..r.saturating_sub(1))
            .map(|i| if i + 2 < r { (row[i + 1], row[i]) } else { (row[i + 1].abs(), row[i]) })
            .collect()
    };
    cartesian(&ranges)
}

fn cartesian(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for prefix in &out {
            for x in lo..=hi {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// All GT patterns with top row `weight`, sorted lexicographically.
pub fn gt_patterns(weight: &Weight, group: Group, t: usize) -> Result<Vec<GtPattern>> {
    if t == 0 {
        return domain("need at least one copy");
    }
    let top = check_weight(weight, group, t)?;
    let bottom = match group {
        Group::Pp => 1,
        Group::Gauss => 2.min(t),
    };
    let mut out = Vec::new();
    let mut rows = vec![top];
    extend_patterns(group, t, bottom, &mut rows, &mut out);
    out.sort();
    Ok(out)
}

fn extend_patterns(group: Group, level: usize, bottom: usize, rows: &mut Vec<Vec<i64>>, out: &mut Vec<GtPattern>) {
    if level == bottom {
        out.push(GtPattern { rows: rows.clone() });
        return;
    }
    let last = rows.last().expect("nonempty chain").clone();
    let next = match group {
        Group::Pp => unitary_branch(&last),
        Group::Gauss => orthogonal_branch(&last, level),
    };
    for row in next {
        rows.push(row);
        extend_patterns(group, level - 1, bottom, rows, out);
        rows.pop();
    }
}

/// `lo, lo + step, ..., hi`.
pub fn value_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize;
    (0..=count).map(|k| lo + step * k as f64).collect()
}

/// Normalized norm of `prod_s (A - s)`. It vanishes exactly when every
/// eigenvalue of the diagonalizable operator `A` lies in `values`.
pub fn spectrum_residual(a: &SparseOperator, values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return domain("empty candidate spectrum");
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = SparseOperator::identity(a.dim());
    for &s in values {
        let width = (hi - s).max(s - lo).max(1.0);
        acc = acc.try_mul(&a.shift(C64::new(-s, 0.0)).scale_real(1.0 / width))?;
    }
    Ok(acc.frobenius_norm() / (a.dim() as f64).sqrt())
}

/// Fails unless the spectrum of `a` lies in `values` within [`SPECTRUM_TOL`].
pub fn certify_spectrum(a: &SparseOperator, values: &[f64], what: &str) -> Result<()> {
    let r = spectrum_residual(a, values)?;
    if r > SPECTRUM_TOL {
        return Err(Error::Verification(format!("spectrum of {what} is not contained in {values:?} (residual {r:e})")));
    }
    Ok(())
}

/// Spectral projector of `a` onto eigenvalue `target`, as
/// `prod_{s != target} (A - s) / (target - s)`.
pub fn lagrange_projector(a: &SparseOperator, values: &[f64], target: f64) -> Result<SparseOperator> {
    if !values.iter().any(|&s| (s - target).abs() < 1e-12) {
        return domain(format!("target {target} is not among the interpolation values"));
    }
    let mut acc = SparseOperator::identity(a.dim());
    for &s in values {
        if (s - target).abs() < 1e-12 {
            continue;
        }
        acc = acc.try_mul(&a.shift(C64::new(-s, 0.0)).scale_real(1.0 / (target - s)))?;
    }
    Ok(acc)
}

/// Caches projectors of one certified observable.
struct Interpolator<'a> {
    op: &'a SparseOperator,
    values: Vec<f64>,
    memo: HashMap<i64, SparseOperator>,
}

impl<'a> Interpolator<'a> {
    fn new(op: &'a SparseOperator, values: Vec<f64>, what: &str) -> Result<Self> {
        certify_spectrum(op, &values, what)?;
        Ok(Interpolator { op, values, memo: HashMap::new() })
    }

    fn projector(&mut self, target: f64) -> Result<&SparseOperator> {
        let key = (target * 4.0).round() as i64;
        if !self.memo.contains_key(&key) {
            let p = lagrange_projector(self.op, &self.values, target)?;
            self.memo.insert(key, p);
        }
        Ok(&self.memo[&key])
    }
}

/// Projector onto the `r`-particle sector of `n` modes.
pub fn pp_number_projector(n: usize, r: usize) -> Result<SparseOperator> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    if r > n {
        return domain(format!("particle number {r} outside 0..={n}"));
    }
    let number = crate::clifford_core::number_op(n)?;
    let values = value_grid(0.0, n as f64, 1.0);
    certify_spectrum(&number, &values, "N")?;
    lagrange_projector(&number, &values, r as f64)
}

/// Krawtchouk polynomial `K_a(x; N) = sum_j (-1)^j C(x, j) C(N - x, a - j)`.
pub fn krawtchouk(a: i64, x: i64, order: i64) -> Result<BigInt> {
    if order < 0 || a < 0 || a > order || x < 0 || x > order {
        return domain(format!("Krawtchouk arguments need 0 <= a, x <= N (got a={a}, x={x}, N={order})"));
    }
    let mut acc = BigInt::zero();
    for j in 0..=a {
        let term = binomial(x, j) * binomial(order - x, a - j);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

fn krawtchouk_f64(a: i64, x: i64, order: i64) -> Result<f64> {
    Ok(krawtchouk(a, x, order)?.to_f64().unwrap_or(f64::NAN))
}

/// Increasing `k`-subsets of `0..len`.
pub(crate) fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            if len - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= len {
        rec(0, len, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Elementary symmetric polynomial of degree `a` in the single-qubit `Z`s.
pub fn pp_symmetric_basis(n: usize, a: usize) -> Result<SparseOperator> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    if a > n {
        return domain(format!("degree {a} outside 0..={n}"));
    }
    let mut acc = SparseOperator::zero(1 << n);
    for s in subsets(n, a) {
        let mut ops = vec![Pauli::I; n];
        for q in s {
            ops[q] = Pauli::Z;
        }
        acc = acc.try_add(&pauli_string(&ops))?;
    }
    Ok(acc)
}

/// The same operator rebuilt from particle-number projectors. With `P_r` the
/// projector onto `r` occupied modes, the weight of `P_r` is `K_a(r; n)`.
pub fn pp_symmetric_from_projectors(n: usize, a: usize) -> Result<SparseOperator> {
    if a > n {
        return domain(format!("degree {a} outside 0..={n}"));
    }
    let mut acc = SparseOperator::zero(1 << n);
    for r in 0..=n {
        let k = krawtchouk_f64(a as i64, r as i64, n as i64)?;
        acc = acc.try_add(&pp_number_projector(n, r)?.scale_real(k))?;
    }
    Ok(acc)
}

fn pattern(rows: Vec<Vec<i64>>) -> StateLabel {
    StateLabel::Pattern(GtPattern { rows })
}

/// One-copy number-preserving basis: the projectors `P_r`.
pub fn pp_t1_basis(n: usize) -> Result<Vec<BasisElement>> {
    (0..=n)
        .map(|r| {
            let label = pattern(vec![vec![r as i64]]);
            Ok(BasisElement {
                weight: Weight::Unitary(Partition { parts: vec![r] }),
                row: label.clone(),
                col: label,
                parity: ParityFlag::Plain,
                op: pp_number_projector(n, r)?,
            })
        })
        .collect()
}

/// One-copy Gaussian basis: identity and parity.
pub fn gauss_t1_basis(n: usize) -> Result<Vec<BasisElement>> {
    let id = SparseOperator::identity(1 << n);
    let gamma = parity_op(n)?;
    let label = pattern(vec![vec![]]);
    Ok(vec![
        BasisElement {
            weight: Weight::Orthogonal(vec![]),
            row: label.clone(),
            col: label.clone(),
            parity: ParityFlag::Plain,
            op: id,
        },
        BasisElement {
            weight: Weight::Orthogonal(vec![]),
            row: label.clone(),
            col: label,
            parity: ParityFlag::Gamma1,
            op: gamma,
        },
    ])
}

/// `v_k = J_-^k P / sqrt(k! (2j)! / (2j-k)!)` for `k = 0..=2j`, so that
/// `v_k v_k^dagger` is the projector onto the `k`-th lowered line.
fn lowered_columns(hw: &SparseOperator, lower: &SparseOperator, twice_j: usize) -> Result<Vec<SparseOperator>> {
    let mut out = Vec::with_capacity(twice_j + 1);
    out.push(hw.clone());
    for k in 0..twice_j {
        let norm = (((k + 1) * (twice_j - k)) as f64).sqrt();
        let next = lower.try_mul(&out[k])?.scale_real(1.0 / norm);
        out.push(next);
    }
    Ok(out)
}

/// All `v_a v_b^dagger` for one block, in plain and optionally parity-dressed form.
fn block_units(
    weight: &Weight,
    columns: &[(StateLabel, SparseOperator)],
    gamma1: Option<&SparseOperator>,
    out: &mut Vec<BasisElement>,
) -> Result<()> {
    let adjoints: Vec<SparseOperator> = columns.iter().map(|(_, v)| v.adjoint()).collect();
    let mut plain = Vec::with_capacity(columns.len() * columns.len());
    for (la, va) in columns {
        for (b, (lb, _)) in columns.iter().enumerate() {
            let op = va.try_mul(&adjoints[b])?;
            plain.push(BasisElement {
                weight: weight.clone(),
                row: la.clone(),
                col: lb.clone(),
                parity: ParityFlag::Plain,
                op,
            });
        }
    }
    if let Some(g) = gamma1 {
        let dressed: Vec<BasisElement> = plain
            .iter()
            .map(|e| Ok(BasisElement { parity: ParityFlag::Gamma1, op: g.try_mul(&e.op)?, ..e.clone() }))
            .collect::<Result<_>>()?;
        out.extend(plain);
        out.extend(dressed);
    } else {
        out.extend(plain);
    }
    Ok(())
}

fn space(n: usize, t: usize) -> Result<CopySpace> {
    CopySpace::new(n, t)
}

/// Copy-side spin operators of two number-preserving copies.
pub struct PpSpin {
    pub raise: SparseOperator,
    pub lower: SparseOperator,
    pub number: SparseOperator,
    pub jz: SparseOperator,
    pub casimir: SparseOperator,
}

pub fn pp_t2_spin(g: &Generators) -> Result<PpSpin> {
    let raise = g.omega(1, 2).clone();
    let lower = g.omega(2, 1).clone();
    let number = g.omega(1, 1).try_add(g.omega(2, 2))?;
    let jz = g.omega(1, 1).try_sub(g.omega(2, 2))?.scale_real(0.5);
    let casimir = spin_casimir(&jz, &raise, &lower)?;
    Ok(PpSpin { raise, lower, number, jz, casimir })
}

/// `J_z^2 + (J_+ J_- + J_- J_+) / 2`.
fn spin_casimir(jz: &SparseOperator, raise: &SparseOperator, lower: &SparseOperator) -> Result<SparseOperator> {
    let sq = jz.try_mul(jz)?;
    let ladder = raise.anticommutator(lower)?.scale_real(0.5);
    sq.try_add(&ladder)
}

fn casimir_values(max_twice_j: usize) -> Vec<f64> {
    (0..=max_twice_j)
        .map(|tj| {
            let j = tj as f64 / 2.0;
            j * (j + 1.0)
        })
        .collect()
}

/// Two-copy number-preserving basis `X^{(l1,l2)}_{m,m'}`, with `m` the
/// occupation of copy 1 running from `l1` down to `l2`.
pub fn pp_t2_basis(n: usize) -> Result<Vec<BasisElement>> {
    let cs = space(n, 2)?;
    let g = generators(cs)?;
    let spin = pp_t2_spin(&g)?;
    let nf = n as f64;
    let mut number = Interpolator::new(&spin.number, value_grid(0.0, 2.0 * nf, 1.0), "N")?;
    let mut casimir = Interpolator::new(&spin.casimir, casimir_values(n), "J^2")?;
    let mut jz = Interpolator::new(&spin.jz, value_grid(-nf / 2.0, nf / 2.0, 0.5), "J_z")?;
    let mut out = Vec::new();
    for weight in enumerate_weights(Group::Pp, 2, n)? {
        let Weight::Unitary(lambda) = &weight else { unreachable!() };
        let (l1, l2) = (lambda.part(0), lambda.part(1));
        let twice_j = l1 - l2;
        let j = twice_j as f64 / 2.0;
        let block = number.projector((l1 + l2) as f64)?.try_mul(casimir.projector(j * (j + 1.0))?)?;
        let hw = block.try_mul(jz.projector(j)?)?;
        let cols = lowered_columns(&hw, &spin.lower, twice_j)?;
        let labelled: Vec<_> = cols
            .into_iter()
            .enumerate()
            .map(|(k, v)| (pattern(vec![vec![l1 as i64, l2 as i64], vec![(l1 - k) as i64]]), v))
            .collect();
        block_units(&weight, &labelled, None, &mut out)?;
    }
    Ok(out)
}

/// Two-copy commutant size counted by spin: `sum_j (n-2j+1)(2j+1)^2` over
/// `j = 0, 1/2, ..., n/2`, returned with the closed form
/// `(n+1)(n+2)^2(n+3)/12`.
pub fn pp_t2_spin_count(n: u64) -> (BigInt, BigInt) {
    let mut direct = BigInt::zero();
    for twice_j in 0..=n {
        direct += BigInt::from((n - twice_j + 1) * (twice_j + 1) * (twice_j + 1));
    }
    let closed = BigRational::new(BigInt::from((n + 1) * (n + 2) * (n + 2) * (n + 3)), BigInt::from(12));
    (direct, closed.to_integer())
}

/// `M = -i Q_12` on two copies.
fn two_copy_m(g: &Generators) -> SparseOperator {
    g.qtilde(1, 2).scale(-I)
}

/// Projectors `P_m` onto the eigenvalues `m = -n..=n` of `-i Q_12`.
pub fn gauss_t2_projectors(n: usize) -> Result<Vec<SparseOperator>> {
    let cs = space(n, 2)?;
    let g = generators(cs)?;
    let m = two_copy_m(&g);
    let nf = n as f64;
    let mut interp = Interpolator::new(&m, value_grid(-nf, nf, 1.0), "M")?;
    (-(n as i64)..=n as i64).map(|v| Ok(interp.projector(v as f64)?.clone())).collect()
}

/// Two-copy Gaussian basis `{P_m} u {Gamma_1 P_m}`.
pub fn gauss_t2_basis(n: usize) -> Result<Vec<BasisElement>> {
    let cs = space(n, 2)?;
    let gamma1 = generators(cs)?.parity(1).clone();
    let mut out = Vec::new();
    for (i, p) in gauss_t2_projectors(n)?.into_iter().enumerate() {
        let m = i as i64 - n as i64;
        let label = pattern(vec![vec![m]]);
        block_units(&Weight::Orthogonal(vec![m]), &[(label, p)], Some(&gamma1), &mut out)?;
    }
    Ok(out)
}

/// Ordered Majorana product `c_S` on one copy.
pub fn majorana_product(n: usize, set: &[usize]) -> Result<SparseOperator> {
    let mut acc = SparseOperator::identity(1 << n);
    for &mu in set {
        acc = acc.try_mul(&majorana(n, mu)?)?;
    }
    Ok(acc)
}

/// `sum_{|S| = k} c_S (x) c_S`, or with `Gamma c_S` on the first copy for
/// flavor 1.
pub fn qk_operators(n: usize, k: usize, flavor: u8) -> Result<SparseOperator> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    if k > 2 * n {
        return domain(format!("degree {k} outside 0..={}", 2 * n));
    }
    if flavor > 1 {
        return domain(format!("flavor must be 0 or 1 (got {flavor})"));
    }
    let gamma = parity_op(n)?;
    let mut acc = SparseOperator::zero(1 << (2 * n));
    for s in subsets(2 * n, k) {
        let one_based: Vec<usize> = s.iter().map(|&x| x + 1).collect();
        let cs = majorana_product(n, &one_based)?;
        let left = if flavor == 1 { gamma.try_mul(&cs)? } else { cs.clone() };
        acc = acc.try_add(&left.tensor(&cs))?;
    }
    Ok(acc)
}

/// `E_k`: `Q^0_k` for even `k`, `i Q^1_k` for odd `k`. With the parity
/// placed left of `c_S` and `M = -i Q_12`, this phase makes the odd `E_k`
/// expand with weights `K_k(n - m; 2n)` like the even ones.
pub fn gauss_t2_symmetric(n: usize, k: usize) -> Result<SparseOperator> {
    if k.is_multiple_of(2) {
        qk_operators(n, k, 0)
    } else {
        Ok(qk_operators(n, k, 1)?.scale(I))
    }
}

/// Largest residuals of the Krawtchouk change of basis between `E_k` and
/// the projectors `P_m`.
#[derive(Clone, Debug)]
pub struct ChangeOfBasisReport {
    /// Residual of `E_k = sum_m K_k(n-m; 2n) P_m`, indexed by `k`.
    pub forward: Vec<f64>,
    /// Residual of the inversion, indexed by `m + n`.
    pub inverse: Vec<f64>,
}

impl ChangeOfBasisReport {
    pub fn max_residual(&self) -> f64 {
        self.forward.iter().chain(&self.inverse).cloned().fold(0.0, f64::max)
    }
}

pub fn gauss_t2_change_of_basis(n: usize) -> Result<ChangeOfBasisReport> {
    let projectors = gauss_t2_projectors(n)?;
    let order = 2 * n as i64;
    let ni = n as i64;
    let es: Vec<SparseOperator> = (0..=2 * n).map(|k| gauss_t2_symmetric(n, k)).collect::<Result<_>>()?;
    let mut forward = Vec::with_capacity(es.len());
    for (k, e) in es.iter().enumerate() {
        let mut rhs = SparseOperator::zero(e.dim());
        for (i, p) in projectors.iter().enumerate() {
            let m = i as i64 - ni;
            rhs = rhs.try_add(&p.scale_real(krawtchouk_f64(k as i64, ni - m, order)?))?;
        }
        let r = e.distance(&rhs)?;
        if r > IDENTITY_TOL {
            return Err(Error::Verification(format!("forward change of basis fails at k={k} (residual {r:e})")));
        }
        forward.push(r);
    }
    let d2 = (1u64 << (2 * n)) as f64;
    let mut inverse = Vec::with_capacity(projectors.len());
    for (i, p) in projectors.iter().enumerate() {
        let m = i as i64 - ni;
        let mut rhs = SparseOperator::zero(p.dim());
        for (k, e) in es.iter().enumerate() {
            let c = krawtchouk_f64(k as i64, ni - m, order)? / binomial(order, k as i64).to_f64().unwrap_or(f64::NAN);
            rhs = rhs.try_add(&e.scale_real(c))?;
        }
        let pref = binomial(order, ni - m).to_f64().unwrap_or(f64::NAN) / d2;
        let r = p.distance(&rhs.scale_real(pref))?;
        if r > IDENTITY_TOL {
            return Err(Error::Verification(format!("inverse change of basis fails at m={m} (residual {r:e})")));
        }
        inverse.push(r);
    }
    Ok(ChangeOfBasisReport { forward, inverse })
}

/// Hermitian spin operators of three Gaussian copies.
pub struct GaussSpin {
    pub jz: SparseOperator,
    pub raise: SparseOperator,
    pub lower: SparseOperator,
    pub casimir: SparseOperator,
}

pub fn gauss_t3_spin(g: &Generators) -> Result<GaussSpin> {
    let jz = g.qtilde(1, 2).scale(-I);
    let q13 = g.qtilde(1, 3);
    let q23 = g.qtilde(2, 3);
    let raise = q13.lin_comb(ONE, q23, I)?;
    let lower = q13.lin_comb(-ONE, q23, I)?;
    let casimir = spin_casimir(&jz, &raise, &lower)?;
    Ok(GaussSpin { jz, raise, lower, casimir })
}

/// Three-copy Gaussian basis `X^{(l)}_{m,m'}` and `Gamma_1 X^{(l)}_{m,m'}`.
pub fn gauss_t3_basis(n: usize) -> Result<Vec<BasisElement>> {
    let cs = space(n, 3)?;
    let g = generators(cs)?;
    let spin = gauss_t3_spin(&g)?;
    let nf = n as f64;
    let mut casimir = Interpolator::new(&spin.casimir, (0..=n).map(|l| (l * (l + 1)) as f64).collect(), "J^2")?;
    let mut jz = Interpolator::new(&spin.jz, value_grid(-nf, nf, 1.0), "J_z")?;
    let mut out = Vec::new();
    for weight in enumerate_weights(Group::Gauss, 3, n)? {
        let Weight::Orthogonal(v) = &weight else { unreachable!() };
        let l = v[0];
        let block = casimir.projector((l * (l + 1)) as f64)?.clone();
        let hw = block.try_mul(jz.projector(l as f64)?)?;
        let cols = lowered_columns(&hw, &spin.lower, 2 * l as usize)?;
        let labelled: Vec<_> =
            cols.into_iter().enumerate().map(|(k, v)| (pattern(vec![vec![l], vec![l - k as i64]]), v)).collect();
        block_units(&weight, &labelled, Some(g.parity(1)), &mut out)?;
    }
    Ok(out)
}

/// Residuals of the emergent-fermion description of three Gaussian copies.
#[derive(Clone, Debug)]
pub struct EmergentFermionReport {
    /// `|| J_z - (n - N_f) ||`.
    pub number_residual: f64,
    /// Distance between the top highest-weight projector and the vacuum
    /// projector of the emergent modes.
    pub vacuum_residual: f64,
    /// Largest anticommutator residual of the emergent modes.
    pub car_residual: f64,
    pub vacuum_projector: SparseOperator,
}

/// Emergent modes `f_mu = (c_mu(1) + i c_mu(2)) / 2` built from dressed
/// Majoranas of copies 1 and 2.
pub fn emergent_fermion_check(n: usize) -> Result<EmergentFermionReport> {
    let cs = space(n, 3)?;
    let g = generators(cs)?;
    let spin = gauss_t3_spin(&g)?;
    let half = C64::new(0.5, 0.0);
    let f: Vec<SparseOperator> =
        (1..=2 * n).map(|mu| g.majorana(mu, 1).lin_comb(half, g.majorana(mu, 2), half * I)).collect::<Result<_>>()?;
    let fd: Vec<SparseOperator> = f.iter().map(|x| x.adjoint()).collect();
    let dim = cs.dim();
    let mut car = 0.0f64;
    for a in 0..2 * n {
        for b in 0..2 * n {
            let target = if a == b { SparseOperator::identity(dim) } else { SparseOperator::zero(dim) };
            car = car.max(f[a].anticommutator(&fd[b])?.distance(&target)?);
            car = car.max(f[a].anticommutator(&f[b])?.frobenius_norm());
        }
    }
    let mut nf = SparseOperator::zero(dim);
    let mut vacuum = SparseOperator::identity(dim);
    for a in 0..2 * n {
        nf = nf.try_add(&fd[a].try_mul(&f[a])?)?;
        vacuum = vacuum.try_mul(&f[a].try_mul(&fd[a])?)?;
    }
    let expected = nf.scale_real(-1.0).shift(C64::new(n as f64, 0.0));
    let number_residual = spin.jz.distance(&expected)?;
    let nfl = n as f64;
    let values = value_grid(-nfl, nfl, 1.0);
    certify_spectrum(&spin.jz, &values, "J_z")?;
    let top = lagrange_projector(&spin.jz, &values, nfl)?;
    let vacuum_residual = top.distance(&vacuum)?;
    Ok(EmergentFermionReport { number_residual, vacuum_residual, car_residual: car, vacuum_projector: vacuum })
}

/// Two commuting `su(2)` algebras of four Gaussian copies.
pub struct T4Generators {
    /// `J_1, J_2, J_3` of the `+` factor, Hermitian.
    pub plus: [SparseOperator; 3],
    pub minus: [SparseOperator; 3],
    pub casimir_plus: SparseOperator,
    pub casimir_minus: SparseOperator,
    pub raise_plus: SparseOperator,
    pub lower_plus: SparseOperator,
    pub raise_minus: SparseOperator,
    pub lower_minus: SparseOperator,
    /// Largest residual of `[J_a, J_b] = i eps_abc J_c` within either factor.
    pub su2_residual: f64,
    /// Largest norm of `[J_a^+, J_b^-]`.
    pub cross_residual: f64,
}

/// Builds and verifies the four-copy generators. The copy-side bilinears are
/// anti-Hermitian, so each combination carries a factor `-i`.
pub fn gauss_t4_generators(n: usize) -> Result<T4Generators> {
    let cs = space(n, 4)?;
    let g = generators(cs)?;
    let q = |a: usize, b: usize| g.qtilde_antisym(a, b);
    let combo = |x: SparseOperator, y: SparseOperator, sign: f64| -> Result<SparseOperator> {
        Ok(x.lin_comb(ONE, &y, C64::new(sign, 0.0))?.scale(C64::new(0.0, -0.5)))
    };
    let build = |sign: f64| -> Result<[SparseOperator; 3]> {
        Ok([combo(q(2, 3), q(1, 4), sign)?, combo(q(3, 1), q(2, 4), sign)?, combo(q(1, 2), q(3, 4), sign)?])
    };
    let plus = build(1.0)?;
    let minus = build(-1.0)?;
    let mut su2_residual = 0.0f64;
    for fam in [&plus, &minus] {
        for a in 0..3 {
            let b = (a + 1) % 3;
            let c = (a + 2) % 3;
            let lhs = fam[a].commutator(&fam[b])?;
            su2_residual = su2_residual.max(lhs.distance(&fam[c].scale(I))?);
        }
    }
    let mut cross_residual = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            cross_residual = cross_residual.max(plus[a].commutator(&minus[b])?.frobenius_norm());
        }
    }
    if su2_residual > 1e-9 || cross_residual > 1e-9 {
        return Err(Error::Verification(format!(
            "four-copy su(2) relations fail (brackets {su2_residual:e}, cross {cross_residual:e})"
        )));
    }
    let ladder = |fam: &[SparseOperator; 3], s: f64| fam[0].lin_comb(ONE, &fam[1], C64::new(0.0, s));
    let raise_plus = ladder(&plus, 1.0)?;
    let lower_plus = ladder(&plus, -1.0)?;
    let raise_minus = ladder(&minus, 1.0)?;
    let lower_minus = ladder(&minus, -1.0)?;
    let casimir_plus = spin_casimir(&plus[2], &raise_plus, &lower_plus)?;
    let casimir_minus = spin_casimir(&minus[2], &raise_minus, &lower_minus)?;
    Ok(T4Generators {
        plus,
        minus,
        casimir_plus,
        casimir_minus,
        raise_plus,
        lower_plus,
        raise_minus,
        lower_minus,
        su2_residual,
        cross_residual,
    })
}

/// Four-copy Gaussian basis. The so(4) weight `(l1, l2)` corresponds to the
/// spins `j+ = (l1 + l2)/2` and `j- = (l1 - l2)/2`.
pub fn gauss_t4_basis(n: usize) -> Result<Vec<BasisElement>> {
    let gens = gauss_t4_generators(n)?;
    let g = generators(space(n, 4)?)?;
    let nf = n as f64;
    let cas = casimir_values(2 * n);
    let mag = value_grid(-nf, nf, 0.5);
    let mut cp = Interpolator::new(&gens.casimir_plus, cas.clone(), "J^2_+")?;
    let mut cm = Interpolator::new(&gens.casimir_minus, cas, "J^2_-")?;
    let mut zp = Interpolator::new(&gens.plus[2], mag.clone(), "J_3^+")?;
    let mut zm = Interpolator::new(&gens.minus[2], mag, "J_3^-")?;
    let mut out = Vec::new();
    let mut covered = SparseOperator::zero(g.space.dim());
    for weight in enumerate_weights(Group::Gauss, 4, n)? {
        let Weight::Orthogonal(v) = &weight else { unreachable!() };
        let twice_plus = (v[0] + v[1]) as usize;
        let twice_minus = (v[0] - v[1]) as usize;
        let jp = twice_plus as f64 / 2.0;
        let jm = twice_minus as f64 / 2.0;
        let block = cp.projector(jp * (jp + 1.0))?.try_mul(cm.projector(jm * (jm + 1.0))?)?;
        covered = covered.try_add(&block)?;
        let hw = block.try_mul(zp.projector(jp)?)?.try_mul(zm.projector(jm)?)?;
        let mut labelled = Vec::new();
        for (km, vm) in lowered_columns(&hw, &gens.lower_minus, twice_minus)?.into_iter().enumerate() {
            for (kp, v) in lowered_columns(&vm, &gens.lower_plus, twice_plus)?.into_iter().enumerate() {
                let label = StateLabel::Spins {
                    twice_m_plus: twice_plus as i64 - 2 * kp as i64,
                    twice_m_minus: twice_minus as i64 - 2 * km as i64,
                };
                labelled.push((label, v));
            }
        }
        labelled.sort_by(|a, b| a.0.cmp(&b.0));
        block_units(&weight, &labelled, Some(g.parity(1)), &mut out)?;
    }
    let gap = covered.distance(&SparseOperator::identity(g.space.dim()))?;
    if gap > SPECTRUM_TOL {
        return Err(Error::Verification(format!(
            "four-copy blocks do not resolve the identity (residual {gap:e}); some spin pair exceeds the weight cap"
        )));
    }
    Ok(out)
}

/// Explicit basis for `(group, t)` where one is implemented.
pub fn commutant_basis(group: Group, t: usize, n: usize) -> Result<Vec<BasisElement>> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    match (group, t) {
        (Group::Pp, 1) => pp_t1_basis(n),
        (Group::Pp, 2) => pp_t2_basis(n),
        (Group::Gauss, 1) => gauss_t1_basis(n),
        (Group::Gauss, 2) => gauss_t2_basis(n),
        (Group::Gauss, 3) => gauss_t3_basis(n),
        (Group::Gauss, 4) => gauss_t4_basis(n),
        _ => domain(format!("no explicit basis for {group} with t={t}; only weights and patterns are available")),
    }
}

/// Largest residual of `X_{a,b} X_{c,d} = delta_{bc} X_{a,d}` over the plain
/// elements, including products across blocks (which must vanish).
pub fn matrix_unit_residual(elements: &[BasisElement]) -> Result<f64> {
    let plain: Vec<&BasisElement> = elements.iter().filter(|e| e.parity == ParityFlag::Plain).collect();
    let index: HashMap<(&Weight, &StateLabel, &StateLabel), usize> =
        plain.iter().enumerate().map(|(i, e)| ((&e.weight, &e.row, &e.col), i)).collect();
    let mut worst = 0.0f64;
    for x in &plain {
        for y in &plain {
            let prod = x.op.try_mul(&y.op)?;
            let r = if x.weight == y.weight && x.col == y.row {
                prod.distance(&plain[index[&(&x.weight, &x.row, &y.col)]].op)?
            } else {
                prod.frobenius_norm()
            };
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Trace-inner-product structure of a basis.
#[derive(Clone, Debug)]
pub struct GramReport {
    /// Largest `|tr(X^dagger Y)|` between distinct elements.
    pub max_overlap: f64,
    /// Largest deviation of `tr(X^dagger X)` from its block constant.
    pub max_block_deviation: f64,
    /// Numerical rank of the Gram matrix.
    pub rank: usize,
}

pub fn gram_report(elements: &[BasisElement]) -> Result<GramReport> {
    let count = elements.len();
    let mut gram = DMatrix::<C64>::zeros(count, count);
    for i in 0..count {
        for j in i..count {
            let v = elements[i].op.hs_inner(&elements[j].op)?;
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
    }
    let mut max_overlap = 0.0f64;
    let mut block_constant: HashMap<(&Weight, ParityFlag), f64> = HashMap::new();
    let mut max_block_deviation = 0.0f64;
    for i in 0..count {
        for j in 0..count {
            if i != j {
                max_overlap = max_overlap.max(gram[(i, j)].norm());
            }
        }
        let e = &elements[i];
        let c = *block_constant.entry((&e.weight, e.parity)).or_insert(gram[(i, i)].re);
        max_block_deviation = max_block_deviation.max((gram[(i, i)].re - c).abs());
    }
    let sv = gram.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-9 * smax).count();
    Ok(GramReport { max_overlap, max_block_deviation, rank })
}
