// SPDX-License-Identifier: Apache-2.0

//! Sparse complex operators, dense state vectors, and the single-copy
//! Majorana and ladder algebra under the Jordan-Wigner mapping.
//!
//! Qubit 1 is the most significant bit of a basis index, so the occupation
//! bitstring `b_1 b_2 ... b_n` sits at index `sum_k b_k 2^(n-k)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

/// Entries with smaller magnitude are dropped after every operation.
pub const PRUNE_TOL: f64 = 1e-14;

const PAR_ROWS: usize = 2048;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix stored row by row with sorted column indices.
///
/// Iterating [`SparseOperator::entries`] yields the canonical coordinate
/// list sorted by `(row, col)` with no duplicates.
#[derive(Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl fmt::Debug for SparseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparseOperator").field("dim", &self.dim).field("nnz", &self.nnz()).finish()
    }
}

type Row = Vec<(usize, C64)>;

struct Scratch {
    acc: Vec<C64>,
    mark: Vec<bool>,
    touched: Vec<usize>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Scratch { acc: vec![ZERO; dim], mark: vec![false; dim], touched: Vec::new() }
    }
}

impl SparseOperator {
    fn from_rows(dim: usize, rows: Vec<Row>) -> Self {
        debug_assert_eq!(rows.len(), dim);
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(total);
        let mut vals = Vec::with_capacity(total);
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v.norm() >= PRUNE_TOL {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseOperator { dim, row_ptr, cols, vals }
    }

    pub fn zero(dim: usize) -> Self {
        SparseOperator { dim, row_ptr: vec![0; dim + 1], cols: vec![], vals: vec![] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![ONE; dim])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let rows = diag.iter().enumerate().map(|(i, &v)| vec![(i, v)]).collect();
        Self::from_rows(diag.len(), rows)
    }

    /// Builds an operator from arbitrary coordinates; duplicates are summed.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Result<Self> {
        let mut rows: Vec<Row> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return domain(format!("coordinate ({r}, {c}) outside a {dim}x{dim} operator"));
            }
            rows[r].push((c, v));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: Row = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            *row = merged;
        }
        Ok(Self::from_rows(dim, rows))
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return domain(format!("dense matrix is {}x{}, not square", m.nrows(), m.ncols()));
        }
        let dim = m.nrows();
        let rows = (0..dim).map(|r| (0..dim).map(|c| (c, m[(r, c)])).collect()).collect();
        Ok(Self::from_rows(dim, rows))
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// Canonical coordinate list, sorted by `(row, col)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => ZERO,
        }
    }

    fn check_dim(&self, other: &Self, what: &str) -> Result<()> {
        if self.dim != other.dim {
            return domain(format!("{what}: dimension mismatch {} vs {}", self.dim, other.dim));
        }
        Ok(())
    }

    pub fn scale(&self, c: C64) -> Self {
        let rows = (0..self.dim).map(|r| self.row(r).map(|(col, v)| (col, v * c)).collect()).collect();
        Self::from_rows(self.dim, rows)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        self.check_dim(other, "linear combination")?;
        let rows = (0..self.dim)
            .map(|r| {
                let mut out = Vec::new();
                let mut x = self.row(r).peekable();
                let mut y = other.row(r).peekable();
                loop {
                    match (x.peek().copied(), y.peek().copied()) {
                        (Some((cx, vx)), Some((cy, vy))) => {
                            if cx == cy {
                                out.push((cx, a * vx + b * vy));
                                x.next();
                                y.next();
                            } else if cx < cy {
                                out.push((cx, a * vx));
                                x.next();
                            } else {
                                out.push((cy, b * vy));
                                y.next();
                            }
                        }
                        (Some((cx, vx)), None) => {
                            out.push((cx, a * vx));
                            x.next();
                        }
                        (None, Some((cy, vy))) => {
                            out.push((cy, b * vy));
                            y.next();
                        }
                        (None, None) => break,
                    }
                }
                out
            })
            .collect();
        Ok(Self::from_rows(self.dim, rows))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(ONE, other, ONE)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(ONE, other, -ONE)
    }

    /// Adds `c` times the identity.
    pub fn shift(&self, c: C64) -> Self {
        self.lin_comb(ONE, &Self::identity(self.dim), c).expect("same dimension")
    }

    fn product_row(&self, other: &Self, r: usize, scratch: &mut Scratch) -> Row {
        let Scratch { acc, mark, touched } = scratch;
        for (k, a) in self.row(r) {
            for (c, b) in other.row(k) {
                if !mark[c] {
                    mark[c] = true;
                    touched.push(c);
                }
                acc[c] += a * b;
            }
        }
        touched.sort_unstable();
        let row = touched.iter().map(|&c| (c, acc[c])).collect();
        for &c in touched.iter() {
            acc[c] = ZERO;
            mark[c] = false;
        }
        touched.clear();
        row
    }

    /// Matrix product `self * other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other, "product")?;
        let dim = self.dim;
        let rows: Vec<Row> = if dim >= PAR_ROWS {
            (0..dim)
                .into_par_iter()
                .map_init(|| Scratch::new(dim), |scratch, r| self.product_row(other, r, scratch))
                .collect()
        } else {
            let mut scratch = Scratch::new(dim);
            (0..dim).map(|r| self.product_row(other, r, &mut scratch)).collect()
        };
        Ok(Self::from_rows(dim, rows))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_add(&other.try_mul(self)?)
    }

    pub fn adjoint(&self) -> Self {
        let mut rows: Vec<Row> = vec![Vec::new(); self.dim];
        for (r, c, v) in self.entries() {
            rows[c].push((r, v.conj()));
        }
        Self::from_rows(self.dim, rows)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|r| self.get(r, r)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().fold(0.0, |s, v| s + v.norm_sqr()).sqrt()
    }

    /// Hilbert-Schmidt inner product `tr(self^dagger other)`.
    pub fn hs_inner(&self, other: &Self) -> Result<C64> {
        self.check_dim(other, "inner product")?;
        let mut s = ZERO;
        for r in 0..self.dim {
            let mut y = other.row(r).peekable();
            for (c, v) in self.row(r) {
                while let Some(&(cy, _)) = y.peek() {
                    if cy < c {
                        y.next();
                    } else {
                        break;
                    }
                }
                if let Some(&(cy, w)) = y.peek() {
                    if cy == c {
                        s += v.conj() * w;
                    }
                }
            }
        }
        Ok(s)
    }

    /// Frobenius distance `||self - other||`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.frobenius_norm())
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim {
            return domain(format!("operator of dim {} applied to state of dim {}", self.dim, psi.dim()));
        }
        let amps = &psi.amps;
        let out = (0..self.dim).map(|r| self.row(r).map(|(c, v)| v * amps[c]).sum()).collect();
        Ok(StateVector { amps: out })
    }

    /// Kronecker product with `self` on the most significant block.
    pub fn tensor(&self, other: &Self) -> Self {
        let d = other.dim;
        let dim = self.dim * d;
        let mut rows: Vec<Row> = Vec::with_capacity(dim);
        for ra in 0..self.dim {
            for rb in 0..d {
                let mut row = Vec::new();
                for (ca, va) in self.row(ra) {
                    for (cb, vb) in other.row(rb) {
                        row.push((ca * d + cb, va * vb));
                    }
                }
                rows.push(row);
            }
        }
        Self::from_rows(dim, rows)
    }

    pub fn tensor_power(&self, t: usize) -> Self {
        let mut out = Self::identity(1);
        for _ in 0..t {
            out = out.tensor(self);
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Relabels qubits: bit `q` of the input index (qubit 0 most significant)
    /// moves to position `perm[q]` of the output index.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let nq = perm.len();
        if 1usize << nq != self.dim {
            return domain(format!("permutation of {nq} qubits on a {}-dim operator", self.dim));
        }
        let mut seen = vec![false; nq];
        for &p in perm {
            if p >= nq || seen[p] {
                return domain("qubit relabeling is not a permutation");
            }
            seen[p] = true;
        }
        let map = |x: usize| {
            let mut y = 0usize;
            for (q, &p) in perm.iter().enumerate() {
                if x >> (nq - 1 - q) & 1 == 1 {
                    y |= 1 << (nq - 1 - p);
                }
            }
            y
        };
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (map(r), map(c), v)))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.distance(&self.adjoint()).map(|d| d <= tol).unwrap_or(false)
    }
}

impl Add for &SparseOperator {
    type Output = SparseOperator;
    fn add(self, rhs: Self) -> SparseOperator {
        self.try_add(rhs).expect("operator dimensions must agree")
    }
}

impl Sub for &SparseOperator {
    type Output = SparseOperator;
    fn sub(self, rhs: Self) -> SparseOperator {
        self.try_sub(rhs).expect("operator dimensions must agree")
    }
}

impl Mul for &SparseOperator {
    type Output = SparseOperator;
    fn mul(self, rhs: Self) -> SparseOperator {
        self.try_mul(rhs).expect("operator dimensions must agree")
    }
}

impl Mul<C64> for &SparseOperator {
    type Output = SparseOperator;
    fn mul(self, rhs: C64) -> SparseOperator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &SparseOperator {
    type Output = SparseOperator;
    fn mul(self, rhs: f64) -> SparseOperator {
        self.scale_real(rhs)
    }
}

impl Neg for &SparseOperator {
    type Output = SparseOperator;
    fn neg(self) -> SparseOperator {
        self.scale_real(-1.0)
    }
}

/// Dense vector of complex amplitudes over computational basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return domain("state vector must have positive dimension");
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return domain("state vector has non-finite amplitudes");
        }
        Ok(StateVector { amps })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return domain(format!("basis index {index} outside dimension {dim}"));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().fold(0.0, |s, a| s + a.norm_sqr()).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return domain("cannot normalize the zero vector");
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// Errors unless the norm is within 1e-12 of one.
    pub fn require_normalized(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() >= 1e-12 {
            return domain(format!("state is not normalized (norm {n})"));
        }
        Ok(())
    }

    pub fn scale(&self, c: C64) -> Self {
        StateVector { amps: self.amps.iter().map(|a| a * c).collect() }
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return domain("inner product of states with different dimensions");
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return domain("difference of states with different dimensions");
        }
        Ok(StateVector { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect() })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return domain("sum of states with different dimensions");
        }
        Ok(StateVector { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        StateVector { amps }
    }

    pub fn tensor_power(&self, t: usize) -> Self {
        let mut out = StateVector { amps: vec![ONE] };
        for _ in 0..t {
            out = out.tensor(self);
        }
        out
    }

    /// `<self|A|self>`.
    pub fn expectation(&self, a: &SparseOperator) -> Result<C64> {
        self.inner(&a.apply(self)?)
    }
}

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Tensor product of Paulis; `ops[0]` acts on qubit 1 (most significant).
pub fn pauli_string(ops: &[Pauli]) -> SparseOperator {
    let nq = ops.len();
    let dim = 1usize << nq;
    let mut xmask = 0usize;
    let mut zmask = 0usize;
    let mut ny = 0u32;
    for (q, op) in ops.iter().enumerate() {
        let bit = 1usize << (nq - 1 - q);
        match op {
            Pauli::I => {}
            Pauli::X => xmask |= bit,
            Pauli::Y => {
                xmask |= bit;
                zmask |= bit;
                ny += 1;
            }
            Pauli::Z => zmask |= bit,
        }
    }
    let global = I.powu(ny);
    let rows = (0..dim)
        .map(|r| {
            let c = r ^ xmask;
            let sign = if (c & zmask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            vec![(c, global * sign)]
        })
        .collect();
    SparseOperator::from_rows(dim, rows)
}

fn check_modes(n: usize) -> Result<()> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    if n > 30 {
        return Err(Error::Resource(format!("{n} modes exceeds the addressable state space")));
    }
    Ok(())
}

/// Pauli pattern of Majorana `mu` (1-based) on `n` modes.
pub(crate) fn majorana_pattern(n: usize, mu: usize) -> Result<Vec<Pauli>> {
    if mu == 0 || mu > 2 * n {
        return domain(format!("Majorana index {mu} outside 1..={}", 2 * n));
    }
    let p = mu.div_ceil(2);
    let mut ops = vec![Pauli::I; n];
    for op in ops.iter_mut().take(p - 1) {
        *op = Pauli::Z;
    }
    ops[p - 1] = if mu % 2 == 1 { Pauli::X } else { Pauli::Y };
    Ok(ops)
}

/// Jordan-Wigner Majorana operator `c_mu`, `1 <= mu <= 2n`.
pub fn majorana(n: usize, mu: usize) -> Result<SparseOperator> {
    check_modes(n)?;
    Ok(pauli_string(&majorana_pattern(n, mu)?))
}

/// Ladder operator `a_p` (or `a_p^dagger`), `1 <= p <= n`.
pub fn ladder(n: usize, p: usize, dagger: bool) -> Result<SparseOperator> {
    check_modes(n)?;
    if p == 0 || p > n {
        return domain(format!("mode index {p} outside 1..={n}"));
    }
    let odd = majorana(n, 2 * p - 1)?;
    let even = majorana(n, 2 * p)?;
    let phase = if dagger { -I } else { I };
    odd.lin_comb(C64::new(0.5, 0.0), &even, phase * 0.5)
}

/// Fermionic parity `Z^n`.
pub fn parity_op(n: usize) -> Result<SparseOperator> {
    check_modes(n)?;
    Ok(pauli_string(&vec![Pauli::Z; n]))
}

/// Total number operator, diagonal with the Hamming weight of each index.
pub fn number_op(n: usize) -> Result<SparseOperator> {
    check_modes(n)?;
    let diag: Vec<C64> = (0..1usize << n).map(|b| C64::new(b.count_ones() as f64, 0.0)).collect();
    Ok(SparseOperator::from_diagonal(&diag))
}

/// Basis index of an occupation bitstring given as modes `1..=n`.
pub fn occupation_index(n: usize, occupied: &[usize]) -> Result<usize> {
    let mut idx = 0usize;
    for &p in occupied {
        if p == 0 || p > n {
            return domain(format!("mode index {p} outside 1..={n}"));
        }
        let bit = 1usize << (n - p);
        if idx & bit != 0 {
            return domain(format!("mode {p} listed twice"));
        }
        idx |= bit;
    }
    Ok(idx)
}
