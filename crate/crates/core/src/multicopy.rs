// SPDX-License-Identifier: Apache-2.0

//! Parity-dressed operators on `t` copies of the `n`-mode Fock space and the
//! two generator families of the copy-side Lie algebras: the hopping
//! operators `Omega_jk` (number-preserving case) and the Majorana bilinears
//! `Q_jk` (general case).
//!
//! Copy 1 is the leftmost tensor factor.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::clifford_core::{majorana_pattern, pauli_string, Pauli, SparseOperator, C64, I};
use crate::error::{domain, Error, Result};

/// Default cap on the total number of qubits `n * t`.
pub const DEFAULT_MAX_QUBITS: usize = 22;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "FERMICOMM_MAX_QUBITS";

/// Qubit cap in force, honoring the environment override.
pub fn max_qubits() -> usize {
    max_qubits_override().unwrap_or(DEFAULT_MAX_QUBITS)
}

pub(crate) fn max_qubits_override() -> Option<usize> {
    std::env::var(MAX_QUBITS_ENV).ok().and_then(|v| v.trim().parse().ok())
}

/// `t` copies of an `n`-mode system, `2^(n t)` dimensional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CopySpace {
    n: usize,
    t: usize,
}

impl CopySpace {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        Self::with_cap(n, t, max_qubits())
    }

    pub fn with_cap(n: usize, t: usize, cap: usize) -> Result<Self> {
        if n == 0 || t == 0 {
            return domain(format!("copy space needs n >= 1 and t >= 1 (got n={n}, t={t})"));
        }
        if n * t > cap {
            return Err(Error::Resource(format!("n*t = {} qubits exceeds the cap of {cap}", n * t)));
        }
        Ok(CopySpace { n, t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn qubits(&self) -> usize {
        self.n * self.t
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    fn check_copy(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.t {
            return domain(format!("copy index {j} outside 1..={}", self.t));
        }
        Ok(())
    }

    /// Lifts a single-copy Pauli pattern to copy `j` with parity strings on
    /// every earlier copy.
    fn dressed_pattern(&self, j: usize, local: &[Pauli]) -> Vec<Pauli> {
        let mut ops = vec![Pauli::I; self.qubits()];
        for op in ops.iter_mut().take((j - 1) * self.n) {
            *op = Pauli::Z;
        }
        ops[(j - 1) * self.n..j * self.n].copy_from_slice(local);
        ops
    }
}

/// Dressed Majorana `Gamma_1 ... Gamma_{j-1} c_mu` acting on copy `j`.
pub fn dressed_majorana(cs: CopySpace, mu: usize, j: usize) -> Result<SparseOperator> {
    cs.check_copy(j)?;
    let local = majorana_pattern(cs.n, mu)?;
    Ok(pauli_string(&cs.dressed_pattern(j, &local)))
}

/// Dressed ladder operator on copy `j`.
pub fn dressed_ladder(cs: CopySpace, p: usize, j: usize, dagger: bool) -> Result<SparseOperator> {
    if p == 0 || p > cs.n {
        return domain(format!("mode index {p} outside 1..={}", cs.n));
    }
    let odd = dressed_majorana(cs, 2 * p - 1, j)?;
    let even = dressed_majorana(cs, 2 * p, j)?;
    let phase = if dagger { -I } else { I };
    odd.lin_comb(C64::new(0.5, 0.0), &even, phase * 0.5)
}

/// Parity of copy `j` alone.
pub fn copy_parity(cs: CopySpace, j: usize) -> Result<SparseOperator> {
    cs.check_copy(j)?;
    let mut ops = vec![Pauli::I; cs.qubits()];
    for op in ops.iter_mut().skip((j - 1) * cs.n).take(cs.n) {
        *op = Pauli::Z;
    }
    Ok(pauli_string(&ops))
}

/// Every dressed operator and generator of one copy space, built once.
#[derive(Debug)]
pub struct Generators {
    pub space: CopySpace,
    majoranas: Vec<Vec<SparseOperator>>,
    creators: Vec<Vec<SparseOperator>>,
    annihilators: Vec<Vec<SparseOperator>>,
    parities: Vec<SparseOperator>,
    omegas: Vec<Vec<SparseOperator>>,
    qtildes: Vec<Vec<Option<SparseOperator>>>,
}

impl Generators {
    fn build(cs: CopySpace) -> Result<Self> {
        let (n, t) = (cs.n, cs.t);
        let mut majoranas = Vec::with_capacity(t);
        let mut creators = Vec::with_capacity(t);
        let mut annihilators = Vec::with_capacity(t);
        let mut parities = Vec::with_capacity(t);
        for j in 1..=t {
            majoranas.push((1..=2 * n).map(|mu| dressed_majorana(cs, mu, j)).collect::<Result<Vec<_>>>()?);
            creators.push((1..=n).map(|p| dressed_ladder(cs, p, j, true)).collect::<Result<Vec<_>>>()?);
            annihilators.push((1..=n).map(|p| dressed_ladder(cs, p, j, false)).collect::<Result<Vec<_>>>()?);
            parities.push(copy_parity(cs, j)?);
        }
        let dim = cs.dim();
        let mut omegas = Vec::with_capacity(t);
        for j in 0..t {
            let mut row = Vec::with_capacity(t);
            for k in 0..t {
                let mut acc = SparseOperator::zero(dim);
                for p in 0..n {
                    acc = acc.try_add(&creators[j][p].try_mul(&annihilators[k][p])?)?;
                }
                row.push(acc);
            }
            omegas.push(row);
        }
        let mut qtildes = Vec::with_capacity(t);
        for j in 0..t {
            let mut row = Vec::with_capacity(t);
            for k in 0..t {
                if j < k {
                    let mut acc = SparseOperator::zero(dim);
                    for mu in 0..2 * n {
                        acc = acc.try_add(&majoranas[j][mu].try_mul(&majoranas[k][mu])?)?;
                    }
                    row.push(Some(acc.scale_real(0.5)));
                } else {
                    row.push(None);
                }
            }
            qtildes.push(row);
        }
        Ok(Generators { space: cs, majoranas, creators, annihilators, parities, omegas, qtildes })
    }

    /// Dressed Majorana, 1-based indices.
    pub fn majorana(&self, mu: usize, j: usize) -> &SparseOperator {
        &self.majoranas[j - 1][mu - 1]
    }

    /// Dressed creation (`dagger`) or annihilation operator, 1-based indices.
    pub fn ladder(&self, p: usize, j: usize, dagger: bool) -> &SparseOperator {
        if dagger {
            &self.creators[j - 1][p - 1]
        } else {
            &self.annihilators[j - 1][p - 1]
        }
    }

    pub fn parity(&self, j: usize) -> &SparseOperator {
        &self.parities[j - 1]
    }

    pub fn omega(&self, j: usize, k: usize) -> &SparseOperator {
        &self.omegas[j - 1][k - 1]
    }

    /// `Q_jk` for `j < k`.
    pub fn qtilde(&self, j: usize, k: usize) -> &SparseOperator {
        self.qtildes[j - 1][k - 1].as_ref().expect("qtilde requires j < k")
    }

    /// Antisymmetric extension: `Q_kj = -Q_jk` and zero on the diagonal.
    pub fn qtilde_antisym(&self, j: usize, k: usize) -> SparseOperator {
        match j.cmp(&k) {
            std::cmp::Ordering::Less => self.qtilde(j, k).clone(),
            std::cmp::Ordering::Greater => -self.qtilde(k, j),
            std::cmp::Ordering::Equal => SparseOperator::zero(self.space.dim()),
        }
    }
}

type Cache = RwLock<HashMap<CopySpace, Arc<Generators>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized generator tables for a copy space.
pub fn generators(cs: CopySpace) -> Result<Arc<Generators>> {
    if let Some(g) = cache().read().expect("generator cache poisoned").get(&cs) {
        return Ok(Arc::clone(g));
    }
    let built = Arc::new(Generators::build(cs)?);
    let mut w = cache().write().expect("generator cache poisoned");
    Ok(Arc::clone(w.entry(cs).or_insert(built)))
}

/// Hopping generator `sum_p a_p^dagger(j) a_p(k)`.
pub fn omega(cs: CopySpace, j: usize, k: usize) -> Result<SparseOperator> {
    cs.check_copy(j)?;
    cs.check_copy(k)?;
    Ok(generators(cs)?.omega(j, k).clone())
}

/// Majorana bilinear `(1/2) sum_mu c_mu(j) c_mu(k)` for `j < k`.
pub fn qtilde(cs: CopySpace, j: usize, k: usize) -> Result<SparseOperator> {
    cs.check_copy(j)?;
    cs.check_copy(k)?;
    if j >= k {
        return domain(format!("qtilde needs j < k (got j={j}, k={k}); the diagonal is a multiple of the identity"));
    }
    Ok(generators(cs)?.qtilde(j, k).clone())
}

/// Kronecker delta as a coefficient.
fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Right-hand side of the `u(t)` bracket `[Omega_jk, Omega_j'k']`.
pub fn omega_bracket_rhs(g: &Generators, j: usize, k: usize, jp: usize, kp: usize) -> SparseOperator {
    let a = g.omega(j, kp).scale_real(delta(k, jp));
    let b = g.omega(jp, k).scale_real(delta(j, kp));
    &a - &b
}

/// Right-hand side of the `so(t)` bracket `[Q_jk, Q_j'k']`, using the
/// antisymmetric extension of `Q`.
pub fn qtilde_bracket_rhs(g: &Generators, j: usize, k: usize, jp: usize, kp: usize) -> SparseOperator {
    let terms = [
        (delta(k, jp), g.qtilde_antisym(j, kp)),
        (delta(j, kp), g.qtilde_antisym(k, jp)),
        (-delta(k, kp), g.qtilde_antisym(j, jp)),
        (-delta(j, jp), g.qtilde_antisym(k, kp)),
    ];
    let mut acc = SparseOperator::zero(g.space.dim());
    for (c, op) in terms.iter() {
        if *c != 0.0 {
            acc = &acc + &op.scale_real(*c);
        }
    }
    acc
}

/// Largest Frobenius residual of the two bracket identities over every index
/// combination, returned as `(omega_residual, qtilde_residual)`.
pub fn lie_closure_residuals(cs: CopySpace) -> Result<(f64, f64)> {
    let g = generators(cs)?;
    let t = cs.t;
    let mut worst_omega = 0.0f64;
    for j in 1..=t {
        for k in 1..=t {
            for jp in 1..=t {
                for kp in 1..=t {
                    let lhs = g.omega(j, k).commutator(g.omega(jp, kp))?;
                    let r = lhs.distance(&omega_bracket_rhs(&g, j, k, jp, kp))?;
                    worst_omega = worst_omega.max(r);
                }
            }
        }
    }
    let mut worst_q = 0.0f64;
    let pairs: Vec<(usize, usize)> = (1..=t).flat_map(|j| (j + 1..=t).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        for &(jp, kp) in &pairs {
            let lhs = g.qtilde(j, k).commutator(g.qtilde(jp, kp))?;
            let r = lhs.distance(&qtilde_bracket_rhs(&g, j, k, jp, kp))?;
            worst_q = worst_q.max(r);
        }
    }
    Ok((worst_omega, worst_q))
}

/// `R^{(x)t} A R^{dag (x)t}`, conjugating one copy factor at a time so the
/// dense `t`-fold tensor power is never formed.
pub fn conjugate_copies(cs: CopySpace, r: &SparseOperator, a: &SparseOperator) -> Result<SparseOperator> {
    let local = 1usize << cs.n;
    if r.dim() != local || a.dim() != cs.dim() {
        return domain(format!(
            "conjugation needs a {local}-dimensional unitary and a {}-dimensional operator",
            cs.dim()
        ));
    }
    let mut acc = a.clone();
    for j in 0..cs.t {
        let left = SparseOperator::identity(1 << (cs.n * j));
        let right = SparseOperator::identity(1 << (cs.n * (cs.t - j - 1)));
        let factor = left.tensor(r).tensor(&right);
        acc = factor.try_mul(&acc)?.try_mul(&factor.adjoint())?;
    }
    Ok(acc)
}

/// Relative Frobenius residual `||R^{(x)t} A R^{dag (x)t} - A|| / ||A||`.
pub fn membership_residual(cs: CopySpace, r: &SparseOperator, a: &SparseOperator) -> Result<f64> {
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(conjugate_copies(cs, r, a)?.distance(a)? / norm)
}
