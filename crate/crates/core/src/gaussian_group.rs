// SPDX-License-Identifier: Apache-2.0

//! Haar sampling of `SO(2n)` and `U(n)` and compilation of group elements into
//! Gaussian unitaries on the `2^n`-dimensional Fock space.
//!
//! Randomness comes from ChaCha20 with a 64-bit seed; sample `i` of a run
//! draws from stream `i` of that seed, so samples are independent of the
//! order in which they are evaluated.

use nalgebra::{DMatrix, Schur};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::clifford_core::{ladder, majorana, occupation_index, SparseOperator, StateVector, C64, ONE, ZERO};
use crate::error::{domain, Error, Result};

/// Largest mode count accepted by the dense compilation routines.
pub const MAX_COMPILE_MODES: usize = 6;

/// Distance to the `-1` branch cut below which a logarithm is refused.
pub const BRANCH_CUT_TOL: f64 = 1e-8;

const GROUP_TOL: f64 = 1e-10;

/// Random stream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Real `2n x 2n` orthogonal matrix with unit determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix(DMatrix<f64>);

impl OrthogonalMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || m.nrows() == 0 {
            return domain(format!("orthogonal matrix must be 2n x 2n, got {}x{}", m.nrows(), m.ncols()));
        }
        let dev = (m.transpose() * &m - DMatrix::identity(m.nrows(), m.ncols())).norm();
        if dev >= GROUP_TOL {
            return domain(format!("matrix is not orthogonal (residual {dev:e})"));
        }
        let det = m.determinant();
        if (det - 1.0).abs() >= GROUP_TOL {
            return domain(format!("orthogonal matrix has determinant {det}, expected +1"));
        }
        Ok(OrthogonalMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        OrthogonalMatrix(DMatrix::identity(2 * n, 2 * n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn compose(&self, other: &Self) -> Self {
        OrthogonalMatrix(&self.0 * &other.0)
    }
}

/// Complex `n x n` unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(DMatrix<C64>);

impl UnitaryMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return domain(format!("unitary matrix must be square, got {}x{}", m.nrows(), m.ncols()));
        }
        let dev = (m.adjoint() * &m - DMatrix::identity(m.nrows(), m.ncols())).norm();
        if dev >= GROUP_TOL {
            return domain(format!("matrix is not unitary (residual {dev:e})"));
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix(DMatrix::identity(n, n))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.nrows()
    }
}

/// Haar-random element of `SO(2n)`.
pub fn sample_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<OrthogonalMatrix> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    let d = 2 * n;
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(d - 1).neg_mut();
    }
    Ok(OrthogonalMatrix(q))
}

/// Haar-random element of `U(n)`.
pub fn sample_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    let g = DMatrix::<C64>::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    Ok(UnitaryMatrix(q))
}

/// Principal logarithm of a unitary matrix from its complex Schur form.
fn unitary_log(u: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (q, t) = Schur::new(u.clone()).unpack();
    let d = u.nrows();
    let mut diag = DMatrix::<C64>::zeros(d, d);
    for k in 0..d {
        let z = t[(k, k)];
        let arg = z.arg();
        if std::f64::consts::PI - arg.abs() < BRANCH_CUT_TOL {
            return Err(Error::BranchCut(format!("eigenvalue {z} is within {BRANCH_CUT_TOL:e} of -1")));
        }
        diag[(k, k)] = C64::new(z.norm().ln(), arg);
    }
    Ok(&q * diag * q.adjoint())
}

/// Real antisymmetric principal logarithm of an `SO(2n)` element.
pub fn orthogonal_log(u: &OrthogonalMatrix) -> Result<DMatrix<f64>> {
    let uc = u.0.map(|x| C64::new(x, 0.0));
    let l = unitary_log(&uc)?;
    let imag = l.map(|z| z.im).norm();
    if imag > 1e-8 {
        return Err(Error::BranchCut(format!("logarithm is not real (imaginary part {imag:e})")));
    }
    let re = l.map(|z| z.re);
    Ok((&re - re.transpose()) * 0.5)
}

/// `exp(G)` for anti-Hermitian `G`, through the eigendecomposition of the
/// Hermitian matrix `iG`.
fn exp_anti_hermitian(g: &DMatrix<C64>) -> DMatrix<C64> {
    let h = g * C64::new(0.0, 1.0);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let phases = eig.eigenvalues.map(|x| C64::new(0.0, -x).exp());
    &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

fn check_compile_modes(n: usize) -> Result<()> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    if n > MAX_COMPILE_MODES {
        return Err(Error::Resource(format!("dense compilation is limited to n <= {MAX_COMPILE_MODES} (got {n})")));
    }
    Ok(())
}

/// Gaussian unitary `R` with `R c_mu R^dagger = sum_nu U_{mu nu} c_nu`.
///
/// The group element is unique up to a global sign.
pub fn compile_gaussian(u: &OrthogonalMatrix) -> Result<SparseOperator> {
    let n = u.modes();
    check_compile_modes(n)?;
    let l = orthogonal_log(u)?;
    // exp(G) with G = -1/2 sum_{mu<nu} L_{mu nu} c_mu c_nu rotates c by exp(L).
    let c: Vec<SparseOperator> = (1..=2 * n).map(|mu| majorana(n, mu)).collect::<Result<_>>()?;
    let dim = 1usize << n;
    let mut g = SparseOperator::zero(dim);
    for mu in 0..2 * n {
        for nu in mu + 1..2 * n {
            if l[(mu, nu)] != 0.0 {
                g = &g + &(&c[mu] * &c[nu]).scale_real(-0.5 * l[(mu, nu)]);
            }
        }
    }
    SparseOperator::from_dense(&exp_anti_hermitian(&g.to_dense()))
}

/// Number-preserving Gaussian unitary with
/// `R a_p^dagger R^dagger = sum_q U_{qp} a_q^dagger`.
pub fn compile_pp_gaussian(u: &UnitaryMatrix) -> Result<SparseOperator> {
    let n = u.modes();
    check_compile_modes(n)?;
    let l = unitary_log(&u.0)?;
    let dim = 1usize << n;
    let create: Vec<SparseOperator> = (1..=n).map(|p| ladder(n, p, true)).collect::<Result<_>>()?;
    let destroy: Vec<SparseOperator> = (1..=n).map(|p| ladder(n, p, false)).collect::<Result<_>>()?;
    let mut g = SparseOperator::zero(dim);
    for p in 0..n {
        for q in 0..n {
            if l[(p, q)] != ZERO {
                g = &g + &(&create[p] * &destroy[q]).scale(l[(p, q)]);
            }
        }
    }
    SparseOperator::from_dense(&exp_anti_hermitian(&g.to_dense()))
}

/// Largest Frobenius residual of `R c_mu R^dagger - sum_nu U_{mu nu} c_nu`.
pub fn majorana_covariance_residual(u: &OrthogonalMatrix, r: &SparseOperator) -> Result<f64> {
    let n = u.modes();
    let c: Vec<SparseOperator> = (1..=2 * n).map(|mu| majorana(n, mu)).collect::<Result<_>>()?;
    let rd = r.adjoint();
    let mut worst = 0.0f64;
    for mu in 0..2 * n {
        let lhs = &(r * &c[mu]) * &rd;
        let mut rhs = SparseOperator::zero(r.dim());
        for nu in 0..2 * n {
            rhs = &rhs + &c[nu].scale_real(u.0[(mu, nu)]);
        }
        worst = worst.max(lhs.distance(&rhs)?);
    }
    Ok(worst)
}

/// Largest Frobenius residual of `R a_p^dagger R^dagger - sum_q U_{qp} a_q^dagger`.
pub fn creation_covariance_residual(u: &UnitaryMatrix, r: &SparseOperator) -> Result<f64> {
    let n = u.modes();
    let create: Vec<SparseOperator> = (1..=n).map(|p| ladder(n, p, true)).collect::<Result<_>>()?;
    let rd = r.adjoint();
    let mut worst = 0.0f64;
    for p in 0..n {
        let lhs = &(r * &create[p]) * &rd;
        let mut rhs = SparseOperator::zero(r.dim());
        for q in 0..n {
            rhs = &rhs + &create[q].scale(u.0[(q, p)]);
        }
        worst = worst.max(lhs.distance(&rhs)?);
    }
    Ok(worst)
}

/// `a_{o_1}^dagger ... a_{o_k}^dagger |0>` for increasing occupied modes, which
/// is the computational basis state with amplitude `+1`.
pub fn slater_state(n: usize, occupied: &[usize]) -> Result<StateVector> {
    if n == 0 {
        return domain("mode count must be positive");
    }
    if n > 30 {
        return Err(Error::Resource(format!("{n} modes exceeds the addressable state space")));
    }
    let idx = occupation_index(n, occupied)?;
    StateVector::basis(1 << n, idx)
}

/// Draws a Gaussian group element and compiles it, resampling on the rare
/// branch-cut refusal.
pub fn sample_gaussian_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(OrthogonalMatrix, SparseOperator)> {
    loop {
        let u = sample_orthogonal(n, rng)?;
        match compile_gaussian(&u) {
            Ok(r) => return Ok((u, r)),
            Err(Error::BranchCut(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Number-preserving counterpart of [`sample_gaussian_unitary`].
pub fn sample_pp_gaussian_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(UnitaryMatrix, SparseOperator)> {
    loop {
        let u = sample_unitary(n, rng)?;
        match compile_pp_gaussian(&u) {
            Ok(r) => return Ok((u, r)),
            Err(Error::BranchCut(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}
