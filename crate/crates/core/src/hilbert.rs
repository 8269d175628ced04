//! Truncated composite Hilbert space, operators and generators.
//!
//! Basis states are `|s> (x) |n1> (x) |n2>` with the emitter slowest and
//! mode `a2` fastest:
//!
//! ```text
//! index = s * (n1c+1)(n2c+1) + n1 * (n2c+1) + n2,   s = 0 (g), 1 (e)
//! ```
//!
//! Density matrices are vectorized by stacking columns, which is also the
//! native storage order of [`CMatrix`]. Under that convention
//! `vec(A X B) = (B^T (x) A) vec(X)`, so the Lindblad generator reads
//!
//! ```text
//! L = I (x) K + conj(K) (x) I + sum_c conj(c) (x) c,   K = -i H - 1/2 sum_c c^dag c
//! ```
//!
//! where each collapse operator `c` already carries the square root of its
//! rate.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DVector;

use crate::{CMatrix, Error, ProbeDrive, Result, SystemParams, C64};

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// A composite basis state `|s, n1, n2>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ket {
    pub excited: bool,
    pub n1: usize,
    pub n2: usize,
}

impl Ket {
    pub const fn new(excited: bool, n1: usize, n2: usize) -> Self {
        Self { excited, n1, n2 }
    }

    pub fn excitations(&self) -> usize {
        self.excited as usize + self.n1 + self.n2
    }

    /// Flat index in a space with the given cutoffs, if the ket fits.
    pub fn index(&self, n1_cutoff: usize, n2_cutoff: usize) -> Option<usize> {
        if self.n1 > n1_cutoff || self.n2 > n2_cutoff {
            return None;
        }
        let block = (n1_cutoff + 1) * (n2_cutoff + 1);
        Some(self.excited as usize * block + self.n1 * (n2_cutoff + 1) + self.n2)
    }

    pub fn from_index(index: usize, n1_cutoff: usize, n2_cutoff: usize) -> Self {
        let block = (n1_cutoff + 1) * (n2_cutoff + 1);
        let rem = index % block;
        Self {
            excited: index / block == 1,
            n1: rem / (n2_cutoff + 1),
            n2: rem % (n2_cutoff + 1),
        }
    }

    /// All kets with exactly `n` excitations, ordered emitter-excited first,
    /// then by decreasing `n1`: `|e,n-1,0>, |e,n-2,1>, ..., |g,n,0>, ..., |g,0,n>`.
    pub fn with_excitations(n: usize) -> Vec<Ket> {
        let mut kets = Vec::new();
        if n >= 1 {
            for n1 in (0..n).rev() {
                kets.push(Ket::new(true, n1, n - 1 - n1));
            }
        }
        for n1 in (0..=n).rev() {
            kets.push(Ket::new(false, n1, n - n1));
        }
        kets
    }

    /// All kets with at most `max` excitations, grouped by excitation number.
    pub fn up_to_excitations(max: usize) -> Vec<Ket> {
        (0..=max).flat_map(Ket::with_excitations).collect()
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.excited { 'e' } else { 'g' };
        write!(f, "|{s},{},{}>", self.n1, self.n2)
    }
}

/// Dense operator on a (possibly truncated) Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator(CMatrix);

impl Operator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidParameter(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self(matrix))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn kron(&self, other: &Operator) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(&self.0 * real(factor))
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^dag|` elementwise.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Restriction `P A P^T` onto the listed basis indices.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let n = indices.len();
        Self(CMatrix::from_fn(n, n, |r, c| self.0[(indices[r], indices[c])]))
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

pub(crate) fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Linear map on column-stacked density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    matrix: CMatrix,
    hilbert_dim: usize,
}

impl Superoperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n2 = matrix.nrows();
        let n = (n2 as f64).sqrt().round() as usize;
        if !matrix.is_square() || n * n != n2 {
            return Err(Error::InvalidParameter(format!(
                "superoperator must be d^2 x d^2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, hilbert_dim: n })
    }

    /// Dimension `d` of the underlying Hilbert space; the matrix is `d^2 x d^2`.
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `devec(L vec(rho))`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        devectorize(&(&self.matrix * vectorize(rho)), self.hilbert_dim)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        crate::linalg::norm1(&self.matrix)
    }
}

/// Column-stacking vectorization.
pub fn vectorize(rho: &CMatrix) -> DVector<C64> {
    DVector::from_column_slice(rho.as_slice())
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &DVector<C64>, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Single-mode annihilation operator on Fock states `0..=cutoff`.
pub fn fock_annihilation(cutoff: usize) -> Result<Operator> {
    if cutoff == 0 {
        return Err(Error::InvalidParameter(
            "Fock cutoff must be >= 1 to represent any dynamics".into(),
        ));
    }
    let mut a = CMatrix::zeros(cutoff + 1, cutoff + 1);
    for n in 1..=cutoff {
        a[(n - 1, n)] = real((n as f64).sqrt());
    }
    Ok(Operator(a))
}

/// The elementary operators embedded in the composite space.
#[derive(Clone, Debug)]
pub struct CompositeOperators {
    pub a1: Operator,
    pub a2: Operator,
    pub sigma_minus: Operator,
    pub sigma_z: Operator,
}

impl CompositeOperators {
    pub fn dim(&self) -> usize {
        self.a1.dim()
    }

    pub fn sigma_plus(&self) -> Operator {
        self.sigma_minus.adjoint()
    }

    pub fn n1(&self) -> Operator {
        &self.a1.adjoint() * &self.a1
    }

    pub fn n2(&self) -> Operator {
        &self.a2.adjoint() * &self.a2
    }

    /// Excited-state projector `sigma_+ sigma_-`.
    pub fn excited(&self) -> Operator {
        &self.sigma_plus() * &self.sigma_minus
    }

    /// Total excitation number `a1^dag a1 + a2^dag a2 + sigma_+ sigma_-`.
    pub fn total_excitations(&self) -> Operator {
        &(&self.n1() + &self.n2()) + &self.excited()
    }
}

pub fn composite_operators(p: &SystemParams) -> Result<CompositeOperators> {
    p.validate()?;
    let a1 = fock_annihilation(p.n1_cutoff)?;
    let a2 = fock_annihilation(p.n2_cutoff)?;
    let id_s = Operator::identity(2);
    let id1 = Operator::identity(p.n1_cutoff + 1);
    let id2 = Operator::identity(p.n2_cutoff + 1);

    // |g> = index 0, |e> = index 1
    let mut sm = CMatrix::zeros(2, 2);
    sm[(0, 1)] = ONE;
    let sm = Operator(sm);
    let sz = Operator(CMatrix::from_diagonal(&DVector::from_vec(vec![-ONE, ONE])));

    Ok(CompositeOperators {
        a1: id_s.kron(&a1).kron(&id2),
        a2: id_s.kron(&id1).kron(&a2),
        sigma_minus: sm.kron(&id1).kron(&id2),
        sigma_z: sz.kron(&id1).kron(&id2),
    })
}

/// System Hamiltonian, optionally in the frame of a probe on `a2`.
///
/// With the probe off this is
/// `D1 a1^dag a1 + D2 a2^dag a2 + g (a1^dag s- + a1 s+) + J (a1^dag a2 + a2^dag a1)`.
/// With a probe at detuning `De` every level shifts by `-De` per excitation
/// and `eps (a2 + a2^dag)` is added.
pub fn build_hamiltonian(p: &SystemParams, drive: &ProbeDrive) -> Result<Operator> {
    let ops = composite_operators(p)?;
    Ok(hamiltonian_from(p, drive, &ops))
}

fn hamiltonian_from(p: &SystemParams, drive: &ProbeDrive, ops: &CompositeOperators) -> Operator {
    let de = drive.detuning_e;
    let a1d = ops.a1.adjoint();
    let a2d = ops.a2.adjoint();
    let sp = ops.sigma_plus();

    let mut h = ops.n1().scale(p.delta1 - de).into_matrix();
    h += ops.n2().scale(p.delta2 - de).into_matrix();
    if de != 0.0 {
        h -= ops.excited().scale(de).into_matrix();
    }
    h += (&(&a1d * &ops.sigma_minus) + &(&ops.a1 * &sp)).scale(p.g).into_matrix();
    h += (&(&a1d * &ops.a2) + &(&a2d * &ops.a1)).scale(p.j).into_matrix();
    if drive.amplitude != 0.0 {
        h += (&ops.a2 + &a2d).scale(drive.amplitude).into_matrix();
    }
    Operator(h)
}

/// `H - (i/2)(kappa1 a1^dag a1 + kappa2 a2^dag a2 + gamma s+ s-)`.
pub fn build_nonhermitian_hamiltonian(p: &SystemParams) -> Result<Operator> {
    let ops = composite_operators(p)?;
    let h = hamiltonian_from(p, &ProbeDrive::OFF, &ops);
    let loss = &(&ops.n1().scale(p.kappa1) + &ops.n2().scale(p.kappa2)) + &ops.excited().scale(p.gamma);
    Ok(Operator(h.into_matrix() - loss.into_matrix() * (I * 0.5)))
}

/// Collapse operators `sqrt(rate) * o` for the nonzero decay channels.
fn collapse_from(p: &SystemParams, ops: &CompositeOperators) -> Vec<Operator> {
    [(p.kappa1, &ops.a1), (p.kappa2, &ops.a2), (p.gamma, &ops.sigma_minus)]
        .into_iter()
        .filter(|(rate, _)| *rate > 0.0)
        .map(|(rate, op)| op.scale(rate.sqrt()))
        .collect()
}

pub fn build_liouvillian(p: &SystemParams, drive: &ProbeDrive) -> Result<Superoperator> {
    Ok(LindbladModel::new(p, drive)?.liouvillian())
}

/// Lindblad generator from a Hamiltonian and rate-weighted collapse operators.
pub fn liouvillian_from(hamiltonian: &Operator, collapse: &[Operator]) -> Superoperator {
    let n = hamiltonian.dim();
    let k = effective_generator(hamiltonian, collapse);
    let id = CMatrix::identity(n, n);
    let mut l = id.kronecker(&k) + k.map(|z| z.conj()).kronecker(&id);
    for c in collapse {
        l += c.matrix().map(|z| z.conj()).kronecker(c.matrix());
    }
    Superoperator { matrix: l, hilbert_dim: n }
}

/// `K = -i H - 1/2 sum c^dag c`, so that `d rho/dt = K rho + rho K^dag + sum c rho c^dag`.
pub(crate) fn effective_generator(hamiltonian: &Operator, collapse: &[Operator]) -> CMatrix {
    let mut k = hamiltonian.matrix() * (-I);
    for c in collapse {
        k -= c.matrix().adjoint() * c.matrix() * real(0.5);
    }
    k
}

/// Master-equation right-hand side evaluated directly with matrix products,
/// `-i[H, rho] + sum_c (c rho c^dag - {c^dag c, rho}/2)`.
pub fn lindblad_rhs(hamiltonian: &Operator, collapse: &[Operator], rho: &CMatrix) -> CMatrix {
    let h = hamiltonian.matrix();
    let mut out = (h * rho - rho * h) * (-I);
    for c in collapse {
        let c = c.matrix();
        let cd = c.adjoint();
        let cdc = &cd * c;
        out += c * rho * &cd - (&cdc * rho + rho * &cdc) * real(0.5);
    }
    out
}

/// Hamiltonian, collapse channels and the observables needed for dynamics,
/// on either the full truncated space or a subspace of it.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub basis: Vec<Ket>,
    pub hamiltonian: Operator,
    /// Rate-weighted collapse operators for the nonzero decay channels.
    pub collapse: Vec<Operator>,
    pub n1: Operator,
    pub n2: Operator,
    /// `sigma_+ sigma_-`.
    pub excited: Operator,
    pub a2: Operator,
}

impl LindbladModel {
    pub fn new(p: &SystemParams, drive: &ProbeDrive) -> Result<Self> {
        let ops = composite_operators(p)?;
        let basis = (0..p.dim()).map(|i| Ket::from_index(i, p.n1_cutoff, p.n2_cutoff)).collect();
        Ok(Self {
            basis,
            hamiltonian: hamiltonian_from(p, drive, &ops),
            collapse: collapse_from(p, &ops),
            n1: ops.n1(),
            n2: ops.n2(),
            excited: ops.excited(),
            a2: ops.a2.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, ket: &Ket) -> Option<usize> {
        self.basis.iter().position(|k| k == ket)
    }

    pub fn liouvillian(&self) -> Superoperator {
        liouvillian_from(&self.hamiltonian, &self.collapse)
    }

    pub fn rhs(&self, rho: &CMatrix) -> CMatrix {
        lindblad_rhs(&self.hamiltonian, &self.collapse, rho)
    }

    /// Restrict every operator to the given kets, in the given order.
    pub fn restrict(&self, kets: &[Ket]) -> Result<Self> {
        let indices = kets
            .iter()
            .map(|k| {
                self.index_of(k)
                    .ok_or_else(|| Error::InvalidParameter(format!("{k} is outside the truncated space")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            basis: kets.to_vec(),
            hamiltonian: self.hamiltonian.restrict(&indices),
            collapse: self.collapse.iter().map(|c| c.restrict(&indices)).collect(),
            n1: self.n1.restrict(&indices),
            n2: self.n2.restrict(&indices),
            excited: self.excited.restrict(&indices),
            a2: self.a2.restrict(&indices),
        })
    }
}
