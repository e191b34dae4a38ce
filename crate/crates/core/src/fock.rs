//! Two-mode Fock blocks and the operators that act on them.
//!
//! A block holds every state with `n_photon + n_exciton = excitation`. Basis
//! states are ordered by descending photon number, so index `k` is the state
//! `(excitation - k, k)` with angular-momentum label `m = j - k`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{unitary_exp, CMatrix};
use crate::scalar::{cim, cre, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockBlock {
    excitation: usize,
}

impl FockBlock {
    pub fn new(excitation: usize) -> Self {
        Self { excitation }
    }

    pub fn excitation(&self) -> usize {
        self.excitation
    }

    pub fn dimension(&self) -> usize {
        self.excitation + 1
    }

    /// Basis pairs `(n_photon, n_exciton)` in storage order.
    pub fn basis(&self) -> Vec<(usize, usize)> {
        (0..=self.excitation)
            .map(|k| (self.excitation - k, k))
            .collect()
    }

    pub fn index_of(&self, n_photon: usize, n_exciton: usize) -> Option<usize> {
        (n_photon + n_exciton == self.excitation).then_some(n_exciton)
    }

    /// `2j`, an integer.
    pub fn two_j(&self) -> i64 {
        self.excitation as i64
    }

    pub fn j<T: Real>(&self) -> T {
        T::from_count(self.excitation) * T::lit(0.5)
    }

    /// `2m` of basis state `k`.
    pub fn two_m(&self, k: usize) -> i64 {
        self.excitation as i64 - 2 * k as i64
    }

    pub fn m_labels<T: Real>(&self) -> Vec<T> {
        (0..self.dimension())
            .map(|k| T::from_i64(self.two_m(k)).unwrap() * T::lit(0.5))
            .collect()
    }

    pub fn lower(&self) -> Option<Self> {
        self.excitation.checked_sub(1).map(Self::new)
    }

    pub fn upper(&self) -> Self {
        Self::new(self.excitation + 1)
    }
}

impl fmt::Display for FockBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block[N={}]", self.excitation)
    }
}

pub fn make_block(excitation: usize) -> FockBlock {
    FockBlock::new(excitation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Photon,
    Exciton,
}

/// A dense operator from one block to another.
///
/// Entries have shape `target.dimension() x source.dimension()`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMap<T: Real> {
    source: FockBlock,
    target: FockBlock,
    entries: CMatrix<T>,
    hermitian: bool,
}

impl<T: Real> OperatorMap<T> {
    pub fn new(source: FockBlock, target: FockBlock, entries: CMatrix<T>) -> Result<Self> {
        if entries.rows() != target.dimension() || entries.cols() != source.dimension() {
            return Err(Error::BlockMismatch(format!(
                "entries are {}x{} but {} -> {} needs {}x{}",
                entries.rows(),
                entries.cols(),
                source,
                target,
                target.dimension(),
                source.dimension()
            )));
        }
        Ok(Self {
            source,
            target,
            entries,
            hermitian: false,
        })
    }

    pub fn zeros(source: FockBlock, target: FockBlock) -> Self {
        Self {
            source,
            target,
            entries: CMatrix::zeros(target.dimension(), source.dimension()),
            hermitian: false,
        }
    }

    pub fn identity(block: FockBlock) -> Self {
        Self {
            source: block,
            target: block,
            entries: CMatrix::identity(block.dimension()),
            hermitian: true,
        }
    }

    pub fn diagonal(block: FockBlock, diag: &[T]) -> Result<Self> {
        let mut op = Self::new(block, block, CMatrix::from_real_diagonal(diag))?;
        op.hermitian = true;
        Ok(op)
    }

    pub fn source(&self) -> FockBlock {
        self.source
    }

    pub fn target(&self) -> FockBlock {
        self.target
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix<T> {
        self.entries
    }

    pub fn is_square(&self) -> bool {
        self.source == self.target
    }

    pub fn is_flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            source: self.target,
            target: self.source,
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.target != self.source {
            return Err(Error::BlockMismatch(format!(
                "cannot compose ({} -> {}) after ({} -> {})",
                self.source, self.target, inner.source, inner.target
            )));
        }
        Ok(Self {
            source: inner.source,
            target: self.target,
            entries: self.entries.matmul(&inner.entries),
            hermitian: false,
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::BlockMismatch(format!(
                "({} -> {}) vs ({} -> {})",
                self.source, self.target, other.source, other.target
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            source: self.source,
            target: self.target,
            entries: &self.entries + &other.entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            source: self.source,
            target: self.target,
            entries: &self.entries - &other.entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            source: self.source,
            target: self.target,
            entries: self.entries.scale_real(s),
            hermitian: self.hermitian,
        }
    }

    pub fn scale_complex(&self, s: C<T>) -> Self {
        Self {
            source: self.source,
            target: self.target,
            entries: self.entries.scale(s),
            hermitian: self.hermitian && s.im == T::zero(),
        }
    }

    /// `self * other - other * self` for square maps on the same block.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        if !self.is_square() {
            return Err(Error::BlockMismatch("commutator needs square maps".into()));
        }
        Self::new(
            self.source,
            self.target,
            self.entries.commutator(&other.entries),
        )
    }

    pub fn max_deviation(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(self.entries.max_deviation(&other.entries))
    }

    pub fn hermitian_deviation(&self) -> T {
        self.entries.hermitian_deviation()
    }

    /// Validates `max|M - M†| ≤ 1e-12 (1 + max|M|)`.
    pub fn check_hermitian(&self) -> Result<()> {
        let tolerance = T::tolerance(1e-12) * (T::one() + self.entries.max_abs());
        self.check_hermitian_within(tolerance)
    }

    pub fn check_hermitian_within(&self, tolerance: T) -> Result<()> {
        let deviation = if self.is_square() {
            self.hermitian_deviation()
        } else {
            T::infinity()
        };
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation: deviation.to_f64_lossy(),
                tolerance: tolerance.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Validates and sets the hermitian flag.
    pub fn into_hermitian(mut self) -> Result<Self> {
        self.check_hermitian()?;
        self.hermitian = true;
        Ok(self)
    }

    pub fn unitary_deviation(&self) -> T {
        let n = self.source.dimension();
        if !self.is_square() {
            return T::infinity();
        }
        self.entries
            .adjoint()
            .matmul(&self.entries)
            .max_deviation(&CMatrix::identity(n))
    }

    /// Validates `|M†M - I| ≤ 1e-10` elementwise.
    pub fn check_unitary(&self) -> Result<()> {
        let dev = self.unitary_deviation();
        if dev > T::tolerance(1e-10) {
            return Err(Error::NotUnitary(dev.to_f64_lossy()));
        }
        Ok(())
    }

    pub fn apply(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        if v.len() != self.source.dimension() {
            return Err(Error::StateDimension {
                expected: self.source.dimension(),
                got: v.len(),
            });
        }
        Ok(self.entries.matvec(v))
    }
}

/// Deformation constants derived from the molecule count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationContext<T: Real> {
    n_molecules: u64,
    eta: T,
    q: T,
}

impl<T: Real> DeformationContext<T> {
    pub fn new(n_molecules: u64) -> Result<Self> {
        if n_molecules < 3 {
            return Err(Error::InvalidDeformation(n_molecules));
        }
        if n_molecules < 50 {
            log::warn!(
                "N = {n_molecules} < 50: the first-order 1/N expansion of the exciton operators is unreliable"
            );
        }
        let eta = T::one() / T::from_u64(n_molecules).unwrap();
        Ok(Self {
            n_molecules,
            eta,
            q: T::one() - T::lit(2.0) * eta,
        })
    }

    pub fn n_molecules(&self) -> u64 {
        self.n_molecules
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn q(&self) -> T {
        self.q
    }

    fn validate(&self) -> Result<()> {
        if self.n_molecules < 3 {
            return Err(Error::InvalidDeformation(self.n_molecules));
        }
        Ok(())
    }
}

/// Bosonic lowering of one mode, from `block` to the block below it.
pub fn ladder_lowering<T: Real>(block: FockBlock, mode: Mode) -> Result<OperatorMap<T>> {
    let target = block.lower().ok_or(Error::NoLowerBlock)?;
    let mut op = OperatorMap::zeros(block, target);
    for (col, (np, ne)) in block.basis().into_iter().enumerate() {
        let (n, row) = match mode {
            Mode::Photon if np > 0 => (np, target.index_of(np - 1, ne)),
            Mode::Exciton if ne > 0 => (ne, target.index_of(np, ne - 1)),
            _ => continue,
        };
        let row = row.expect("lowered state lives in the lower block");
        op.entries[(row, col)] = cre(T::from_count(n).sqrt());
    }
    Ok(op)
}

/// Bosonic raising of one mode, from `block` to the block above it.
pub fn ladder_raising<T: Real>(block: FockBlock, mode: Mode) -> OperatorMap<T> {
    ladder_lowering(block.upper(), mode)
        .expect("upper block is never the vacuum")
        .adjoint()
}

pub fn number_operator<T: Real>(block: FockBlock, mode: Mode) -> OperatorMap<T> {
    let diag: Vec<T> = block
        .basis()
        .into_iter()
        .map(|(np, ne)| T::from_count(if mode == Mode::Photon { np } else { ne }))
        .collect();
    OperatorMap::diagonal(block, &diag).expect("diagonal has block dimension")
}

/// First-order q-deformed exciton lowering `b + b†bb/(2N)`.
pub fn qdeformed_lowering<T: Real>(
    block: FockBlock,
    ctx: &DeformationContext<T>,
) -> Result<OperatorMap<T>> {
    ctx.validate()?;
    let b = ladder_lowering(block, Mode::Exciton)?;
    let below = b.target();
    if below.excitation() == 0 {
        return Ok(b);
    }
    let bb = ladder_lowering(below, Mode::Exciton)?.compose(&b)?;
    let cubic = ladder_raising(bb.target(), Mode::Exciton).compose(&bb)?;
    b.add(&cubic.scale(ctx.eta() * T::lit(0.5)))
}

/// Adjoint of [`qdeformed_lowering`], from `block` to the block above.
pub fn qdeformed_raising<T: Real>(
    block: FockBlock,
    ctx: &DeformationContext<T>,
) -> Result<OperatorMap<T>> {
    Ok(qdeformed_lowering(block.upper(), ctx)?.adjoint())
}

/// `f(x; η) = sqrt(1 + 2(1 - 2x)η + η²) - η`, the exciton commutator as a
/// function of the occupation `x = b_q† b_q`.
pub fn exciton_commutator_function<T: Real>(x: T, eta: T) -> Result<T> {
    let two = T::lit(2.0);
    let radicand = T::one() + two * (T::one() - two * x) * eta + eta * eta;
    if radicand < T::zero() || radicand.is_nan() {
        return Err(Error::Domain(format!(
            "negative radicand {radicand} in f(x = {x}; eta = {eta})"
        )));
    }
    Ok(radicand.sqrt() - eta)
}

/// Lowest-order form `1 - 2ηx`.
pub fn linearized_commutator<T: Real>(x: T, eta: T) -> T {
    T::one() - T::lit(2.0) * eta * x
}

/// Largest residual of `b_q b_q† - q b_q† b_q - 1` over basis states with at
/// most `n_exciton_max` excitons, using the first-order exciton operators.
pub fn q_commutator_residual<T: Real>(
    ctx: &DeformationContext<T>,
    n_exciton_max: usize,
) -> Result<T> {
    let mut worst = T::zero();
    for excitation in 0..=n_exciton_max + 1 {
        let block = FockBlock::new(excitation);
        let up = qdeformed_raising(block, ctx)?;
        let mut q_comm = qdeformed_lowering(up.target(), ctx)?.compose(&up)?;
        if excitation > 0 {
            let down = qdeformed_lowering(block, ctx)?;
            let dd = down.adjoint().compose(&down)?;
            q_comm = q_comm.sub(&dd.scale(ctx.q()))?;
        }
        let residual = q_comm.sub(&OperatorMap::identity(block))?;
        for (col, (_, ne)) in block.basis().into_iter().enumerate() {
            if ne > n_exciton_max {
                continue;
            }
            for row in 0..block.dimension() {
                worst = worst.max(residual.get(row, col).norm());
            }
        }
    }
    Ok(worst)
}

/// Schwinger realization on one block.
#[derive(Debug, Clone)]
pub struct AngularMomentum<T: Real> {
    pub jx: OperatorMap<T>,
    pub jy: OperatorMap<T>,
    pub jz: OperatorMap<T>,
    pub jsq: OperatorMap<T>,
}

/// `J+ = a†b`, mapping a block into itself.
pub fn j_plus<T: Real>(block: FockBlock) -> OperatorMap<T> {
    match ladder_lowering(block, Mode::Exciton) {
        Ok(b) => ladder_raising(b.target(), Mode::Photon)
            .compose(&b)
            .expect("a† acts on the block b lowers into"),
        Err(_) => OperatorMap::zeros(block, block),
    }
}

pub fn angular_momentum<T: Real>(block: FockBlock) -> AngularMomentum<T> {
    let jp = j_plus::<T>(block);
    let jm = jp.adjoint();
    let half = T::lit(0.5);
    let jx = jp.add(&jm).expect("same block").scale(half);
    // (J+ - J-)/(2i) = -i/2 (J+ - J-)
    let jy = jp.sub(&jm).expect("same block").scale_complex(cim(-half));
    let jz = OperatorMap::diagonal(block, &block.m_labels::<T>()).expect("m labels span block");
    let sq = |op: &OperatorMap<T>| op.compose(op).expect("square map");
    let jsq = sq(&jx)
        .add(&sq(&jy))
        .and_then(|s| s.add(&sq(&jz)))
        .expect("same block");
    let mark = |op: OperatorMap<T>| OperatorMap {
        hermitian: true,
        ..op
    };
    AngularMomentum {
        jx: mark(jx),
        jy: mark(jy),
        jz,
        jsq: mark(jsq),
    }
}

/// `exp(-i angle J_y)` on a block, via the eigendecomposition of `J_y`.
pub fn rotation_y<T: Real>(block: FockBlock, angle: T) -> Result<OperatorMap<T>> {
    let jy = angular_momentum::<T>(block).jy;
    let u = unitary_exp(jy.entries(), angle)?;
    let op = OperatorMap::new(block, block, u)?;
    op.check_unitary()?;
    Ok(op)
}

/// Exciton operators built from genuine ground/excited boson modes at fixed
/// total particle number.
///
/// The two-mode space with `N` particles is a [`FockBlock`] of excitation `N`
/// whose first slot counts ground-state molecules and whose second slot
/// counts excited ones. Only meant as a small-`N` reference.
#[derive(Debug, Clone)]
pub struct ExactExcitonRealization<T: Real> {
    n_molecules: u64,
    space: FockBlock,
    b_q: OperatorMap<T>,
    n_excited: OperatorMap<T>,
}

impl<T: Real> ExactExcitonRealization<T> {
    pub const MAX_MOLECULES: u64 = 20;

    pub fn new(n_molecules: u64) -> Result<Self> {
        if n_molecules == 0 || n_molecules > Self::MAX_MOLECULES {
            return Err(Error::InvalidParameter {
                name: "n_molecules",
                reason: format!(
                    "exact realization supports 1..={} molecules, got {n_molecules}",
                    Self::MAX_MOLECULES
                ),
            });
        }
        let space = FockBlock::new(n_molecules as usize);
        let inv_sqrt_n = T::one() / T::from_u64(n_molecules).unwrap().sqrt();
        // b_g† b_e: lower the excited slot, raise the ground slot
        let b_q = j_plus::<T>(space).scale(inv_sqrt_n);
        let n_excited = number_operator(space, Mode::Exciton);
        Ok(Self {
            n_molecules,
            space,
            b_q,
            n_excited,
        })
    }

    pub fn space(&self) -> FockBlock {
        self.space
    }

    pub fn b_q(&self) -> &OperatorMap<T> {
        &self.b_q
    }

    pub fn n_excited(&self) -> &OperatorMap<T> {
        &self.n_excited
    }

    /// `[b_q, b_q†]` evaluated by matrix products.
    pub fn commutator(&self) -> OperatorMap<T> {
        self.b_q
            .commutator(&self.b_q.adjoint())
            .expect("square maps on one space")
    }

    /// `h = 1 - (2/N) n_e`.
    pub fn h(&self) -> OperatorMap<T> {
        let two_over_n = T::lit(2.0) / T::from_u64(self.n_molecules).unwrap();
        OperatorMap::identity(self.space)
            .sub(&self.n_excited.scale(two_over_n))
            .expect("same space")
    }

    /// `x(n_e) = n_e (N - n_e + 1) / N`, the eigenvalue of `b_q† b_q`.
    pub fn occupation(&self, n_excited: u64) -> T {
        let n = T::from_u64(self.n_molecules).unwrap();
        let ne = T::from_u64(n_excited).unwrap();
        ne * (n - ne + T::one()) / n
    }
}
