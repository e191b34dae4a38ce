//! Hamiltonians on a fixed-excitation block.
//!
//! Energies are in meV with ħ = 1. The zero-excitation block sits at energy
//! zero in every model.

use crate::error::{Error, Result};
use crate::fock::{
    j_plus, ladder_lowering, ladder_raising, DeformationContext, FockBlock, Mode, OperatorMap,
};
use crate::linalg::CMatrix;
use crate::scalar::{cre, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T: Real> {
    /// Cavity and molecular transition energy Ω (resonant).
    pub omega: T,
    /// Collective coupling `g = κ √N`.
    pub coupling_g: T,
    pub n_molecules: u64,
    /// Spectrometer half-bandwidth γ.
    pub gamma: T,
    /// Per-molecule coupling κ, when the caller supplied it.
    pub kappa: Option<T>,
}

impl<T: Real> ModelParams<T> {
    pub fn new(omega: T, coupling_g: T, n_molecules: u64, gamma: T) -> Result<Self> {
        let p = Self {
            omega,
            coupling_g,
            n_molecules,
            gamma,
            kappa: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the per-molecule coupling, with `g = κ √N`.
    pub fn from_kappa(omega: T, kappa: T, n_molecules: u64, gamma: T) -> Result<Self> {
        let g = kappa * T::from_u64(n_molecules).unwrap().sqrt();
        let p = Self {
            omega,
            coupling_g: g,
            n_molecules,
            gamma,
            kappa: Some(kappa),
        };
        p.validate()?;
        Ok(p)
    }

    /// Ω = 1562 meV, g = 20 meV, N = 100, γ = 0.1 meV.
    pub fn fig1() -> Self {
        Self::new(T::lit(1562.0), T::lit(20.0), 100, T::lit(0.1)).expect("valid preset")
    }

    /// As [`ModelParams::fig1`] with N = 10000.
    pub fn fig2() -> Self {
        Self {
            n_molecules: 10_000,
            ..Self::fig1()
        }
    }

    pub fn with_n_molecules(self, n_molecules: u64) -> Result<Self> {
        let p = Self {
            n_molecules,
            kappa: None,
            ..self
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.omega > T::zero()) || !self.omega.is_finite() {
            return bad("omega", format!("must be > 0, got {}", self.omega));
        }
        if !(self.coupling_g >= T::zero()) || !self.coupling_g.is_finite() {
            return bad(
                "coupling_g",
                format!("must be >= 0, got {}", self.coupling_g),
            );
        }
        if !(self.gamma > T::zero()) || !self.gamma.is_finite() {
            return bad("gamma", format!("must be > 0, got {}", self.gamma));
        }
        if self.n_molecules < 3 {
            return bad(
                "n_molecules",
                format!("N must be >= 3, got {}", self.n_molecules),
            );
        }
        if let Some(kappa) = self.kappa {
            let g = kappa * T::from_u64(self.n_molecules).unwrap().sqrt();
            if (g - self.coupling_g).abs() > T::lit(1e-12) * self.coupling_g.abs() {
                return bad(
                    "kappa",
                    format!(
                        "kappa * sqrt(N) = {g} disagrees with g = {}",
                        self.coupling_g
                    ),
                );
            }
        }
        Ok(())
    }

    pub fn kappa(&self) -> T {
        self.kappa
            .unwrap_or_else(|| self.coupling_g / T::from_u64(self.n_molecules).unwrap().sqrt())
    }

    pub fn deformation(&self) -> Result<DeformationContext<T>> {
        DeformationContext::new(self.n_molecules)
    }

    fn inv_two_n(&self) -> T {
        T::one() / (T::lit(2.0) * T::from_u64(self.n_molecules).unwrap())
    }
}

/// Which Hamiltonian to put on a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// `H0 + H'` with first-order q-deformed excitons.
    Effective,
    /// Collective-spin model with exact spin ladder factors.
    Dicke,
}

/// Collective two-level (Dicke) Hamiltonian on an excitation block.
///
/// State `k` has `n = excitation - k` photons and `n_e = k` excited
/// molecules, i.e. `S_z = n_e - N/2`.
pub fn dicke_block<T: Real>(params: &ModelParams<T>, excitation: usize) -> Result<OperatorMap<T>> {
    params.validate()?;
    if excitation as u64 > params.n_molecules {
        return Err(Error::ExceedsSpinCapacity {
            excitation,
            n_molecules: params.n_molecules,
        });
    }
    let block = FockBlock::new(excitation);
    let n = T::from_u64(params.n_molecules).unwrap();
    let kappa = params.kappa();
    let dim = block.dimension();
    let mut h = CMatrix::zeros(dim, dim);
    let diag = params.omega * T::from_count(excitation);
    for k in 0..dim {
        h[(k, k)] = cre(diag);
    }
    // state k = (n_ph, n_e) couples to k + 1 = (n_ph - 1, n_e + 1)
    for k in 0..excitation {
        let photons = T::from_count(excitation - k);
        let ne = T::from_count(k + 1);
        let c = kappa * photons.sqrt() * ((n - ne + T::one()) * ne).sqrt();
        h[(k, k + 1)] = cre(c);
        h[(k + 1, k)] = cre(c);
    }
    OperatorMap::new(block, block, h)?.into_hermitian()
}

/// `H0 = Ω(a†a + b†b) + g(a†b + b†a)`.
pub fn h0_block<T: Real>(params: &ModelParams<T>, excitation: usize) -> Result<OperatorMap<T>> {
    let block = FockBlock::new(excitation);
    let jp = j_plus::<T>(block);
    let hop = jp.add(&jp.adjoint())?.scale(params.coupling_g);
    let diag = OperatorMap::identity(block).scale(params.omega * T::from_count(excitation));
    diag.add(&hop)?.into_hermitian()
}

/// Form of the first-order correction `H'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HPrimeForm {
    /// `(1/2N)(2Ω b†b†bb + g b†b†ab + g a†b†bb)`, Hermitian.
    Symmetric,
    /// Same, but without `g` on the `a†b†bb` term. Not Hermitian; kept as a
    /// negative control for the Hermiticity checks.
    UncoupledLastTerm,
}

/// `H' = (1/2N)(2Ω b†b†bb + g b†b†ab + g a†b†bb)`.
pub fn hprime_block<T: Real>(params: &ModelParams<T>, excitation: usize) -> Result<OperatorMap<T>> {
    hprime_block_with(params, excitation, HPrimeForm::Symmetric)?.into_hermitian()
}

pub fn hprime_block_with<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
    form: HPrimeForm,
) -> Result<OperatorMap<T>> {
    let block = FockBlock::new(excitation);
    if excitation < 2 {
        return Ok(OperatorMap::zeros(block, block));
    }
    let mid = FockBlock::new(excitation - 1);
    let low = FockBlock::new(excitation - 2);

    let b_top = ladder_lowering::<T>(block, Mode::Exciton)?;
    let b_mid = ladder_lowering::<T>(mid, Mode::Exciton)?;
    let a_mid = ladder_lowering::<T>(mid, Mode::Photon)?;
    let bd_low = ladder_raising::<T>(low, Mode::Exciton);
    let bd_mid = ladder_raising::<T>(mid, Mode::Exciton);
    let ad_mid = ladder_raising::<T>(mid, Mode::Photon);

    let bb = b_mid.compose(&b_top)?;
    let bdbd = bd_mid.compose(&bd_low)?;
    let pair = bdbd.compose(&bb)?;
    let bdbd_a_b = bdbd.compose(&a_mid.compose(&b_top)?)?;
    let ad_bd_bb = ad_mid.compose(&bd_low.compose(&bb)?)?;

    let g = params.coupling_g;
    let last = match form {
        HPrimeForm::Symmetric => ad_bd_bb.scale(g),
        HPrimeForm::UncoupledLastTerm => ad_bd_bb,
    };
    let sum = pair
        .scale(T::lit(2.0) * params.omega)
        .add(&bdbd_a_b.scale(g))?
        .add(&last)?;
    Ok(sum.scale(params.inv_two_n()))
}

/// `H0 + H'` or the Dicke block, by kind.
pub fn block_hamiltonian<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
    kind: ModelKind,
) -> Result<OperatorMap<T>> {
    match kind {
        ModelKind::Effective => {
            h0_block(params, excitation)?.add(&hprime_block(params, excitation)?)
        }
        ModelKind::Dicke => dicke_block(params, excitation),
    }
}

/// Normal-mode energies `(E+, E-)` of the two coupled oscillators obtained by
/// replacing the ground-state operators with `√N_c`, taking `N_c = N`.
pub fn bogoliubov_modes<T: Real>(params: &ModelParams<T>) -> (T, T) {
    // resonant symmetric coupling: modes (a ± b)/√2 at Ω ± κ√N_c = Ω ± g
    (
        params.omega + params.coupling_g,
        params.omega - params.coupling_g,
    )
}
