//! Frenkel excitons of a finite molecular film in a single-mode microcavity,
//! modelled as q-deformed bosons with `q = 1 - 2/N`.
//!
//! The crate builds the fixed-excitation blocks of the coupled
//! photon/exciton system, solves them by first-order perturbation theory
//! around the `su(2)`-rotated resonant solution (with dense diagonalization
//! as a reference), and evaluates the filtered emission spectrum.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

// `!(x > 0)` is the NaN-rejecting form of the parameter guards
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod linalg;
pub mod models;
pub mod perturbation;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, Result};
pub use fock::{
    angular_momentum, exciton_commutator_function, ladder_lowering, ladder_raising,
    linearized_commutator, make_block, q_commutator_residual, qdeformed_lowering,
    qdeformed_raising, rotation_y, AngularMomentum, DeformationContext, ExactExcitonRealization,
    FockBlock, Mode,
};
pub use models::{
    block_hamiltonian, bogoliubov_modes, dicke_block, h0_block, hprime_block, hprime_block_with,
    HPrimeForm, ModelKind, ModelParams,
};
pub use perturbation::{
    closed_form_energy, evolution_decomposition, exact_block_spectrum, first_order_energies,
    first_order_states, hprime_rotated, hprime_table_discrepancy, zeroth_spectrum, EigenSystem,
    Method, Propagator, StateLabel,
};
pub use scalar::Real;
pub use spectrum::{
    default_grid, find_peaks, integrated_intensity, physical_spectrum, stationary_spectrum,
    time_domain_spectrum, transition_amplitudes, Grid, InitialState, Peak, PeakThresholds,
    SpectralLine, SpectrumResult,
};

pub use fock::OperatorMap;

pub type Complex64 = num_complex::Complex<f64>;

pub type Operator = OperatorMap<f64>;
pub type Params = ModelParams<f64>;
pub type Deformation = DeformationContext<f64>;
pub type Eigen = EigenSystem<f64>;
pub type Line = SpectralLine<f64>;
pub type Spectrum = SpectrumResult<f64>;
pub type FreqGrid = Grid<f64>;
pub type State = InitialState<f64>;

pub type Operator32 = OperatorMap<f32>;
pub type Params32 = ModelParams<f32>;
pub type Eigen32 = EigenSystem<f32>;
pub type Spectrum32 = SpectrumResult<f32>;
