use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no lower block: cannot lower from the vacuum block")]
    NoLowerBlock,

    #[error("deformation context invalid: N = {0}, need N >= 3")]
    InvalidDeformation(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("block mismatch: {0}")]
    BlockMismatch(String),

    #[error("operator is not hermitian: max |M - M^dagger| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("operator is not unitary: max |M^dagger M - I| = {0:e}")]
    NotUnitary(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("block exceeds spin capacity: excitation {excitation} > N = {n_molecules}")]
    ExceedsSpinCapacity { excitation: usize, n_molecules: u64 },

    #[error("degenerate zeroth-order spectrum; first-order theory invalid (g = 0)")]
    DegenerateSpectrum,

    #[error("eigenvectors are not orthonormal: max |S - I| = {0:e}")]
    NotOrthonormal(f64),

    #[error("initial state not normalized: norm = {0}")]
    UnnormalizedState(f64),

    #[error("initial state has {got} amplitudes, block has dimension {expected}")]
    StateDimension { expected: usize, got: usize },

    #[error("no emission from vacuum")]
    NoEmissionFromVacuum,

    #[error("grid does not cover lines with the required margin: {0}")]
    GridCoverage(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("closed-form first-order energy disagrees with the rotated correction by {0:e}")]
    ClosedFormMismatch(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
