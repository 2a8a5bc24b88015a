use thiserror::Error;

use crate::model::ValidationErrors;

/// Errors raised by the analytic, exact and master-equation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("splitting between levels {lower} and {} is {splitting} GHz, must be positive", .lower + 1)]
    NonPositiveSplitting { lower: usize, splitting: f64 },

    #[error(transparent)]
    Invalid(#[from] ValidationErrors),

    #[error("resonant denominator at level {level}: |{denominator:e}| GHz is below the resonance tolerance")]
    ResonantDivergence { level: usize, denominator: f64 },

    #[error("spectral density requested at negative frequency {0} GHz")]
    NegativeFrequency(f64),

    #[error("photon number must be non-negative, got {0}")]
    NegativePhotonNumber(f64),

    #[error("dissipator rate must be non-negative, got {0} MHz")]
    NegativeRate(f64),

    #[error("{0}")]
    InvalidDissipator(String),

    #[error("product space dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge")]
    ConvergenceFailure,

    #[error("dressed state |{level},{photons}> is ambiguous (best overlap {overlap:.4})")]
    AmbiguousLabeling { level: usize, photons: usize, overlap: f64 },

    #[error("fit needs at least 3 data points, got {0}")]
    TooFewPoints(usize),

    #[error("could not bracket a minimum of the residual sum")]
    NoBracket,

    #[error("residual curvature at the minimum is not positive ({0:e})")]
    DegenerateCurvature(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("integrator step underflow at t = {t} ns (step {step:e} ns)")]
    StepUnderflow { t: f64, step: f64 },

    #[error("generator has a degenerate null space")]
    DegenerateNullSpace,

    #[error("Fock truncation {fock_dim} too small for |alpha|^2 = {alpha_sq}")]
    TruncationTooSmall { fock_dim: usize, alpha_sq: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
