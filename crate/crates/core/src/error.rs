use thiserror::Error;

/// Everything that can go wrong while computing entropies, spectra or fits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("integrand denominator vanishes at phi = {phi} (lag {lag})")]
    NumericalSingularity { lag: i64, phi: f64 },

    #[error("quadrature for lag {lag} did not reach tolerance {requested:e} within {evaluations} evaluations (estimate {achieved:e})")]
    ToleranceNotMet {
        lag: i64,
        requested: f64,
        achieved: f64,
        evaluations: usize,
    },

    #[error("correlation matrix invalid: mode occupation {value} outside [0, 1]")]
    InvalidCorrelationMatrix { value: f64 },

    #[error("eigensolver failure: {0}")]
    EigenSolver(String),

    #[error("Lanczos did not converge in sector M = {sector} after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        sector: i32,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate ground state: sectors {sectors:?} share energy {energy} within {tolerance:e}; select a sector explicitly")]
    DegenerateGroundState {
        energy: f64,
        sectors: Vec<i32>,
        tolerance: f64,
    },

    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),

    #[error("spectrum is a top-k prefix; {0} needs the complete spectrum")]
    IncompleteSpectrum(&'static str),

    #[error("full enumeration of 2^{l} eigenvalues exceeds the cap 2^{cap}; use the top-k spectrum instead")]
    EnumerationCap { l: usize, cap: usize },

    #[error("effective rank is uncertain: smallest retained probability {smallest:e} is not below epsilon {epsilon:e}")]
    UncertainRank { smallest: f64, epsilon: f64 },

    #[error("fit needs at least {needed} points in window [{lmin}, {lmax}], found {found}")]
    TooFewPoints {
        needed: usize,
        found: usize,
        lmin: usize,
        lmax: usize,
    },

    #[error("vanishing entropy increment at L = {l} in the reference profile")]
    VanishingIncrement { l: usize },

    #[error("entropy diverges: {0}")]
    Divergent(String),
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Dimension(_) => "dimension",
            Error::NumericalSingularity { .. } => "numerical_singularity",
            Error::ToleranceNotMet { .. } => "tolerance_not_met",
            Error::InvalidCorrelationMatrix { .. } => "invalid_correlation_matrix",
            Error::EigenSolver(_) => "eigen_solver",
            Error::NotConverged { .. } => "not_converged",
            Error::DegenerateGroundState { .. } => "degenerate_ground_state",
            Error::InvalidDensityMatrix(_) => "invalid_density_matrix",
            Error::IncompleteSpectrum(_) => "incomplete_spectrum",
            Error::EnumerationCap { .. } => "enumeration_cap",
            Error::UncertainRank { .. } => "uncertain_rank",
            Error::TooFewPoints { .. } => "too_few_points",
            Error::VanishingIncrement { .. } => "vanishing_increment",
            Error::Divergent(_) => "divergent",
        }
    }

    /// True for failures of the numerics (tolerance, convergence, degeneracy,
    /// singular inputs) as opposed to bad arguments.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Dimension(_)
                | Error::IncompleteSpectrum(_)
                | Error::EnumerationCap { .. }
                | Error::TooFewPoints { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
