use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("config error at key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("reference velocity u0 must be nonzero")]
    ZeroReferenceVelocity,

    #[error("density {density:e} is not positive; velocity moment undefined")]
    NonPositiveDensity { density: f64 },

    #[error("vacuum breakdown: n = {value:e} at node {node}")]
    VacuumBreakdown { node: usize, value: f64 },

    #[error("non-finite value in field `{field}` at node {node}")]
    NonFinite { field: &'static str, node: usize },

    #[error("Poisson solvability violated: mean density {mean:e} differs from background {n0:e}")]
    PoissonSolvability { mean: f64, n0: f64 },

    #[error("time step {dt:e} violates the stability limit; use dt <= {suggested:e}")]
    Cfl { dt: f64, suggested: f64 },

    #[error("wave steepening: relative cell-to-cell jump {jump:.3e} exceeds {threshold:.3e} at t = {time:e}")]
    Steepening { jump: f64, threshold: f64, time: f64 },

    #[error("sonic singularity at xi = {xi:e}: {detail}")]
    SonicSingularity { xi: f64, detail: String },

    #[error("integrator step size underflow at xi = {xi:e}")]
    StepUnderflow { xi: f64 },

    #[error("no oscillation detected in probe signal")]
    NoOscillation,

    #[error("no stability change inside bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("wavefunction grid too narrow: boundary amplitude ratio {ratio:e} exceeds {limit:e}")]
    GridTooNarrow { ratio: f64, limit: f64 },

    #[error("wavefunction not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("velocity aliasing: packet support {support:e} exceeds resolvable velocity {resolvable:e}")]
    Aliasing { support: f64, resolvable: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics (singularities, CFL, blow-up) as
    /// opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveDensity { .. }
                | Error::VacuumBreakdown { .. }
                | Error::NonFinite { .. }
                | Error::PoissonSolvability { .. }
                | Error::Cfl { .. }
                | Error::Steepening { .. }
                | Error::SonicSingularity { .. }
                | Error::StepUnderflow { .. }
                | Error::NoOscillation
                | Error::NoSignChange { .. }
                | Error::GridTooNarrow { .. }
                | Error::NotNormalized { .. }
                | Error::Aliasing { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
