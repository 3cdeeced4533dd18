use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("probability overflow: `{name}` = {value} is outside [0, 1]")]
    ProbabilityOverflow { name: &'static str, value: f64 },

    #[error("invalid lattice dimension: {0}")]
    InvalidDimension(String),

    #[error("degenerate sample: per-cell capacity {0} is below 2")]
    DegenerateSample(u32),

    #[error("infeasible event (row {row}): a count would become negative")]
    InfeasibleEvent { row: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("carrying-capacity factor is undefined for the given rates")]
    CarryingCapacityUndefined,

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("leap selection failed at t = {t}: tau = {tau:e} is below the minimum")]
    LeapFailure { t: f64, tau: f64 },

    #[error("solver instability: {0}")]
    SolverInstability(String),

    #[error("infeasible equilibrium: {0}")]
    InfeasibleEquilibrium(String),

    #[error("stability error: {0}")]
    Unstable(String),

    #[error("time grids do not match, resampling required: {0}")]
    GridMismatch(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: usize, cap: usize },

    #[error("measurement error: {0}")]
    Measurement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
