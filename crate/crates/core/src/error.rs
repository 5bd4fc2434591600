use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tanh envelope evaluated at negative time t = {t}")]
    NegativeTime { t: f64 },

    #[error("center-to-center distance must be positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("capacitance must be positive, got {0}")]
    NonPositiveCapacitance(f64),

    #[error("amplitude state is not normalized (|a_L|^2 + |a_R|^2 = {norm})")]
    NotNormalized { norm: f64 },

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("metric window [{start}, {end}] holds fewer than two samples")]
    EmptyWindow { start: f64, end: f64 },

    #[error("unknown sweep axis parameter `{0}`")]
    UnknownAxisParameter(String),

    #[error("trajectory has no samples")]
    EmptyTrajectory,

    #[error("polarization {p} is inside the indeterminate band |P| <= {threshold}")]
    IndeterminatePolarization { p: f64, threshold: f64 },

    #[error("netlist contains a cycle through node `{0}`")]
    CycleDetected(String),

    #[error("input node `{0}` has no assigned value")]
    UnassignedInput(String),

    #[error("netlist line {line}: {msg}")]
    NetlistSyntax { line: usize, msg: String },

    #[error("netlist: {0}")]
    InvalidNetlist(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
