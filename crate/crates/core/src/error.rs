use thiserror::Error;

/// Errors produced by the simulator core.
#[derive(Debug, Error)]
pub enum Error {
    /// A mobile could not be drawn outside all exclusion zones within the
    /// retry budget; the (count, r_ex, r_net) combination is too dense.
    #[error("mobile {index} could not be placed after {retries} redraws; exclusion zones too dense for the network radius")]
    PlacementInfeasible { index: usize, retries: u32 },

    #[error("distance must be positive")]
    NonpositiveDistance,

    #[error("chip timing offset {tau} outside [0, {tc})")]
    ChipOffsetOutOfRange { tau: f64, tc: f64 },

    #[error("series degree {degree} out of range (maximum {max})")]
    DegreeOutOfRange { degree: usize, max: usize },

    /// The closed form produced a value outside [0, 1] beyond rounding
    /// slack. This signals an implementation bug, never bad user input.
    #[error("computed outage probability {value} lies outside [0, 1]")]
    NumericalConsistency { value: f64 },

    #[error("latency diverges as the average outage probability reaches 1")]
    DivergentLatency,

    #[error("target {target} is unachievable over the search grid (best attained: {best})")]
    TargetUnachievable { target: f64, best: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
