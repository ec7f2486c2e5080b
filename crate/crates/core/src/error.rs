use thiserror::Error;

/// Errors reported by the analytic engines and the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A cutoff moment sequence is too short for the requested order.
    #[error("moment sequence holds orders 0..={have}, but order {needed} is required")]
    InsufficientMoments { needed: usize, have: usize },

    /// A simulation or comparison configuration is unusable.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Analytic and estimated tables do not share a grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
