use thiserror::Error;

use crate::attack_graph::GraphError;
use crate::loss_models::LineError;
use crate::pricing::{CalibrationError, PricingError};
use crate::scenario_io::ScenarioError;
use crate::stats::StatsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error for engine entry points that cross module boundaries.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Line(#[from] LineError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate result: {0}")]
    Degenerate(String),
}
