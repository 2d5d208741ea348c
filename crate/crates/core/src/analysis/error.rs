use alloc::string::String;
use core::fmt;

use crate::models::ModelError;
use crate::ode::OdeError;

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    Model(ModelError),
    Ode(OdeError),
    /// Steady state not reached at one sweep value.
    NoConvergence { parameter: String, value: f64, source: OdeError },
    /// The equilibrium search came back empty at one sweep value.
    NoEquilibria { value: f64 },
    /// Samples too far apart for finite differences.
    GridTooCoarse { index: usize, coordinate: usize },
    InvalidGrid(&'static str),
    InvalidArgument(&'static str),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Model(e) => write!(f, "{e}"),
            Self::Ode(e) => write!(f, "{e}"),
            Self::NoConvergence {
                parameter,
                value,
                source,
            } => write!(f, "no steady state at {parameter} = {value}: {source}"),
            Self::NoEquilibria { value } => write!(f, "no equilibrium found at parameter value {value}"),
            Self::GridTooCoarse { index, coordinate } => write!(
                f,
                "sampling grid too coarse between samples {index} and {} (coordinate {coordinate})",
                index + 1
            ),
            Self::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Self::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl From<ModelError> for AnalysisError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Ode(o) => Self::Ode(o),
            other => Self::Model(other),
        }
    }
}

impl From<OdeError> for AnalysisError {
    fn from(e: OdeError) -> Self {
        Self::Ode(e)
    }
}
