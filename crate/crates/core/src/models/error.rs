use alloc::string::String;
use core::fmt;

use crate::ode::OdeError;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A parameter violates its sign constraint.
    OutOfRange {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    InvalidSchedule(&'static str),
    UnknownParameter(String),
    /// A parameter exists but cannot be swept in this configuration.
    NotSweepable(String),
    Ode(OdeError),
}

impl ModelError {
    pub(crate) fn positive(name: &'static str, value: f64) -> Result<(), Self> {
        if value > 0.0 && value.is_finite() {
            Ok(())
        } else {
            Err(Self::OutOfRange {
                name,
                value,
                requirement: "must be positive",
            })
        }
    }

    pub(crate) fn nonnegative(name: &'static str, value: f64) -> Result<(), Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(())
        } else {
            Err(Self::OutOfRange {
                name,
                value,
                requirement: "must be nonnegative",
            })
        }
    }
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OutOfRange {
                name,
                value,
                requirement,
            } => write!(f, "parameter `{name}` = {value} {requirement}"),
            Self::InvalidSchedule(why) => write!(f, "invalid schedule: {why}"),
            Self::UnknownParameter(name) => write!(f, "unknown parameter `{name}`"),
            Self::NotSweepable(name) => write!(f, "parameter `{name}` cannot be swept here"),
            Self::Ode(e) => write!(f, "{e}"),
        }
    }
}

impl From<OdeError> for ModelError {
    fn from(e: OdeError) -> Self {
        Self::Ode(e)
    }
}
