use core::fmt;

/// Errors raised by the integrator and the equilibrium tools.
#[derive(Debug, Clone, PartialEq)]
pub enum OdeError {
    /// A precondition on the inputs was violated.
    InvalidInput(&'static str),
    /// State vector length does not match the system dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// The step size fell below the minimum; the problem is too stiff for
    /// the requested tolerances.
    StepSizeUnderflow { t: f64, h: f64 },
    /// The state became NaN or infinite.
    NonFiniteState { t: f64 },
    /// `t_max` was reached before the steady-state criterion was met.
    NoConvergence { t_max: f64, residual: f64 },
    /// The point handed to stability classification is not an equilibrium.
    NotAnEquilibrium { residual: f64 },
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Self::DimensionMismatch { expected, found } => {
                write!(f, "state has length {found}, system dimension is {expected}")
            }
            Self::StepSizeUnderflow { t, h } => {
                write!(f, "step size {h:e} underflow at t = {t}; relax tolerances")
            }
            Self::NonFiniteState { t } => write!(f, "state became non-finite at t = {t}"),
            Self::NoConvergence { t_max, residual } => write!(
                f,
                "no steady state before t_max = {t_max} (last |rhs| = {residual:e})"
            ),
            Self::NotAnEquilibrium { residual } => {
                write!(f, "point is not an equilibrium (|rhs| = {residual:e})")
            }
        }
    }
}
