//! Adaptive integration, steady states and equilibria of small smooth systems.
//!
//! Everything here works on any [`OdeSystem`] of dimension up to
//! [`MAX_DIM`]. Runs are single-threaded and deterministic: the same system,
//! initial state and configuration give bitwise-identical trajectories.

mod config;
mod dopri;
mod equilibria;
mod error;
mod stability;
mod steady;
mod system;
mod trajectory;

pub use config::IntegratorConfig;
pub use dopri::integrate;
pub use equilibria::{find_equilibria, halton, newton_refine, DEDUP_RELATIVE_TOL};
pub use error::OdeError;
pub use stability::{
    classify_stability, classify_stability_at, jacobian, Equilibrium, Stability,
    EQUILIBRIUM_TOL, NEAR_EQUILIBRIUM_TOL, STABILITY_MARGIN,
};
pub use steady::{simulate_to_steady_state, SteadyState};
pub use system::{settled_time, FnSystem, OdeSystem};
pub use trajectory::Trajectory;

/// Largest state dimension the solvers are tuned for.
pub const MAX_DIM: usize = 10;

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| {
        if x.is_nan() {
            f64::NAN
        } else {
            acc.max(libm::fabs(*x))
        }
    })
}
