use core::ops::ControlFlow;

use super::dopri::drive;
use super::stability::eigen_real_parts;
use super::{
    jacobian, max_abs, Equilibrium, IntegratorConfig, OdeError, OdeSystem, Stability, Trajectory,
};

/// Result of [`simulate_to_steady_state`].
///
/// The trajectory is always returned; `equilibrium` is `None` when `t_max`
/// was reached before the steady-state criterion held.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub trajectory: Trajectory,
    pub equilibrium: Option<Equilibrium>,
    /// `|rhs|_inf` at the final state.
    pub final_residual: f64,
}

impl SteadyState {
    pub fn converged(&self) -> bool {
        self.equilibrium.is_some()
    }

    /// The reached equilibrium, or [`OdeError::NoConvergence`].
    pub fn equilibrium(&self) -> Result<&Equilibrium, OdeError> {
        self.equilibrium.as_ref().ok_or(OdeError::NoConvergence {
            t_max: self.trajectory.final_time(),
            residual: self.final_residual,
        })
    }

    pub fn into_equilibrium(self) -> Result<Equilibrium, OdeError> {
        match self.equilibrium {
            Some(eq) => Ok(eq),
            None => Err(OdeError::NoConvergence {
                t_max: self.trajectory.final_time(),
                residual: self.final_residual,
            }),
        }
    }
}

/// Integrates from `t = 0` until `|rhs|_inf < ss_tol` holds for
/// `ss_window` consecutive accepted steps, or until `config.t_max`.
///
/// The window only starts counting once every piecewise-constant input has
/// made its last switch.
pub fn simulate_to_steady_state<S: OdeSystem + ?Sized>(
    system: &S,
    x0: &[f64],
    config: &IntegratorConfig,
) -> Result<SteadyState, OdeError> {
    let settle = super::settled_time(system);
    let t_max = config.t_max.max(settle + config.t_max * 1e-3);
    let mut trajectory = Trajectory::new(system.names());
    if x0.len() == system.dim() {
        trajectory.push(0.0, x0);
    }
    let mut below = 0usize;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let (t_end, x_end) = drive(system, x0, 0.0, t_max, config, true, |step| {
        trajectory.push(step.t, step.x);
        residual = max_abs(step.dx);
        if step.t >= settle && residual < config.ss_tol {
            below += 1;
        } else {
            below = 0;
        }
        if below >= config.ss_window {
            converged = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    residual = max_abs(&system.eval(t_end, &x_end));
    let equilibrium = converged.then(|| {
        let n = system.dim();
        let jac = jacobian(system, t_end, &x_end);
        let re = eigen_real_parts(&jac, n);
        Equilibrium {
            point: x_end.clone(),
            residual,
            stability: Stability::from_real_parts(&re),
            eigen_real_parts: re,
        }
    });
    Ok(SteadyState {
        trajectory,
        equilibrium,
        final_residual: residual,
    })
}
