use super::OdeError;

/// Tolerances and horizons for [`integrate`](super::integrate) and
/// [`simulate_to_steady_state`](super::simulate_to_steady_state).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `None` picks one from the local derivative scale.
    pub h_init: Option<f64>,
    pub h_max: f64,
    /// Horizon for steady-state runs.
    pub t_max: f64,
    /// Threshold on `|rhs|_inf` for steady-state detection.
    pub ss_tol: f64,
    /// Consecutive accepted steps below `ss_tol` required.
    pub ss_window: usize,
    /// When set, the trajectory is resampled on a uniform grid using the
    /// dense output of the method instead of recording accepted steps.
    pub sample_dt: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: None,
            h_max: f64::INFINITY,
            t_max: 1e4,
            ss_tol: 1e-9,
            ss_window: 5,
            sample_dt: None,
            max_steps: 5_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_sample_dt(mut self, dt: f64) -> Self {
        self.sample_dt = Some(dt);
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        let positive = |v: f64| v > 0.0 && !v.is_nan();
        if !(positive(self.rtol) && positive(self.atol)) {
            return Err(OdeError::InvalidInput("rtol and atol must be positive"));
        }
        if !positive(self.h_max) || self.h_init.is_some_and(|h| !(positive(h) && h.is_finite())) {
            return Err(OdeError::InvalidInput("step sizes must be positive"));
        }
        if !(positive(self.t_max) && positive(self.ss_tol)) {
            return Err(OdeError::InvalidInput("t_max and ss_tol must be positive"));
        }
        if self.ss_window == 0 {
            return Err(OdeError::InvalidInput("ss_window must be at least 1"));
        }
        if self.sample_dt.is_some_and(|dt| !(positive(dt) && dt.is_finite())) {
            return Err(OdeError::InvalidInput("sample_dt must be positive"));
        }
        if self.max_steps == 0 {
            return Err(OdeError::InvalidInput("max_steps must be at least 1"));
        }
        Ok(())
    }
}
