use alloc::vec::Vec;

use super::{DisturbanceInputs, ModelError};
use crate::ode::OdeSystem;

/// Constants of the two-stage gene-expression plant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    pub alpha: f64,
    pub beta: f64,
    /// Free transcriptional resources.
    pub r_tx: f64,
    /// Free translational resources.
    pub r_tl: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            r_tx: 1.0,
            r_tl: 1.0,
            delta: 1.0,
            gamma: 1.0,
        }
    }
}

impl PlantParams {
    /// Effective transcription rate `alpha * R_TX`.
    pub fn k(&self) -> f64 {
        self.alpha * self.r_tx
    }

    /// Effective translation rate `beta * R_TL`.
    pub fn kappa(&self) -> f64 {
        self.beta * self.r_tl
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        ModelError::positive("alpha", self.alpha)?;
        ModelError::positive("beta", self.beta)?;
        ModelError::positive("r_tx", self.r_tx)?;
        ModelError::positive("r_tl", self.r_tl)?;
        ModelError::positive("delta", self.delta)?;
        ModelError::positive("gamma", self.gamma)
    }

    /// Equilibrium `(m, X)` for frozen inputs.
    pub fn steady_state(&self, h_grn: f64, r: f64, d1: f64, d2: f64) -> [f64; 2] {
        let m = (self.k() * d1 + h_grn) / self.delta;
        [m, (self.kappa() * d2 * m + r) / self.gamma]
    }
}

#[derive(Debug, Clone)]
pub struct Plant {
    pub params: PlantParams,
    pub inputs: DisturbanceInputs,
}

pub fn build_plant(p: PlantParams, dist: DisturbanceInputs) -> Result<Plant, ModelError> {
    p.validate()?;
    dist.validate()?;
    Ok(Plant {
        params: p,
        inputs: dist,
    })
}

impl Plant {
    /// Closed-form equilibrium under the inputs' final values.
    pub fn steady_state(&self) -> Option<[f64; 2]> {
        let [h, r, d1, d2] = self.inputs.settled()?;
        Some(self.params.steady_state(h, r, d1, d2))
    }
}

impl OdeSystem for Plant {
    fn dim(&self) -> usize {
        2
    }

    fn names(&self) -> &[&'static str] {
        &["m", "x"]
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let p = &self.params;
        let u = &self.inputs;
        dx[0] = p.k() * u.d1.value_at(t) - p.delta * x[0] + u.h_grn.value_at(t);
        dx[1] = p.kappa() * u.d2.value_at(t) * x[0] - p.gamma * x[1] + u.r.value_at(t);
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inputs.breakpoints()
    }
}
