use alloc::vec;
use alloc::vec::Vec;

use super::{DisturbanceInputs, ModelError};
use crate::ode::OdeSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfwdVariant {
    /// Translated endoribonuclease `E` cleaving the target mRNA.
    Ern,
    /// Transcribed microRNA `mu`, no translation step.
    MicroRna,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FfwdParams {
    pub alpha_bar: f64,
    pub delta_bar: f64,
    pub beta_bar: f64,
    pub gamma_bar: f64,
    /// mRNA cleavage rate constant.
    pub g: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub gamma: f64,
    pub variant: FfwdVariant,
}

impl Default for FfwdParams {
    fn default() -> Self {
        Self {
            alpha_bar: 1.0,
            delta_bar: 1.0,
            beta_bar: 1.0,
            gamma_bar: 1.0,
            g: 1.0,
            alpha: 1.0,
            beta: 1.0,
            delta: 1.0,
            gamma: 1.0,
            variant: FfwdVariant::Ern,
        }
    }
}

impl FfwdParams {
    /// Compensation strength: `g * beta_bar * alpha_bar / (gamma_bar * delta_bar)`
    /// for the ERN, `g * alpha_bar / delta_bar` for the microRNA.
    pub fn theta(&self) -> f64 {
        match self.variant {
            FfwdVariant::Ern => self.g * self.beta_bar * self.alpha_bar / (self.gamma_bar * self.delta_bar),
            FfwdVariant::MicroRna => self.g * self.alpha_bar / self.delta_bar,
        }
    }

    /// `g = 0` (no controller) and `delta = 0` (perfect adaptation) are both
    /// meaningful limits; together they leave the mRNA without any sink.
    pub fn validate(&self) -> Result<(), ModelError> {
        ModelError::positive("alpha_bar", self.alpha_bar)?;
        ModelError::positive("delta_bar", self.delta_bar)?;
        ModelError::positive("beta_bar", self.beta_bar)?;
        ModelError::positive("gamma_bar", self.gamma_bar)?;
        ModelError::nonnegative("g", self.g)?;
        ModelError::positive("alpha", self.alpha)?;
        ModelError::positive("beta", self.beta)?;
        ModelError::nonnegative("delta", self.delta)?;
        ModelError::positive("gamma", self.gamma)?;
        if self.g == 0.0 && self.delta == 0.0 {
            return Err(ModelError::OutOfRange {
                name: "delta",
                value: 0.0,
                requirement: "must be positive when g = 0",
            });
        }
        Ok(())
    }
}

/// Equilibrium of a feedforward loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FfwdSteady {
    /// Controller mRNA, ERN variant only.
    pub m_e: Option<f64>,
    /// Controller species: `E` or `mu`.
    pub controller: f64,
    pub m: f64,
    pub x: f64,
}

impl FfwdSteady {
    /// Coordinates in the order used by [`Ffwd`].
    pub fn state(&self) -> Vec<f64> {
        match self.m_e {
            Some(m_e) => vec![m_e, self.controller, self.m, self.x],
            None => vec![self.controller, self.m, self.x],
        }
    }
}

pub fn ffwd_steady_state(f: &FfwdParams, d1: f64, d2: f64) -> FfwdSteady {
    let (m_e, controller) = match f.variant {
        FfwdVariant::Ern => {
            let m_e = f.alpha_bar * d1 / f.delta_bar;
            (Some(m_e), f.beta_bar * d2 * m_e / f.gamma_bar)
        }
        FfwdVariant::MicroRna => (None, f.alpha_bar * d1 / f.delta_bar),
    };
    let m = f.alpha * d1 / (f.delta + f.g * controller);
    FfwdSteady {
        m_e,
        controller,
        m,
        x: f.beta * d2 * m / f.gamma,
    }
}

/// Transcriptional-resource share left by a sequestering activator at level
/// `a`: `1 / (1 + a / k_a)`.
pub fn titration_d1(a: f64, k_a: f64) -> f64 {
    1.0 / (1.0 + a / k_a)
}

#[derive(Debug, Clone)]
pub struct Ffwd {
    pub params: FfwdParams,
    pub inputs: DisturbanceInputs,
}

pub fn build_ffwd(f: FfwdParams, dist: DisturbanceInputs) -> Result<Ffwd, ModelError> {
    f.validate()?;
    dist.validate()?;
    Ok(Ffwd {
        params: f,
        inputs: dist,
    })
}

impl Ffwd {
    pub fn steady_state(&self) -> Option<FfwdSteady> {
        let [_, _, d1, d2] = self.inputs.settled()?;
        Some(ffwd_steady_state(&self.params, d1, d2))
    }

    pub fn output_index(&self) -> usize {
        self.dim() - 1
    }
}

impl OdeSystem for Ffwd {
    fn dim(&self) -> usize {
        match self.params.variant {
            FfwdVariant::Ern => 4,
            FfwdVariant::MicroRna => 3,
        }
    }

    fn names(&self) -> &[&'static str] {
        match self.params.variant {
            FfwdVariant::Ern => &["m_e", "e", "m", "x"],
            FfwdVariant::MicroRna => &["mu", "m", "x"],
        }
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let f = &self.params;
        let d1 = self.inputs.d1.value_at(t);
        let d2 = self.inputs.d2.value_at(t);
        let (ctl, m, y) = match f.variant {
            FfwdVariant::Ern => {
                dx[0] = f.alpha_bar * d1 - f.delta_bar * x[0];
                dx[1] = f.beta_bar * d2 * x[0] - f.gamma_bar * x[1];
                (x[1], 2, 3)
            }
            FfwdVariant::MicroRna => {
                dx[0] = f.alpha_bar * d1 - f.delta_bar * x[0];
                (x[0], 1, 2)
            }
        };
        dx[m] = f.alpha * d1 - f.delta * x[m] - f.g * x[m] * ctl;
        dx[y] = f.beta * d2 * x[m] - f.gamma * x[y];
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inputs.breakpoints()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Signal;
    use crate::ode::{find_equilibria, simulate_to_steady_state, IntegratorConfig};

    #[test]
    fn unit_ern_equilibrium() {
        let sys = build_ffwd(FfwdParams::default(), DisturbanceInputs::default()).unwrap();
        let eqs = find_equilibria(&sys, &[(0.0, 5.0); 4], 64).unwrap();
        assert_eq!(eqs.len(), 1);
        assert!(eqs[0].stability.is_stable());
        assert!((eqs[0].point[3] - 0.5).abs() < 1e-9);
        assert_eq!(sys.steady_state().unwrap().x, 0.5);
    }

    #[test]
    fn closed_form_examples() {
        // theta = 1, d = 2 through d1.
        assert!((ffwd_steady_state(&FfwdParams::default(), 2.0, 1.0).x - 2.0 / 3.0).abs() < 1e-15);
        let f = FfwdParams {
            g: 100.0,
            ..Default::default()
        };
        let x = ffwd_steady_state(&f, 1.0, 1.0).x;
        assert!((x - 0.01).abs() / 0.01 <= 0.011);
    }

    #[test]
    fn product_form_agrees() {
        let f = FfwdParams {
            alpha_bar: 1.3,
            delta_bar: 0.7,
            beta_bar: 2.1,
            gamma_bar: 0.4,
            g: 0.9,
            alpha: 1.7,
            beta: 0.6,
            delta: 0.8,
            gamma: 1.9,
            variant: FfwdVariant::Ern,
        };
        for (d1, d2) in [(0.5, 2.0), (1.0, 1.0), (3.0, 0.25)] {
            let d = d1 * d2;
            let x = ffwd_steady_state(&f, d1, d2).x;
            let product = f.beta * f.alpha / f.gamma * d / (f.delta + f.theta() * d);
            assert!((x - product).abs() < 1e-14 * product);
        }
    }

    #[test]
    fn perfect_adaptation_without_decay() {
        let f = FfwdParams {
            delta: 0.0,
            ..Default::default()
        };
        let target = f.beta * f.alpha / (f.gamma * f.theta());
        for d1 in [0.25, 0.5, 1.0, 2.0, 4.0] {
            for d2 in [0.5, 1.0, 3.0] {
                assert_eq!(ffwd_steady_state(&f, d1, d2).x, target);
            }
        }
    }

    #[test]
    fn microrna_does_not_compensate_translation() {
        let f = FfwdParams {
            variant: FfwdVariant::MicroRna,
            ..Default::default()
        };
        let before = ffwd_steady_state(&f, 1.0, 1.0).x;
        let after = ffwd_steady_state(&f, 1.0, 0.5).x;
        assert!((after - 0.5 * before).abs() < 1e-15);
        let dist = DisturbanceInputs {
            d2: Signal::step(1.0, 10.0, 0.5),
            ..Default::default()
        };
        let sys = build_ffwd(f, dist).unwrap();
        let ss = simulate_to_steady_state(&sys, &[0.0; 3], &IntegratorConfig::default()).unwrap();
        assert!((ss.equilibrium().unwrap().point[2] - after).abs() < 1e-8);
    }

    #[test]
    fn no_sink_is_rejected() {
        let f = FfwdParams {
            g: 0.0,
            delta: 0.0,
            ..Default::default()
        };
        assert!(f.validate().is_err());
    }
}
