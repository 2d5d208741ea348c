use alloc::vec::Vec;

use super::{GrnParams, ModelError, Signal};
use crate::ode::OdeSystem;

/// Copy-number-compensated overexpression: the synthetic gene is
/// co-expressed with a microRNA that targets its own mRNA, so the mRNA level
/// becomes independent of both the copy number `d` and the endogenous
/// transcription.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproParams {
    /// Copy-number gain. Zero disables the synthetic construct.
    pub gain: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub delta: f64,
    pub delta_bar: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Copy-number disturbance multiplier.
    pub d: f64,
}

impl Default for ReproParams {
    fn default() -> Self {
        Self {
            gain: 1.0,
            alpha: 1.0,
            beta: 1.0,
            c: 1.0,
            delta: 1.0,
            delta_bar: 1.0,
            kappa: 1.0,
            gamma: 1.0,
            d: 1.0,
        }
    }
}

impl ReproParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        ModelError::nonnegative("gain", self.gain)?;
        ModelError::positive("alpha", self.alpha)?;
        ModelError::positive("beta", self.beta)?;
        ModelError::positive("c", self.c)?;
        ModelError::positive("delta", self.delta)?;
        ModelError::positive("delta_bar", self.delta_bar)?;
        ModelError::positive("kappa", self.kappa)?;
        ModelError::positive("gamma", self.gamma)?;
        ModelError::positive("d", self.d)
    }

    /// Large-gain mRNA level `alpha * delta_bar / (c * beta)`.
    pub fn m_limit(&self) -> f64 {
        self.alpha * self.delta_bar / (self.c * self.beta)
    }

    /// Large-gain protein level `kappa * m_limit / gamma`.
    pub fn x_limit(&self) -> f64 {
        self.kappa * self.m_limit() / self.gamma
    }

    /// Effective microRNA-mediated mRNA decay `c * G * beta * d / delta_bar`.
    fn sink(&self) -> f64 {
        self.c * self.gain * self.beta * self.d / self.delta_bar
    }

    /// Worst-case mRNA offset caused by endogenous production up to `bound`.
    pub fn m_residual_bound(&self, bound: f64) -> f64 {
        bound / self.sink()
    }

    pub fn x_residual_bound(&self, bound: f64) -> f64 {
        self.kappa * self.m_residual_bound(bound) / self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproSteady {
    pub m: f64,
    pub mu: f64,
    pub x: f64,
    pub m_limit: f64,
    pub x_limit: f64,
    pub m_bound: f64,
    pub x_bound: f64,
}

pub fn repro_steady_state(r: &ReproParams, h: f64) -> ReproSteady {
    let mu = r.d * r.gain * r.beta / r.delta_bar;
    let m = (h + r.gain * r.alpha * r.d) / (r.delta + r.c * mu);
    ReproSteady {
        m,
        mu,
        x: r.kappa * m / r.gamma,
        m_limit: r.m_limit(),
        x_limit: r.x_limit(),
        m_bound: r.m_residual_bound(h),
        x_bound: r.x_residual_bound(h),
    }
}

#[derive(Debug, Clone)]
pub enum ReproMode {
    /// `(m_i, mu, x_i)` with an exogenous endogenous-transcription signal.
    Standalone { h: Signal },
    /// `(m_i, mu, x_O, x_N)`: the target protein is `x_O` of the network and
    /// its endogenous transcription is `H_O(x)`. `overexpression` adds an
    /// unregulated constant production of the target mRNA.
    Coupled { grn: GrnParams, overexpression: f64 },
}

#[derive(Debug, Clone)]
pub struct Repro {
    pub params: ReproParams,
    pub mode: ReproMode,
    /// All synthetic inputs (the construct and any overexpression) are
    /// removed from this time on.
    pub t_off: Option<f64>,
}

pub fn build_repro(r: ReproParams, mode: ReproMode, t_off: Option<f64>) -> Result<Repro, ModelError> {
    r.validate()?;
    match &mode {
        ReproMode::Standalone { h } => h.check("h_i", false)?,
        ReproMode::Coupled { grn, overexpression } => {
            grn.validate()?;
            ModelError::nonnegative("overexpression", *overexpression)?;
        }
    }
    if let Some(t) = t_off {
        ModelError::positive("t_off", t)?;
    }
    Ok(Repro {
        params: r,
        mode,
        t_off,
    })
}

impl Repro {
    fn gain_at(&self, t: f64) -> f64 {
        match self.t_off {
            Some(off) if t >= off => 0.0,
            _ => self.params.gain,
        }
    }

    /// Closed-form equilibrium, standalone mode with a settling `H_i` and no
    /// switch-off.
    pub fn steady_state(&self) -> Option<ReproSteady> {
        match (&self.mode, self.t_off) {
            (ReproMode::Standalone { h }, None) => Some(repro_steady_state(&self.params, h.settled_value()?)),
            _ => None,
        }
    }

    pub fn output_index(&self) -> usize {
        2
    }
}

impl OdeSystem for Repro {
    fn dim(&self) -> usize {
        match self.mode {
            ReproMode::Standalone { .. } => 3,
            ReproMode::Coupled { .. } => 4,
        }
    }

    fn names(&self) -> &[&'static str] {
        match self.mode {
            ReproMode::Standalone { .. } => &["m_i", "mu", "x_i"],
            ReproMode::Coupled { .. } => &["m_i", "mu", "x_o", "x_n"],
        }
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let r = &self.params;
        let g = self.gain_at(t);
        let endogenous = match &self.mode {
            ReproMode::Standalone { h } => h.value_at(t),
            ReproMode::Coupled { grn, overexpression } => {
                let extra = if self.t_off.is_some_and(|off| t >= off) { 0.0 } else { *overexpression };
                grn.h_o(x[2], x[3]) + extra
            }
        };
        dx[0] = endogenous - r.delta * x[0] + r.d * g * r.alpha - r.c * x[0] * x[1];
        dx[1] = r.d * g * r.beta - r.delta_bar * x[1];
        dx[2] = r.kappa * x[0] - r.gamma * x[2];
        if let ReproMode::Coupled { grn, .. } = &self.mode {
            dx[3] = grn.h_n(x[2], x[3]) - grn.gamma * x[3];
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = match &self.mode {
            ReproMode::Standalone { h } => h.breakpoints(),
            ReproMode::Coupled { .. } => Vec::new(),
        };
        b.extend(self.t_off);
        b.sort_by(f64::total_cmp);
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{find_equilibria, integrate, IntegratorConfig};

    #[test]
    fn closed_form_examples() {
        for g in [0.5, 1.0, 10.0] {
            let r = ReproParams {
                gain: g,
                ..Default::default()
            };
            let s = repro_steady_state(&r, 0.0);
            assert!((s.m - g / (1.0 + g)).abs() < 1e-15);
            assert!((s.x - g / (1.0 + g)).abs() < 1e-15);
        }
        let r = ReproParams {
            gain: 100.0,
            ..Default::default()
        };
        let s = repro_steady_state(&r, 1.0);
        assert!((s.m - 1.0).abs() < 1e-15 && (s.x - 1.0).abs() < 1e-15);
        assert!((s.m_bound - 0.01).abs() < 1e-15);
    }

    #[test]
    fn copy_number_compensation() {
        let r = ReproParams {
            gain: 1000.0,
            ..Default::default()
        };
        let a = repro_steady_state(&r, 5.0).m;
        let b = repro_steady_state(&ReproParams { d: 2.0, ..r }, 5.0).m;
        assert!((a - b).abs() / a <= 0.0051);
    }

    #[test]
    fn standalone_equilibrium_matches_formula() {
        let r = ReproParams {
            gain: 7.0,
            c: 0.4,
            delta_bar: 2.0,
            ..Default::default()
        };
        let sys = build_repro(r, ReproMode::Standalone { h: Signal::constant(2.0) }, None).unwrap();
        let eqs = find_equilibria(&sys, &[(0.0, 20.0); 3], 64).unwrap();
        assert_eq!(eqs.len(), 1);
        let s = sys.steady_state().unwrap();
        assert!((eqs[0].point[0] - s.m).abs() < 1e-9);
        assert!((eqs[0].point[1] - s.mu).abs() < 1e-9);
        assert!((eqs[0].point[2] - s.x).abs() < 1e-9);
    }

    #[test]
    fn switch_off_removes_the_construct() {
        let sys = build_repro(
            ReproParams::default(),
            ReproMode::Standalone { h: Signal::constant(0.0) },
            Some(5.0),
        )
        .unwrap();
        assert_eq!(sys.breakpoints(), [5.0]);
        let traj = integrate(&sys, &[0.0; 3], (0.0, 60.0), &IntegratorConfig::default()).unwrap();
        assert!(traj.sample(4.99)[2] > 0.3);
        assert!(traj.final_state().iter().all(|v| v.abs() < 1e-9));
    }
}
