use alloc::vec::Vec;

use super::{DisturbanceInputs, ModelError, PlantParams};
use crate::ode::{simulate_to_steady_state, IntegratorConfig, OdeSystem, Trajectory};

/// Phosphorylation-cycle quasi-integral controller constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QicParams {
    /// Kinase catalytic rate.
    pub k1: f64,
    /// Phosphatase catalytic rate.
    pub k2: f64,
    /// Kinase Michaelis constant.
    pub km1: f64,
    /// Phosphatase Michaelis constant.
    pub km2: f64,
    pub gamma_u: f64,
    /// Kinase level, the reference input.
    pub v: f64,
    pub u_tot: f64,
    pub k_act: f64,
    pub a_act: f64,
    pub n_act: f64,
    /// Phosphatase level of the open-loop comparator.
    pub w_open: f64,
}

impl Default for QicParams {
    fn default() -> Self {
        Self {
            k1: 100.0,
            k2: 100.0,
            km1: 1e-4,
            km2: 1e-4,
            gamma_u: 1.0,
            v: 1.0,
            u_tot: 20.0,
            k_act: 10.0,
            a_act: 6000.0,
            n_act: 1.0,
            w_open: 1.0,
        }
    }
}

impl QicParams {
    /// Singular-perturbation parameter `gamma_u / k2`.
    pub fn epsilon(&self) -> f64 {
        self.gamma_u / self.k2
    }

    /// Ideal set point `(k1 / k2) * v`.
    pub fn set_point(&self) -> f64 {
        self.k1 / self.k2 * self.v
    }

    /// Activating Hill function `a * u^n / (u^n + K^n)`.
    pub fn activation(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        let un = libm::pow(u, self.n_act);
        self.a_act * un / (un + libm::pow(self.k_act, self.n_act))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        ModelError::positive("k1", self.k1)?;
        ModelError::positive("k2", self.k2)?;
        ModelError::positive("km1", self.km1)?;
        ModelError::positive("km2", self.km2)?;
        ModelError::positive("gamma_u", self.gamma_u)?;
        ModelError::nonnegative("v", self.v)?;
        ModelError::positive("u_tot", self.u_tot)?;
        ModelError::positive("k_act", self.k_act)?;
        ModelError::positive("a_act", self.a_act)?;
        ModelError::positive("n_act", self.n_act)?;
        ModelError::nonnegative("w_open", self.w_open)
    }

    /// Ideal zero-order dynamics `k1 v - k2 w - gamma_u u`.
    pub fn reduced_rate(&self, u: f64, w: f64) -> f64 {
        self.k1 * self.v - self.k2 * w - self.gamma_u * u
    }

    /// Whether both enzymes are saturated at this modification level.
    pub fn zero_order_holds(&self, u: f64) -> bool {
        self.u_tot - u >= 10.0 * self.km1 && u >= 10.0 * self.km2
    }
}

/// Net rate of the covalent-modification cycle.
pub fn mm_cycle_rate(q: &QicParams, u0: f64, u: f64, w: f64) -> f64 {
    q.k1 * q.v * u0 / (u0 + q.km1) - q.k2 * w * u / (u + q.km2) - q.gamma_u * u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loop {
    Closed,
    Open,
}

#[derive(Debug, Clone)]
pub struct Qic {
    pub qic: QicParams,
    pub plant: PlantParams,
    pub inputs: DisturbanceInputs,
    pub mode: Loop,
}

pub fn build_qic(
    q: QicParams,
    p: PlantParams,
    dist: DisturbanceInputs,
    mode: Loop,
) -> Result<Qic, ModelError> {
    q.validate()?;
    p.validate()?;
    dist.validate()?;
    Ok(Qic {
        qic: q,
        plant: p,
        inputs: dist,
        mode,
    })
}

/// Post-hoc check of the saturation premise along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroOrderReport {
    /// Share of trajectory points where either enzyme is unsaturated.
    pub violation_fraction: f64,
    /// Set when more than 10% of points are unsaturated.
    pub violated: bool,
    /// Reduced-form `u'` at each point where the premise holds, else `None`.
    pub reduced_rate: Vec<Option<f64>>,
}

impl Qic {
    fn phosphatase(&self, x: &[f64]) -> f64 {
        match self.mode {
            Loop::Closed => x[1],
            Loop::Open => self.qic.w_open,
        }
    }

    pub fn zero_order_report(&self, traj: &Trajectory) -> ZeroOrderReport {
        let mut bad = 0usize;
        let reduced_rate: Vec<Option<f64>> = traj
            .states()
            .map(|x| {
                if self.qic.zero_order_holds(x[2]) {
                    Some(self.qic.reduced_rate(x[2], self.phosphatase(x)))
                } else {
                    bad += 1;
                    None
                }
            })
            .collect();
        let n = traj.len().max(1);
        let violation_fraction = bad as f64 / n as f64;
        ZeroOrderReport {
            violation_fraction,
            violated: violation_fraction > 0.1,
            reduced_rate,
        }
    }
}

impl OdeSystem for Qic {
    fn dim(&self) -> usize {
        3
    }

    fn names(&self) -> &[&'static str] {
        &["m", "x", "u"]
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let p = &self.plant;
        let q = &self.qic;
        let d = &self.inputs;
        let u = x[2];
        // Unmodified pool closes the cycle: u0 = u_tot - u.
        let u0 = (q.u_tot - u).max(0.0);
        let alpha = q.activation(u);
        dx[0] = alpha * p.r_tx * d.d1.value_at(t) - p.delta * x[0] + d.h_grn.value_at(t);
        dx[1] = p.kappa() * d.d2.value_at(t) * x[0] - p.gamma * x[1] + d.r.value_at(t);
        dx[2] = mm_cycle_rate(q, u0, u.max(0.0), self.phosphatase(x));
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inputs.breakpoints()
    }
}

/// Phosphatase level that makes the open loop reproduce the closed loop's
/// nominal output: the closed-loop steady output itself, since with
/// `w_open = X*` the open-loop `u` equation has the same root.
pub fn calibrate_open_loop(
    q: QicParams,
    p: PlantParams,
    nominal: DisturbanceInputs,
    cfg: &IntegratorConfig,
) -> Result<f64, ModelError> {
    let closed = build_qic(q, p, nominal, Loop::Closed)?;
    let ss = simulate_to_steady_state(&closed, &[0.0; 3], cfg)?;
    Ok(ss.equilibrium()?.point[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Signal;

    fn unit_cycle() -> QicParams {
        QicParams {
            k1: 1.0,
            k2: 1.0,
            km1: 1.0,
            km2: 1.0,
            gamma_u: 0.0,
            v: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn half_saturation() {
        let q = unit_cycle();
        assert_eq!(mm_cycle_rate(&q, q.km1, 0.0, 0.0), 0.5);
    }

    #[test]
    fn symmetric_cancellation() {
        let q = unit_cycle();
        assert_eq!(mm_cycle_rate(&q, q.km1, q.km2, 1.0), 0.0);
    }

    #[test]
    fn zero_order_regime() {
        let q = unit_cycle();
        let rate = mm_cycle_rate(&q, 100.0 * q.km1, 100.0 * q.km2, 1.0);
        assert!(rate.abs() < 0.01);
        let kinase = q.k1 * q.v * 100.0 / 101.0;
        let phosphatase = q.k2 * 100.0 / 101.0;
        assert!((kinase - q.k1 * q.v).abs() / (q.k1 * q.v) < 0.01);
        assert!((phosphatase - q.k2).abs() / q.k2 < 0.01);
    }

    #[test]
    fn activation_is_increasing() {
        let q = QicParams::default();
        let mut prev = q.activation(0.0);
        assert_eq!(prev, 0.0);
        for i in 1..100 {
            let a = q.activation(i as f64 * 0.2);
            assert!(a > prev);
            prev = a;
        }
    }

    fn reference_plant() -> PlantParams {
        PlantParams {
            delta: 1000.0,
            ..Default::default()
        }
    }

    #[test]
    fn closed_loop_tracks_set_point() {
        let q = QicParams::default();
        let sys = build_qic(q, reference_plant(), DisturbanceInputs::default(), Loop::Closed).unwrap();
        let ss = simulate_to_steady_state(&sys, &[0.0; 3], &IntegratorConfig::default()).unwrap();
        let y = ss.equilibrium().unwrap().point[1];
        assert!((y - q.set_point()).abs() < 5.0 * q.epsilon(), "y = {y}");
        assert!(ss.equilibrium().unwrap().stability.is_stable());
    }

    #[test]
    fn no_kinase_turns_the_loop_off() {
        let q = QicParams {
            v: 0.0,
            ..Default::default()
        };
        let sys = build_qic(q, reference_plant(), DisturbanceInputs::default(), Loop::Closed).unwrap();
        let ss = simulate_to_steady_state(&sys, &[0.0, 0.0, 1.0], &IntegratorConfig::default()).unwrap();
        let eq = ss.equilibrium().unwrap();
        assert!(eq.point[2].abs() < 1e-8 && eq.point[1].abs() < 1e-8);
    }

    #[test]
    fn open_loop_passes_disturbance_closed_loop_rejects_it() {
        let q = QicParams::default();
        let p = reference_plant();
        let cfg = IntegratorConfig::default();
        let w = calibrate_open_loop(q, p, DisturbanceInputs::default(), &cfg).unwrap();
        let q_open = QicParams { w_open: w, ..q };
        let stepped = DisturbanceInputs {
            d1: Signal::step(1.0, 20.0, 0.5),
            ..Default::default()
        };
        let run = |mode| {
            let sys = build_qic(q_open, p, stepped.clone(), mode).unwrap();
            let ss = simulate_to_steady_state(&sys, &[0.0; 3], &cfg).unwrap();
            let pre = ss.trajectory.sample(19.999)[1];
            (pre, ss.equilibrium().unwrap().point[1])
        };
        let (pre_c, post_c) = run(Loop::Closed);
        let (pre_o, post_o) = run(Loop::Open);
        assert!((pre_c - pre_o).abs() < 1e-6 * pre_c);
        assert!((pre_o - post_o) / pre_o >= 0.25);
        assert!((post_c - pre_c).abs() <= 5.0 * q.epsilon() * pre_c);
    }

    #[test]
    fn zero_order_report_flags_unsaturated_runs() {
        let q = QicParams {
            km1: 50.0,
            km2: 50.0,
            ..Default::default()
        };
        let sys = build_qic(q, reference_plant(), DisturbanceInputs::default(), Loop::Closed).unwrap();
        let cfg = IntegratorConfig::default().with_sample_dt(0.1);
        let traj = crate::ode::integrate(&sys, &[0.0; 3], (0.0, 10.0), &cfg).unwrap();
        let rep = sys.zero_order_report(&traj);
        assert!(rep.violated);
        assert!(rep.reduced_rate.iter().all(Option::is_none));
    }
}
