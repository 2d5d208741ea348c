use alloc::vec::Vec;

use super::AnalysisError;
use crate::models::{FfwdParams, FfwdVariant};
use crate::ode::Trajectory;

/// mRNA level that the memory variable drives the loop towards:
/// `gamma_bar * alpha * delta_bar / (g * alpha_bar * beta_bar)`.
pub fn v_ref(f: &FfwdParams) -> f64 {
    f.gamma_bar * f.alpha * f.delta_bar / (f.g * f.alpha_bar * f.beta_bar)
}

/// Memory variable `z = E / q - m / p` of the ERN loop, with
/// `q = alpha_bar * beta_bar / delta_bar` and `p = alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenIntegralTrace {
    pub times: Vec<f64>,
    pub z: Vec<f64>,
    /// Central-difference `dz/dt` at `times[1..n-1]`.
    pub dz_dt: Vec<f64>,
    /// `|dz/dt - rate|` at `times[1..n-1]`, where
    /// `rate = (g/alpha) E (m - v_ref) - d1 exp(-delta_bar t) + (delta/alpha) m`.
    pub residual: Vec<f64>,
    pub v_ref: f64,
}

impl HiddenIntegralTrace {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_abs_rate(&self) -> f64 {
        self.dz_dt.iter().fold(0.0, |a, v| f64::max(a, v.abs()))
    }
}

/// Evaluates the memory variable along an ERN trajectory started from
/// `m_E(0) = 0` with `d2 = 1` and constant `d1`.
///
/// The integral-action rate is derived without approximation; with `d1 = 1`
/// and `delta = 0` it reduces to `(g/alpha) E (m - v_ref) - exp(-delta_bar t)`.
pub fn hidden_integral_trace(
    traj: &Trajectory,
    f: &FfwdParams,
    d1: f64,
) -> Result<HiddenIntegralTrace, AnalysisError> {
    if f.variant != FfwdVariant::Ern || traj.dim() != 4 {
        return Err(AnalysisError::InvalidArgument("hidden integral needs an ERN trajectory"));
    }
    if !(f.g > 0.0) {
        return Err(AnalysisError::InvalidArgument("hidden integral needs g > 0"));
    }
    let n = traj.len();
    if n < 3 {
        return Err(AnalysisError::InvalidArgument("trajectory needs at least three samples"));
    }
    // Coarseness is judged against each coordinate's range over the run.
    let scale: Vec<f64> = (0..4)
        .map(|j| traj.states().fold(0.0, |a, x| f64::max(a, x[j].abs())))
        .collect();
    for i in 0..n - 1 {
        let (a, b) = (traj.state(i), traj.state(i + 1));
        for j in 0..4 {
            if (b[j] - a[j]).abs() > 0.1 * scale[j] {
                return Err(AnalysisError::GridTooCoarse { index: i, coordinate: j });
            }
        }
    }

    let q = f.alpha_bar * f.beta_bar / f.delta_bar;
    let p = f.alpha;
    let vr = v_ref(f);
    let t = traj.times();
    let z: Vec<f64> = traj.states().map(|x| x[1] / q - x[2] / p).collect();
    let mut dz_dt = Vec::with_capacity(n - 2);
    let mut residual = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let h1 = t[i] - t[i - 1];
        let h2 = t[i + 1] - t[i];
        // Three-point derivative, second order on non-uniform grids.
        let d = (h1 * h1 * z[i + 1] - h2 * h2 * z[i - 1] + (h2 * h2 - h1 * h1) * z[i]) / (h1 * h2 * (h1 + h2));
        let x = traj.state(i);
        let (e, m) = (x[1], x[2]);
        let rate = f.g / f.alpha * e * (m - vr) - d1 * libm::exp(-f.delta_bar * t[i]) + f.delta / f.alpha * m;
        dz_dt.push(d);
        residual.push((d - rate).abs());
    }
    Ok(HiddenIntegralTrace {
        times: t.to_vec(),
        z,
        dz_dt,
        residual,
        v_ref: vr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_ffwd, DisturbanceInputs, Signal};
    use crate::ode::{integrate, simulate_to_steady_state, IntegratorConfig};

    fn trace(f: FfwdParams, d1: f64, dt: f64) -> HiddenIntegralTrace {
        let dist = DisturbanceInputs {
            d1: Signal::constant(d1),
            ..Default::default()
        };
        let sys = build_ffwd(f, dist).unwrap();
        let cfg = IntegratorConfig::default().with_tolerances(1e-12, 1e-14).with_sample_dt(dt);
        let traj = integrate(&sys, &[0.0; 4], (0.0, 10.0), &cfg).unwrap();
        hidden_integral_trace(&traj, &f, d1).unwrap()
    }

    #[test]
    fn residual_within_differencing_budget() {
        for d1 in [0.5, 1.0, 2.0] {
            let tr = trace(FfwdParams::default(), d1, 0.01);
            assert!(tr.max_residual() <= 1e-3 * tr.max_abs_rate(), "d1 = {d1}");
        }
    }

    #[test]
    fn residual_is_second_order() {
        let f = FfwdParams {
            g: 2.0,
            ..Default::default()
        };
        let coarse = trace(f, 1.0, 0.02).max_residual();
        let fine = trace(f, 1.0, 0.01).max_residual();
        assert!(coarse / fine >= 3.0, "{coarse} / {fine}");
    }

    #[test]
    fn steady_m_is_v_ref_without_decay() {
        let f = FfwdParams {
            delta: 0.0,
            g: 2.0,
            ..Default::default()
        };
        for d1 in [0.5, 2.0] {
            let dist = DisturbanceInputs {
                d1: Signal::constant(d1),
                ..Default::default()
            };
            let sys = build_ffwd(f, dist).unwrap();
            let ss = simulate_to_steady_state(&sys, &[0.0; 4], &IntegratorConfig::default()).unwrap();
            assert!((ss.equilibrium().unwrap().point[2] - v_ref(&f)).abs() < 1e-6);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let sys = build_ffwd(FfwdParams::default(), DisturbanceInputs::default()).unwrap();
        let cfg = IntegratorConfig::default().with_sample_dt(1.0);
        let traj = integrate(&sys, &[0.0; 4], (0.0, 10.0), &cfg).unwrap();
        assert!(matches!(
            hidden_integral_trace(&traj, &FfwdParams::default(), 1.0),
            Err(AnalysisError::GridTooCoarse { .. })
        ));
    }
}
