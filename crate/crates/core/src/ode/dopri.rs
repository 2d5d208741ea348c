//! Dormand-Prince 5(4) with PI step-size control and 4th-order dense output.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use super::{IntegratorConfig, OdeError, OdeSystem, Trajectory};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// One accepted step, with enough data to interpolate inside it.
pub(crate) struct AcceptedStep<'a> {
    pub t_old: f64,
    pub t: f64,
    pub x: &'a [f64],
    /// `rhs(t, x)`, reused as the first stage of the next step.
    pub dx: &'a [f64],
    cont: &'a [Vec<f64>; 5],
}

impl AcceptedStep<'_> {
    pub fn interpolate(&self, t: f64, out: &mut [f64]) {
        let h = self.t - self.t_old;
        let s = (t - self.t_old) / h;
        let s1 = 1.0 - s;
        let [c1, c2, c3, c4, c5] = self.cont;
        for (i, o) in out.iter_mut().enumerate() {
            *o = c1[i] + s * (c2[i] + s1 * (c3[i] + s * (c4[i] + s1 * c5[i])));
        }
    }
}

/// Largest float strictly below `b`.
fn just_before(b: f64) -> f64 {
    if b == 0.0 {
        return -f64::from_bits(1);
    }
    let bits = b.to_bits();
    if b > 0.0 {
        f64::from_bits(bits - 1)
    } else {
        f64::from_bits(bits + 1)
    }
}

struct Workspace {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    x_new: Vec<f64>,
    err: Vec<f64>,
    cont: [Vec<f64>; 5],
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            k: core::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            x_new: vec![0.0; n],
            err: vec![0.0; n],
            cont: core::array::from_fn(|_| vec![0.0; n]),
        }
    }
}

fn weighted_rms(v: &[f64], x0: &[f64], x1: &[f64], cfg: &IntegratorConfig) -> f64 {
    let n = v.len() as f64;
    let sum: f64 = v
        .iter()
        .zip(x0.iter().zip(x1))
        .map(|(e, (a, b))| {
            let sc = cfg.atol + cfg.rtol * libm::fabs(*a).max(libm::fabs(*b));
            let r = e / sc;
            r * r
        })
        .sum();
    libm::sqrt(sum / n)
}

fn initial_step<S: OdeSystem + ?Sized>(
    system: &S,
    t: f64,
    x: &[f64],
    f0: &[f64],
    span: f64,
    cfg: &IntegratorConfig,
    eval_t: impl Fn(f64) -> f64,
) -> f64 {
    let zeros = vec![0.0; x.len()];
    let d0 = weighted_rms(x, x, &zeros, cfg);
    let d1 = weighted_rms(f0, x, &zeros, cfg);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(cfg.h_max).min(span);
    let x1: Vec<f64> = x.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; x.len()];
    system.rhs(eval_t(t + h0), &x1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = weighted_rms(&diff, x, &zeros, cfg) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        libm::pow(0.01 / d1.max(d2), 0.2)
    };
    (100.0 * h0).min(h1).min(cfg.h_max).min(span)
}

/// Integrates `[t0, t1]`, calling `observer` after every accepted step.
///
/// The interval is split at the system's breakpoints so that no step
/// straddles a discontinuity. Returns the time and state where integration
/// stopped (either `t1` or the point where the observer broke out).
pub(crate) fn drive<S, O>(
    system: &S,
    x0: &[f64],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    stiffness_cap: bool,
    mut observer: O,
) -> Result<(f64, Vec<f64>), OdeError>
where
    S: OdeSystem + ?Sized,
    O: FnMut(&AcceptedStep<'_>) -> ControlFlow<()>,
{
    let n = system.dim();
    if x0.len() != n {
        return Err(OdeError::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(OdeError::InvalidInput("time span must satisfy t0 < t1"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::InvalidInput("initial state must be finite"));
    }
    cfg.validate()?;

    let mut stops: Vec<f64> = system
        .breakpoints()
        .into_iter()
        .filter(|b| *b > t0 && *b < t1)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(t1);

    let mut ws = Workspace::new(n);
    let mut x = x0.to_vec();
    let mut t = t0;
    let mut h_prev: Option<f64> = cfg.h_init;
    let mut steps = 0usize;

    for &seg_end in &stops {
        let limit = just_before(seg_end);
        let eval_t = |s: f64| if s >= seg_end { limit } else { s };
        system.rhs(eval_t(t), &x, &mut ws.k[0]);
        let mut h = match h_prev {
            Some(h) => h.min(seg_end - t).min(cfg.h_max),
            None => initial_step(system, t, &x, &ws.k[0].clone(), seg_end - t, cfg, eval_t),
        };
        let mut fac_old = 1e-4_f64;
        let mut rejected_last = false;
        let mut nonfinite = false;

        while t < seg_end {
            let h_min = 16.0 * f64::EPSILON * libm::fabs(t).max(1.0);
            if h < h_min {
                return Err(if nonfinite {
                    OdeError::NonFiniteState { t }
                } else {
                    OdeError::StepSizeUnderflow { t, h }
                });
            }
            steps += 1;
            if steps > cfg.max_steps {
                return Err(OdeError::StepSizeUnderflow { t, h });
            }
            let last = t + h >= seg_end || (seg_end - (t + h)) <= h_min;
            if last {
                h = seg_end - t;
            }
            let t_new = if last { seg_end } else { t + h };

            stages(system, t, h, &x, &mut ws, &eval_t);
            // ws.k[6] = f(t+h, x_new)
            for i in 0..n {
                ws.err[i] = h
                    * (E1 * ws.k[0][i]
                        + E3 * ws.k[2][i]
                        + E4 * ws.k[3][i]
                        + E5 * ws.k[4][i]
                        + E6 * ws.k[5][i]
                        + E7 * ws.k[6][i]);
            }
            let err = weighted_rms(&ws.err, &x, &ws.x_new, cfg);

            if !err.is_finite() || ws.x_new.iter().any(|v| !v.is_finite()) {
                nonfinite = true;
                h *= 0.1;
                rejected_last = true;
                continue;
            }
            nonfinite = false;

            let fac11 = libm::pow(err, EXPO);
            if err <= 1.0 {
                let mut fac = fac11 / libm::pow(fac_old, BETA);
                fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = (h / fac).min(cfg.h_max);
                if stiffness_cap {
                    // keep h * rho inside the real stability interval so that
                    // errors near an attractor are damped instead of sustained
                    let num: f64 = ws.k[6].iter().zip(&ws.k[5]).map(|(a, b)| (a - b) * (a - b)).sum();
                    let den: f64 = ws.x_new.iter().zip(&ws.tmp).map(|(a, b)| (a - b) * (a - b)).sum();
                    if den > 0.0 && num > 0.0 {
                        h_new = h_new.min(2.0 / libm::sqrt(num / den));
                    }
                }
                if rejected_last {
                    h_new = h_new.min(h);
                }
                fac_old = err.max(1e-4);
                rejected_last = false;

                for i in 0..n {
                    let ydiff = ws.x_new[i] - x[i];
                    let bspl = h * ws.k[0][i] - ydiff;
                    ws.cont[0][i] = x[i];
                    ws.cont[1][i] = ydiff;
                    ws.cont[2][i] = bspl;
                    ws.cont[3][i] = ydiff - h * ws.k[6][i] - bspl;
                    ws.cont[4][i] = h
                        * (D1 * ws.k[0][i]
                            + D3 * ws.k[2][i]
                            + D4 * ws.k[3][i]
                            + D5 * ws.k[4][i]
                            + D6 * ws.k[5][i]
                            + D7 * ws.k[6][i]);
                }
                let t_old = t;
                t = t_new;
                x.copy_from_slice(&ws.x_new);
                let step = AcceptedStep {
                    t_old,
                    t,
                    x: &x,
                    dx: &ws.k[6],
                    cont: &ws.cont,
                };
                if observer(&step).is_break() {
                    return Ok((t, x));
                }
                let (k0, rest) = ws.k.split_at_mut(1);
                k0[0].copy_from_slice(&rest[5]);
                h_prev = Some(h_new);
                h = h_new;
            } else {
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
                rejected_last = true;
            }
        }
    }
    Ok((t, x))
}

fn stages<S: OdeSystem + ?Sized>(
    system: &S,
    t: f64,
    h: f64,
    x: &[f64],
    ws: &mut Workspace,
    eval_t: &impl Fn(f64) -> f64,
) {
    let n = x.len();
    let Workspace { k, tmp, x_new, .. } = ws;
    for i in 0..n {
        tmp[i] = x[i] + h * A21 * k[0][i];
    }
    system.rhs(eval_t(t + C2 * h), tmp, &mut k[1]);
    for i in 0..n {
        tmp[i] = x[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
    }
    system.rhs(eval_t(t + C3 * h), tmp, &mut k[2]);
    for i in 0..n {
        tmp[i] = x[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
    }
    system.rhs(eval_t(t + C4 * h), tmp, &mut k[3]);
    for i in 0..n {
        tmp[i] = x[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
    }
    system.rhs(eval_t(t + C5 * h), tmp, &mut k[4]);
    for i in 0..n {
        tmp[i] = x[i]
            + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
    }
    system.rhs(eval_t(t + h), tmp, &mut k[5]);
    for i in 0..n {
        x_new[i] = x[i]
            + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
    }
    system.rhs(eval_t(t + h), x_new, &mut k[6]);
}

/// Integrates `system` from `x0` over `t_span`.
///
/// The trajectory records every accepted step, or a uniform grid when
/// `config.sample_dt` is set. Its final time is exactly `t_span.1`.
pub fn integrate<S: OdeSystem + ?Sized>(
    system: &S,
    x0: &[f64],
    t_span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    let (t0, t1) = t_span;
    let mut traj = Trajectory::new(system.names());
    if x0.len() == system.dim() {
        traj.push(t0, x0);
    }
    let mut buf = vec![0.0; system.dim()];
    let mut next_sample = 1u64;
    drive(system, x0, t0, t1, config, false, |step| {
        match config.sample_dt {
            None => traj.push(step.t, step.x),
            Some(dt) => {
                loop {
                    let ts = t0 + next_sample as f64 * dt;
                    if ts > step.t || ts >= t1 - 1e-9 * dt {
                        break;
                    }
                    step.interpolate(ts, &mut buf);
                    traj.push(ts, &buf);
                    next_sample += 1;
                }
                if step.t >= t1 {
                    traj.push(step.t, step.x);
                }
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::FnSystem;

    fn decay() -> FnSystem<impl Fn(f64, &[f64], &mut [f64]) + Send + Sync> {
        FnSystem::new(&["x"], |_, x, dx| dx[0] = -x[0])
    }

    #[test]
    fn linear_decay_matches_exponential() {
        let cfg = IntegratorConfig::default();
        let traj = integrate(&decay(), &[1.0], (0.0, 1.0), &cfg).unwrap();
        let exact = libm::exp(-1.0);
        assert_eq!(traj.final_time(), 1.0);
        assert!((traj.final_state()[0] - exact).abs() <= 1e-8 * exact);
    }

    #[test]
    fn constant_solution_is_exact() {
        let sys = FnSystem::new(&["x"], |_, _, dx| dx[0] = 0.0);
        let traj = integrate(&sys, &[3.5], (0.0, 10.0), &IntegratorConfig::default()).unwrap();
        assert_eq!(traj.final_state()[0], 3.5);
        assert_eq!(traj.final_time(), 10.0);
    }

    #[test]
    fn linear_cascade_matches_closed_form() {
        // m' = 1 - m, X' = m - X from rest: m = 1 - e^-t, X = 1 - e^-t - t e^-t
        let sys = FnSystem::new(&["m", "x"], |_, x, dx| {
            dx[0] = 1.0 - x[0];
            dx[1] = x[0] - x[1];
        });
        let traj = integrate(&sys, &[0.0, 0.0], (0.0, 2.0), &IntegratorConfig::default()).unwrap();
        let e2 = libm::exp(-2.0);
        let end = traj.final_state();
        assert!((end[0] - (1.0 - e2)).abs() < 1e-6);
        assert!((end[1] - (1.0 - e2 - 2.0 * e2)).abs() < 1e-6);
    }

    #[test]
    fn dense_output_is_accurate() {
        let cfg = IntegratorConfig::default().with_sample_dt(0.01);
        let traj = integrate(&decay(), &[1.0], (0.0, 3.0), &cfg).unwrap();
        assert_eq!(traj.len(), 301);
        for (t, x) in traj.times().iter().zip(traj.states()) {
            assert!((x[0] - libm::exp(-t)).abs() < 1e-8, "t = {t}");
        }
        assert!(traj.times().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn step_input_is_resolved_at_breakpoint() {
        struct Step;
        impl OdeSystem for Step {
            fn dim(&self) -> usize {
                1
            }
            fn names(&self) -> &[&'static str] {
                &["x"]
            }
            fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
                dx[0] = if t >= 1.0 { 1.0 } else { 0.0 } - x[0];
            }
            fn breakpoints(&self) -> Vec<f64> {
                vec![1.0]
            }
        }
        let traj = integrate(&Step, &[0.0], (0.0, 3.0), &IntegratorConfig::default()).unwrap();
        assert!(traj.times().contains(&1.0));
        let exact = 1.0 - libm::exp(-2.0);
        assert!((traj.final_state()[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = IntegratorConfig::default();
        assert!(matches!(
            integrate(&decay(), &[1.0, 2.0], (0.0, 1.0), &cfg),
            Err(OdeError::DimensionMismatch { .. })
        ));
        assert!(integrate(&decay(), &[1.0], (1.0, 1.0), &cfg).is_err());
        assert!(integrate(&decay(), &[f64::NAN], (0.0, 1.0), &cfg).is_err());
        let bad = IntegratorConfig { rtol: 0.0, ..IntegratorConfig::default() };
        assert!(integrate(&decay(), &[1.0], (0.0, 1.0), &bad).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let sys = FnSystem::new(&["x"], |_, x, dx| dx[0] = x[0] * x[0]);
        let err = integrate(&sys, &[1.0], (0.0, 2.0), &IntegratorConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            OdeError::StepSizeUnderflow { .. } | OdeError::NonFiniteState { .. }
        ));
    }
}
