//! `qic_step`: epsilon scaling of the steady error and rejection of a
//! transcriptional step, closed loop against a level-matched open loop.

use biocircuit_core::models::reference::qic_reference;
use biocircuit_core::models::{
    build_qic, calibrate_open_loop, DisturbanceInputs, Loop, ParamKeys, PlantParams, QicParams, Signal,
};
use biocircuit_core::ode::{integrate, simulate_to_steady_state, IntegratorConfig};

use super::{err, table_from_columns, Outputs, Params};
use crate::svg::{emit_svg, PlotStyle, Series};

pub fn defaults() -> Vec<(&'static str, f64)> {
    let (q, p) = qic_reference();
    let mut v: Vec<(&'static str, f64)> = Vec::new();
    for k in QicParams::KEYS {
        if !matches!(*k, "k1" | "k2" | "w_open") {
            v.push((k, q.get(k).expect("key")));
        }
    }
    for k in PlantParams::KEYS {
        v.push((k, p.get(k).expect("key")));
    }
    v.extend([
        ("set_gain", q.k1 / q.k2),
        ("epsilon", q.epsilon()),
        ("d1_after", 0.5),
        ("t_step", 20.0),
        ("t_end", 40.0),
        ("sample_dt", 0.02),
    ]);
    v
}

/// Controller and plant for a given epsilon (`k2 = gamma_u / epsilon`,
/// `k1 = set_gain * k2`).
pub fn params_at(p: &Params, epsilon: f64) -> (QicParams, PlantParams) {
    let (mut q, mut plant) = qic_reference();
    for (k, v) in p.iter() {
        let _ = q.set(k, v);
        let _ = plant.set(k, v);
    }
    q.k2 = q.gamma_u / epsilon;
    q.k1 = p.get("set_gain") * q.k2;
    (q, plant)
}

fn steady_output(q: QicParams, plant: PlantParams, inputs: DisturbanceInputs, mode: Loop) -> Result<f64, String> {
    let sys = build_qic(q, plant, inputs, mode).map_err(err)?;
    let ss = simulate_to_steady_state(&sys, &[0.0; 3], &IntegratorConfig::default()).map_err(err)?;
    Ok(ss.equilibrium().map_err(err)?.point[1])
}

/// Steady error `|y - (k1/k2) v|` should fall 5-20x per decade of epsilon.
pub fn eps_scaling(p: &Params, out: &mut Outputs) {
    let eps = [0.1, 0.01, 0.001];
    let outcome = (|| {
        let mut ys = Vec::new();
        let mut errors = Vec::new();
        for &e in &eps {
            let (q, plant) = params_at(p, e);
            let y = steady_output(q, plant, DisturbanceInputs::default(), Loop::Closed)?;
            ys.push(y);
            errors.push((y - q.set_point()).abs());
        }
        out.table("eps_scaling.csv", table_from_columns(&["epsilon", "y", "error"], &[&eps, &ys, &errors]));
        let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
        let ok = ratios.iter().all(|r| (5.0..=20.0).contains(r));
        Ok((
            ok,
            format!(
                "error ratios per decade of epsilon {:.3}, {:.3} (required within [5, 20]); errors {:.3e}, {:.3e}, {:.3e}",
                ratios[0], ratios[1], errors[0], errors[1], errors[2]
            ),
        ))
    })();
    out.verdict("qic_eps_scaling", outcome);
}

/// Transcription halved at `t_step`: closed loop holds within `5 epsilon`,
/// the open loop drops by at least 25%.
pub fn rejection(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let epsilon = p.get("epsilon");
        let (q, plant) = params_at(p, epsilon);
        let cfg = IntegratorConfig::default();
        let w_open = calibrate_open_loop(q, plant, DisturbanceInputs::default(), &cfg).map_err(err)?;
        let q = QicParams { w_open, ..q };
        let stepped = DisturbanceInputs {
            d1: Signal::step(1.0, p.get("t_step"), p.get("d1_after")),
            ..Default::default()
        };
        let nominal_closed = steady_output(q, plant, DisturbanceInputs::default(), Loop::Closed)?;
        let nominal_open = steady_output(q, plant, DisturbanceInputs::default(), Loop::Open)?;
        let post_closed = steady_output(q, plant, stepped.clone(), Loop::Closed)?;
        let post_open = steady_output(q, plant, stepped.clone(), Loop::Open)?;

        let sample = cfg.clone().with_sample_dt(p.get("sample_dt"));
        let t_end = p.get("t_end");
        let mut cols: Vec<Vec<f64>> = Vec::new();
        let mut zero_order_flags = Vec::new();
        for mode in [Loop::Closed, Loop::Open] {
            let sys = build_qic(q, plant, stepped.clone(), mode).map_err(err)?;
            let traj = integrate(&sys, &[0.0; 3], (0.0, t_end), &sample).map_err(err)?;
            let report = sys.zero_order_report(&traj);
            zero_order_flags.push((mode, report.violation_fraction, report.violated));
            if cols.is_empty() {
                cols.push(traj.times().to_vec());
            }
            cols.push(traj.column(1));
            cols.push(traj.column(2));
        }
        for (mode, frac, violated) in zero_order_flags {
            if violated {
                out.warnings.push(format!(
                    "ZeroOrderViolated: {mode:?} loop has unsaturated enzymes at {:.1}% of samples",
                    100.0 * frac
                ));
            }
        }
        let t = &cols[0];
        out.figure(
            "step_response.svg",
            emit_svg(
                &[
                    Series::new("y closed", t.iter().copied().zip(cols[1].iter().copied()).collect()),
                    Series::new("y open", t.iter().copied().zip(cols[3].iter().copied()).collect()),
                ],
                &PlotStyle::new("Transcription step: closed vs open loop", "time", "output y"),
            ),
        );
        out.table(
            "step_response.csv",
            table_from_columns(&["t", "y_closed", "u_closed", "y_open", "u_open"], &[&cols[0], &cols[1], &cols[2], &cols[3], &cols[4]]),
        );

        let dev_closed = (post_closed - nominal_closed).abs() / nominal_closed;
        let dev_open = (post_open - nominal_open).abs() / nominal_open;
        let bound = 5.0 * epsilon;
        let matched = (nominal_closed - nominal_open).abs() <= 1e-6 * nominal_closed;
        let ok = matched && dev_closed <= bound && dev_open >= 0.25;
        Ok((
            ok,
            format!(
                "closed-loop deviation {:.3}% (limit {:.3}%), open-loop deviation {:.2}% (required >= 25%), nominal levels {:.6} / {:.6}",
                100.0 * dev_closed,
                100.0 * bound,
                100.0 * dev_open,
                nominal_closed,
                nominal_open
            ),
        ))
    })();
    out.verdict("qic_rejection", outcome);
}

pub fn run(p: &Params, out: &mut Outputs) {
    eps_scaling(p, out);
    rejection(p, out);
}
