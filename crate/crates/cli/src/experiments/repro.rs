//! Reprogramming scenarios: the coupled controller against constant
//! overexpression, and copy-number compensation of the construct.

use biocircuit_core::analysis::{ensemble_run, rng};
use biocircuit_core::models::reference::{grn_tristable, repro_reference};
use biocircuit_core::models::{
    build_grn, build_repro, repro_steady_state, GrnInput, GrnParams, Model, ParamKeys, ReproMode, ReproParams,
    Signal,
};
use biocircuit_core::ode::{find_equilibria, integrate, simulate_to_steady_state, IntegratorConfig, Trajectory};

use super::ffwd::{histogram_series, histogram_table};
use super::{err, table_from_columns, Outputs, Params, DEFAULT_SEED};
use crate::svg::{emit_svg, PlotStyle, Series};

fn construct_defaults() -> Vec<(&'static str, f64)> {
    let r = repro_reference();
    ReproParams::KEYS.iter().map(|k| (*k, r.get(k).expect("key"))).collect()
}

fn construct(p: &Params) -> ReproParams {
    let mut r = repro_reference();
    for (k, v) in p.iter() {
        let _ = r.set(k, v);
    }
    r
}

pub fn trajectories_defaults() -> Vec<(&'static str, f64)> {
    let mut v = construct_defaults();
    v.extend([("overexpression", 20.0), ("t_off", 30.0), ("t_end", 130.0), ("sample_dt", 0.1)]);
    v
}

pub fn dosage_defaults() -> Vec<(&'static str, f64)> {
    let mut v: Vec<(&'static str, f64)> = construct_defaults()
        .into_iter()
        .map(|(k, val)| match k {
            "c" | "delta_bar" => (k, 1.0),
            _ => (k, val),
        })
        .collect();
    v.extend([
        ("n", 2000.0),
        ("sigma", 0.5),
        ("seed", DEFAULT_SEED as f64),
        ("h_i", 5.0),
        ("draws", 50.0),
        ("h_max", 10.0),
        ("period", 10.0),
        ("t_end", 100.0),
    ]);
    v
}

/// Stable states of the uncontrolled network at zero input, ordered by x_O.
fn network_states(g: &GrnParams) -> Result<Vec<Vec<f64>>, String> {
    let sys = build_grn(*g, GrnInput::Open { u_i: 0.0 }).map_err(err)?;
    let [a, b] = g.invariant_box(0.0);
    let eqs = find_equilibria(&sys, &[a, b], 400).map_err(err)?;
    Ok(eqs.into_iter().filter(|e| e.stability.is_stable()).map(|e| e.point).collect())
}

const LABELS: [&str; 3] = ["low/low", "intermediate-x_O/high-x_N", "high/high"];

/// Index into `states` of the stable state within 1e-3 (relative) of `x`.
fn classify(states: &[Vec<f64>], x: &[f64]) -> Option<usize> {
    states.iter().position(|s| s.iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-3 * a.abs().max(1.0)))
}

/// Basin of the network state `x` at zero input, found by relaxing the
/// network alone.
fn basin(g: &GrnParams, states: &[Vec<f64>], x: &[f64]) -> Result<Option<usize>, String> {
    let sys = build_grn(*g, GrnInput::Open { u_i: 0.0 }).map_err(err)?;
    let ss = simulate_to_steady_state(&sys, x, &IntegratorConfig::default()).map_err(err)?;
    Ok(classify(states, &ss.equilibrium().map_err(err)?.point))
}

fn label(i: Option<usize>) -> &'static str {
    i.map_or("unclassified", |i| LABELS.get(i).copied().unwrap_or("unclassified"))
}

fn arm(r: ReproParams, g: GrnParams, overexpression: f64, x0: &[f64], p: &Params) -> Result<Trajectory, String> {
    let sys = build_repro(r, ReproMode::Coupled { grn: g, overexpression }, Some(p.get("t_off"))).map_err(err)?;
    let cfg = IntegratorConfig::default().with_sample_dt(p.get("sample_dt"));
    integrate(&sys, x0, (0.0, p.get("t_end")), &cfg).map_err(err)
}

fn trajectory_table(t: &Trajectory) -> crate::csv::CsvTable {
    let cols: Vec<Vec<f64>> = (0..t.dim()).map(|j| t.column(j)).collect();
    table_from_columns(&["t", "m_i", "mu", "x_o", "x_n"], &[t.times(), &cols[0], &cols[1], &cols[2], &cols[3]])
}

/// From the low/low state the construct drives x_O to its set point and the
/// network is left in the pluripotent basin once it is removed; constant
/// overexpression without the construct overshoots to high/high.
pub fn reprogramming(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let r = construct(p);
        let g = grn_tristable();
        let states = network_states(&g)?;
        if states.len() != 3 {
            return Err(format!("expected 3 stable network states at zero input, found {}", states.len()));
        }
        let low = &states[0];
        let x0 = [g.gamma * low[0] / r.kappa, 0.0, low[0], low[1]];
        let controlled = arm(r, g, 0.0, &x0, p)?;
        let control = arm(ReproParams { gain: 0.0, ..r }, g, p.get("overexpression"), &x0, p)?;

        let t_off = p.get("t_off");
        let at_off = |t: &Trajectory| -> Result<(Vec<f64>, Option<usize>), String> {
            let s = t.sample(t_off);
            let b = basin(&g, &states, &s[2..])?;
            Ok((s, b))
        };
        let (c_off, c_basin) = at_off(&controlled)?;
        let (o_off, o_basin) = at_off(&control)?;
        let c_end = classify(&states, &controlled.final_state()[2..]);
        let o_end = classify(&states, &control.final_state()[2..]);

        out.table("trajectories.csv", trajectory_table(&controlled));
        out.table("control.csv", trajectory_table(&control));
        let pts = |t: &Trajectory, j: usize| t.times().iter().copied().zip(t.column(j)).collect::<Vec<_>>();
        out.figure(
            "trajectories.svg",
            emit_svg(
                &[
                    Series::new("x_O controlled", pts(&controlled, 2)),
                    Series::new("x_N controlled", pts(&controlled, 3)),
                    Series::new("x_O overexpression only", pts(&control, 2)).dashed(),
                    Series::new("x_N overexpression only", pts(&control, 3)).dashed(),
                ],
                &PlotStyle::new("Reprogramming from the low/low state", "time", "concentration"),
            ),
        );
        let f = |v: &[f64]| format!("({:.4}, {:.4})", v[0], v[1]);
        Ok((
            c_end == Some(1) && o_end == Some(2),
            format!(
                "controlled: x at t_off = {} {} (basin {}), final {} {}; G = 0 with overexpression {}: x at t_off = {} (basin {}), final {} {}",
                t_off,
                f(&c_off[2..]),
                label(c_basin),
                f(&controlled.final_state()[2..]),
                label(c_end),
                p.get("overexpression"),
                f(&o_off[2..]),
                label(o_basin),
                f(&control.final_state()[2..]),
                label(o_end),
            ),
        ))
    })();
    out.verdict("repro_reprogramming", outcome);
}

pub fn run_trajectories(p: &Params, out: &mut Outputs) {
    reprogramming(p, out);
}

/// Random construct parameters for the closed-form comparison. Rates stay
/// within [0.5, 2] and the gain in [1, 1000] so each run stays cheap.
fn draw(seed: u64, i: u64) -> (ReproParams, f64) {
    let mut k = i * 16;
    let mut u = |lo: f64, hi: f64| {
        k += 1;
        lo + (hi - lo) * rng::uniform(seed, k)
    };
    let r = ReproParams {
        gain: 10f64.powf(u(0.0, 3.0)),
        alpha: u(0.5, 2.0),
        beta: u(0.5, 2.0),
        c: u(0.5, 2.0),
        delta: u(0.5, 2.0),
        delta_bar: u(0.5, 2.0),
        kappa: u(0.5, 2.0),
        gamma: u(0.5, 2.0),
        d: u(0.5, 2.0),
    };
    (r, u(0.0, 10.0))
}

/// Simulated equilibria agree with the closed form for m_i and x_i.
pub fn closed_form(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let seed = p.seed();
        let draws = p.usize("draws");
        let mut worst = 0.0f64;
        for i in 0..draws as u64 {
            let (r, h) = draw(seed, i);
            let sys = build_repro(r, ReproMode::Standalone { h: Signal::constant(h) }, None).map_err(err)?;
            let ss = simulate_to_steady_state(&sys, &[0.0; 3], &IntegratorConfig::default()).map_err(err)?;
            let eq = ss.equilibrium().map_err(err)?;
            let cf = repro_steady_state(&r, h);
            for (sim, exact) in [(eq.point[0], cf.m), (eq.point[2], cf.x)] {
                worst = worst.max((sim - exact).abs() / exact.abs().max(1.0));
            }
        }
        Ok((
            worst <= 1e-6,
            format!("{draws} random draws, largest deviation of simulated m_i, x_i from the closed form {worst:.2e} (limit 1e-6)"),
        ))
    })();
    out.verdict("repro_closed_form", outcome);
}

/// Largest |x_i - x_limit| over the final period under a sinusoidal
/// endogenous input spanning [0, h_max].
fn terminal_offset(r: ReproParams, p: &Params) -> Result<(f64, Trajectory), String> {
    let h_max = p.get("h_max");
    let period = p.get("period");
    let h = Signal::Sinusoid {
        offset: 0.5 * h_max,
        amplitude: 0.5 * h_max,
        period,
    };
    let sys = build_repro(r, ReproMode::Standalone { h }, None).map_err(err)?;
    let cfg = IntegratorConfig::default().with_sample_dt(period / 200.0);
    let t_end = p.get("t_end");
    let traj = integrate(&sys, &[0.0; 3], (0.0, t_end), &cfg).map_err(err)?;
    let x_limit = r.x_limit();
    let offset = traj
        .times()
        .iter()
        .zip(traj.column(2))
        .filter(|(t, _)| **t >= t_end - period)
        .map(|(_, x)| (x - x_limit).abs())
        .fold(0.0, f64::max);
    Ok((offset, traj))
}

/// The offset from the large-gain limit falls at least 8-fold from G = 100
/// to G = 1000.
pub fn g_scaling(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let r = construct(p);
        let gains = [10.0, 100.0, 1000.0];
        let mut offsets = Vec::new();
        let mut bounds = Vec::new();
        let mut series = Vec::new();
        for &gain in &gains {
            let rg = ReproParams { gain, ..r };
            let (off, traj) = terminal_offset(rg, p)?;
            offsets.push(off);
            bounds.push(rg.x_residual_bound(p.get("h_max")));
            series.push(Series::new(
                format!("x_i, G = {gain}"),
                traj.times().iter().copied().zip(traj.column(2)).collect(),
            ));
        }
        out.table("g_scaling.csv", table_from_columns(&["gain", "offset", "bound"], &[&gains, &offsets, &bounds]));
        out.figure(
            "g_scaling.svg",
            emit_svg(&series, &PlotStyle::new("Construct output under a time-varying endogenous input", "time", "x_i")),
        );
        let ratio = offsets[1] / offsets[2];
        Ok((
            ratio >= 8.0,
            format!(
                "terminal offset from x_limit = {}: G = 10 {:.3e}, G = 100 {:.3e}, G = 1000 {:.3e}; ratio 100 -> 1000 = {ratio:.2} (required >= 8)",
                r.x_limit(),
                offsets[0],
                offsets[1],
                offsets[2]
            ),
        ))
    })();
    out.verdict("repro_g_scaling", outcome);
}

/// Copy-number spread of x_i narrows as the gain grows.
pub fn histogram_narrowing(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let r = construct(p);
        let cfg = IntegratorConfig::default();
        let gains = [10.0, 100.0, 1000.0];
        let mut cvs = Vec::new();
        let mut series = Vec::new();
        let mut sample_cols: Vec<Vec<f64>> = Vec::new();
        for &gain in &gains {
            let family = Model::Repro {
                params: ReproParams { gain, ..r },
                mode: ReproMode::Standalone {
                    h: Signal::constant(p.get("h_i")),
                },
                t_off: None,
            };
            let s = ensemble_run(&family, "d", p.get("sigma"), p.usize("n"), p.seed(), &cfg).map_err(err)?;
            out.table(&format!("histogram_g{gain}.csv"), histogram_table(&s));
            series.push(histogram_series(&format!("G = {gain}"), &s));
            cvs.push(s.cv);
            sample_cols.push(s.outputs);
        }
        let n = sample_cols[0].len();
        let d: Vec<f64> = (0..n as u64).map(|i| r.d * (p.get("sigma") * rng::normal(p.seed(), i)).exp()).collect();
        out.table(
            "samples.csv",
            table_from_columns(&["d", "x_g10", "x_g100", "x_g1000"], &[&d, &sample_cols[0], &sample_cols[1], &sample_cols[2]]),
        );
        out.figure(
            "dosage_histograms.svg",
            emit_svg(&series, &PlotStyle::new("x_i across copy numbers", "x_i / mean", "cells")),
        );
        Ok((
            cvs[0] > cvs[1] && cvs[1] > cvs[2] && cvs[2] <= 0.02,
            format!(
                "CV of x_i: G = 10 {:.4}, G = 100 {:.4}, G = 1000 {:.4} (must fall, and be <= 0.02 at G = 1000)",
                cvs[0], cvs[1], cvs[2]
            ),
        ))
    })();
    out.verdict("repro_histogram_narrowing", outcome);
}

pub fn run_dosage(p: &Params, out: &mut Outputs) {
    closed_form(p, out);
    g_scaling(p, out);
    histogram_narrowing(p, out);
}
