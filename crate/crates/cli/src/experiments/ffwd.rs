//! Feedforward scenarios: resource titration, copy-number ensembles and the
//! hidden integral of the endoribonuclease loop.

use biocircuit_core::analysis::{ensemble_run, hidden_integral_trace, rng, v_ref, EnsembleSummary};
use biocircuit_core::models::reference::ffwd_reference;
use biocircuit_core::models::{
    build_ffwd, ffwd_steady_state, titration_d1, DisturbanceInputs, FfwdParams, Model, ParamKeys, Signal,
};
use biocircuit_core::ode::{integrate, simulate_to_steady_state, IntegratorConfig};

use super::{err, table_from_columns, Outputs, Params, DEFAULT_SEED};
use crate::csv::CsvTable;
use crate::svg::{emit_svg, PlotStyle, Series};

fn reference_defaults() -> Vec<(&'static str, f64)> {
    let f = ffwd_reference();
    FfwdParams::KEYS
        .iter()
        .filter(|k| **k != "g")
        .map(|k| (*k, f.get(k).expect("key")))
        .collect()
}

fn base(p: &Params) -> FfwdParams {
    let mut f = ffwd_reference();
    for (k, v) in p.iter() {
        let _ = f.set(k, v);
    }
    f
}

/// Rate constant `g` that gives compensation strength `theta`.
pub fn g_for_theta(f: &FfwdParams, theta: f64) -> f64 {
    let unit = FfwdParams { g: 1.0, ..*f };
    theta / unit.theta()
}

pub fn titration_defaults() -> Vec<(&'static str, f64)> {
    let mut v = reference_defaults();
    v.extend([("theta_regulated", 100.0), ("k_a", 1.0)]);
    v
}

pub fn copy_number_defaults() -> Vec<(&'static str, f64)> {
    let mut v = reference_defaults();
    v.extend([("theta_regulated", 100.0), ("sigma", 0.5), ("n", 10_000.0), ("seed", DEFAULT_SEED as f64)]);
    v
}

pub fn hidden_defaults() -> Vec<(&'static str, f64)> {
    let mut v: Vec<(&'static str, f64)> = reference_defaults()
        .into_iter()
        .map(|(k, val)| if k == "delta" { (k, 0.0) } else { (k, val) })
        .collect();
    v.extend([("g", 1.0), ("d1_low", 0.5), ("d1_high", 2.0), ("sample_dt", 0.01), ("t_end", 10.0)]);
    v
}

const ACTIVATOR: [f64; 5] = [0.0, 1.0, 2.0, 4.0, 8.0];

fn simulated_x(f: FfwdParams, d1: f64, d2: f64) -> Result<f64, String> {
    let dist = DisturbanceInputs {
        d1: Signal::constant(d1),
        d2: Signal::constant(d2),
        ..Default::default()
    };
    let sys = build_ffwd(f, dist).map_err(err)?;
    let ss = simulate_to_steady_state(&sys, &vec![0.0; sys.output_index() + 1], &IntegratorConfig::default())
        .map_err(err)?;
    Ok(ss.equilibrium().map_err(err)?.point[sys.output_index()])
}

/// Sequestration of transcriptional resources by an activator: the regulated
/// output stays within 10% while the unregulated one falls by 80% or more.
pub fn titration_flat(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let f = base(p);
        let reg = FfwdParams {
            g: g_for_theta(&f, p.get("theta_regulated")),
            ..f
        };
        let unreg = FfwdParams { g: 0.0, ..f };
        let d1: Vec<f64> = ACTIVATOR.iter().map(|a| titration_d1(*a, p.get("k_a"))).collect();
        let mut xr = Vec::new();
        let mut xu = Vec::new();
        let mut worst = 0.0f64;
        for &d in &d1 {
            let (cr, cu) = (ffwd_steady_state(&reg, d, 1.0).x, ffwd_steady_state(&unreg, d, 1.0).x);
            let (sr, su) = (simulated_x(reg, d, 1.0)?, simulated_x(unreg, d, 1.0)?);
            worst = worst.max(((sr - cr) / cr).abs()).max(((su - cu) / cu).abs());
            xr.push(sr);
            xu.push(su);
        }
        out.table(
            "titration.csv",
            table_from_columns(&["a", "d1", "x_regulated", "x_unregulated"], &[&ACTIVATOR, &d1, &xr, &xu]),
        );
        let norm = |v: &[f64]| -> Vec<(f64, f64)> { ACTIVATOR.iter().zip(v).map(|(a, x)| (*a, x / v[0])).collect() };
        out.figure(
            "titration.svg",
            emit_svg(
                &[Series::new("regulated", norm(&xr)), Series::new("unregulated", norm(&xu))],
                &PlotStyle::new("Activator titration of transcriptional resources", "activator A", "X / X(A = 0)"),
            ),
        );
        let spread = (xr.iter().copied().fold(f64::MIN, f64::max) - xr.iter().copied().fold(f64::MAX, f64::min)) / xr[0];
        let drop = 1.0 - xu[4] / xu[0];
        Ok((
            spread <= 0.10 && drop >= 0.80 && worst <= 1e-6,
            format!(
                "regulated spread {:.2}% (limit 10%), unregulated drop at A = 8 {:.1}% (required >= 80%), simulated vs closed form {:.1e}",
                100.0 * spread,
                100.0 * drop,
                worst
            ),
        ))
    })();
    out.verdict("ffwd_titration_flat", outcome);
}

const ADAPT_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Without mRNA decay the steady output does not depend on `d` at all.
pub fn perfect_adaptation(p: &Params, out: &mut Outputs) {
    let f = FfwdParams { delta: 0.0, ..base(p) };
    let mut xs = Vec::new();
    for &d in &ADAPT_GRID {
        xs.push(ffwd_steady_state(&f, d, 1.0).x);
        xs.push(ffwd_steady_state(&f, 1.0, d).x);
    }
    let exact = xs.iter().all(|x| *x == xs[0]);
    let target = f.beta * f.alpha / (f.gamma * f.theta());
    let sim: Result<Vec<f64>, String> = ADAPT_GRID.iter().map(|d| simulated_x(f, *d, 1.0)).collect();
    let outcome = sim.map(|sim| {
        let worst = sim.iter().map(|x| ((x - target) / target).abs()).fold(0.0, f64::max);
        (
            exact && xs[0] == target && worst <= 1e-6,
            format!(
                "closed-form X identical ({}) over d1, d2 in {{0.25, 0.5, 1, 2, 4}} and equal to beta*alpha/(gamma*theta) = {}; simulated spread {:.1e}",
                if exact { "exact" } else { "NOT exact" },
                xs[0],
                worst
            ),
        )
    });
    out.verdict("ffwd_perfect_adaptation", outcome);
}

/// Normalised spread over `d in [0.5, 2]` falls strictly with theta and is
/// at most 2% at theta = 100.
pub fn theta_attenuation(p: &Params, out: &mut Outputs) {
    let f = FfwdParams { delta: 1.0, ..base(p) };
    let grid: Vec<f64> = (0..=60).map(|i| 0.5 * 4f64.powf(i as f64 / 60.0)).collect();
    let thetas = [1.0, 10.0, 100.0];
    let mut spreads = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![grid.clone()];
    for &theta in &thetas {
        let ft = FfwdParams {
            g: g_for_theta(&f, theta),
            ..f
        };
        let xs: Vec<f64> = grid.iter().map(|d| ffwd_steady_state(&ft, *d, 1.0).x).collect();
        let x1 = ffwd_steady_state(&ft, 1.0, 1.0).x;
        let max = xs.iter().copied().fold(f64::MIN, f64::max);
        let min = xs.iter().copied().fold(f64::MAX, f64::min);
        spreads.push((max - min) / x1);
        cols.push(xs.iter().map(|x| x / x1).collect());
    }
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    out.table("attenuation.csv", table_from_columns(&["d", "x_theta1", "x_theta10", "x_theta100"], &refs));
    out.figure(
        "attenuation.svg",
        emit_svg(
            &thetas
                .iter()
                .enumerate()
                .map(|(i, th)| Series::new(format!("theta = {th}"), grid.iter().copied().zip(cols[i + 1].iter().copied()).collect()))
                .collect::<Vec<_>>(),
            &PlotStyle::new("Disturbance attenuation by the feedforward loop", "d", "X / X(d = 1)"),
        ),
    );
    let decreasing = spreads.windows(2).all(|w| w[1] < w[0]);
    out.verdict(
        "ffwd_theta_attenuation",
        Ok((
            decreasing && spreads[2] <= 0.02,
            format!(
                "normalised spread over d in [0.5, 2]: {:.4}, {:.4}, {:.4} for theta = 1, 10, 100 (strictly decreasing, last <= 0.02)",
                spreads[0], spreads[1], spreads[2]
            ),
        )),
    );
}

pub fn run_titration(p: &Params, out: &mut Outputs) {
    titration_flat(p, out);
    perfect_adaptation(p, out);
    theta_attenuation(p, out);
}

pub(crate) fn histogram_table(s: &EnsembleSummary) -> CsvTable {
    let h = &s.histogram;
    let lo: Vec<f64> = h.edges[..h.edges.len() - 1].to_vec();
    let hi: Vec<f64> = h.edges[1..].to_vec();
    let counts: Vec<f64> = h.counts.iter().map(|c| *c as f64).collect();
    table_from_columns(&["bin_lo", "bin_hi", "count"], &[&lo, &hi, &counts])
}

pub(crate) fn histogram_series(name: &str, s: &EnsembleSummary) -> Series {
    let h = &s.histogram;
    let pts = h
        .counts
        .iter()
        .enumerate()
        .map(|(i, c)| (0.5 * (h.edges[i] + h.edges[i + 1]) / s.mean, *c as f64))
        .collect();
    Series::new(name, pts)
}

/// Log-normal copy numbers: the regulated output's CV is at most a tenth of
/// the unregulated one, and the ensemble is bit-reproducible.
pub fn dosage_cv(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let f = base(p);
        let (sigma, n, seed) = (p.get("sigma"), p.usize("n"), p.seed());
        let cfg = IntegratorConfig::default();
        let model = |g| Model::Ffwd {
            params: FfwdParams { g, ..f },
            inputs: DisturbanceInputs::default(),
        };
        let regulated = model(g_for_theta(&f, p.get("theta_regulated")));
        let reg = ensemble_run(&regulated, "d", sigma, n, seed, &cfg).map_err(err)?;
        let unreg = ensemble_run(&model(0.0), "d", sigma, n, seed, &cfg).map_err(err)?;
        let again = ensemble_run(&regulated, "d", sigma, n, seed, &cfg).map_err(err)?;
        let reproducible = reg.outputs.iter().zip(&again.outputs).all(|(a, b)| a.to_bits() == b.to_bits());

        let idx: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let d: Vec<f64> = (0..n).map(|i| (sigma * rng::normal(seed, i as u64)).exp()).collect();
        out.table("samples.csv", table_from_columns(&["index", "d", "x_regulated", "x_unregulated"], &[&idx, &d, &reg.outputs, &unreg.outputs]));
        out.table("histogram_regulated.csv", histogram_table(&reg));
        out.table("histogram_unregulated.csv", histogram_table(&unreg));
        out.figure(
            "copy_number.svg",
            emit_svg(
                &[histogram_series("regulated", &reg), histogram_series("unregulated", &unreg)],
                &PlotStyle::new("Output distribution over copy number", "X / mean", "count"),
            ),
        );
        Ok((
            reproducible && reg.cv <= 0.1 * unreg.cv,
            format!(
                "CV regulated {:.5}, unregulated {:.5}, ratio {:.4} (limit 0.1); n = {n}, seed = {seed}, rerun {}",
                reg.cv,
                unreg.cv,
                reg.cv / unreg.cv,
                if reproducible { "bit-identical" } else { "DIFFERS" }
            ),
        ))
    })();
    out.verdict("ffwd_dosage_cv", outcome);
}

pub fn run_copy_number(p: &Params, out: &mut Outputs) {
    dosage_cv(p, out);
}

/// Memory variable along ERN trajectories: its rate matches the derived
/// integral action and the steady mRNA sits at `v_ref` for every `d1`.
pub fn hidden_integral(p: &Params, out: &mut Outputs) {
    let outcome = (|| {
        let f = base(p);
        let dt = p.get("sample_dt");
        let mut messages = Vec::new();
        let mut ok = true;
        let mut series = Vec::new();
        let mut refs = Vec::new();
        for (label, d1) in [("low", p.get("d1_low")), ("high", p.get("d1_high"))] {
            let dist = DisturbanceInputs {
                d1: Signal::constant(d1),
                ..Default::default()
            };
            let sys = build_ffwd(f, dist).map_err(err)?;
            let cfg = IntegratorConfig::default().with_tolerances(1e-12, 1e-14).with_sample_dt(dt);
            let traj = integrate(&sys, &[0.0; 4], (0.0, p.get("t_end")), &cfg).map_err(err)?;
            let trace = hidden_integral_trace(&traj, &f, d1).map_err(err)?;
            let ss = simulate_to_steady_state(&sys, &[0.0; 4], &IntegratorConfig::default()).map_err(err)?;
            let m_end = ss.equilibrium().map_err(err)?.point[2];
            let budget = 1e-3 * trace.max_abs_rate();
            let pass = (m_end - trace.v_ref).abs() <= 1e-6 && trace.max_residual() <= budget;
            ok &= pass;
            refs.push(trace.v_ref);
            messages.push(format!(
                "d1 = {d1}: |m - v_ref| = {:.1e}, max residual {:.2e} (budget {:.2e})",
                (m_end - trace.v_ref).abs(),
                trace.max_residual(),
                budget
            ));
            let n = trace.times.len();
            let t_in = &trace.times[1..n - 1];
            let z_in = &trace.z[1..n - 1];
            out.table(
                &format!("hidden_integral_{label}.csv"),
                table_from_columns(&["t", "z", "dz_dt", "residual"], &[t_in, z_in, &trace.dz_dt, &trace.residual]),
            );
            series.push(Series::new(format!("z, d1 = {d1}"), t_in.iter().copied().zip(z_in.iter().copied()).collect()));
        }
        ok &= refs[0] == refs[1] && refs[0] == v_ref(&f);
        out.figure(
            "hidden_integral.svg",
            emit_svg(&series, &PlotStyle::new("Memory variable z = E/q - m/p", "time", "z")),
        );
        Ok((ok, format!("v_ref = {}; {}", refs[0], messages.join("; "))))
    })();
    out.verdict("ffwd_hidden_integral", outcome);
}

pub fn run_hidden(p: &Params, out: &mut Outputs) {
    hidden_integral(p, out);
}
