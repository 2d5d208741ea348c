//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use biocircuit_core::analysis::{bifurcation_sweep, ensemble_run, BifurcationDiagram, EnsembleSummary};
use biocircuit_core::models::ModelFamily;
use biocircuit_core::ode::{find_equilibria, integrate};
use biocircuit_core::OdeSystem;
use clap::{Parser, Subcommand};

use crate::config::{parse_config_bytes, parse_number, RunConfig};
use crate::csv::CsvTable;
use crate::experiments::{list_scenarios, run_scenario, Scenario, ScenarioId, DEFAULT_SEED};
use crate::svg::{emit_svg, PlotStyle, Series};

/// Exit code for success and for scenarios whose verdicts all pass.
pub const EXIT_OK: i32 = 0;
/// A scenario verdict failed, or a computation could not be completed.
pub const EXIT_FAILED: i32 = 1;
/// Bad arguments, unreadable or invalid configuration.
pub const EXIT_USAGE: i32 = 2;

pub const SEED_ENV: &str = "BIOCIRCUIT_SEED";

#[derive(Debug, Parser)]
#[command(name = "biocircuit", version, about = "Simulate and analyse biomolecular controller models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the configured model and write trajectory.csv and trajectory.svg.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print all equilibria found in the search box with their stability.
    Equilibria {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep one parameter and track equilibria.
    Bifurcate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log-normal ensemble over one parameter.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        param: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Named scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Debug, Subcommand)]
enum ScenarioAction {
    /// Run a scenario and write its report directory.
    Run {
        id: String,
        /// Parameter override, `key=value`; may be repeated.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Report directory; defaults to `reports/<id>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One line per scenario.
    List,
}

enum Failure {
    Usage(String),
    Failed(String),
}

type Outcome = Result<i32, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn failed<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Failed(e.to_string())
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprint!("{e}");
                return EXIT_USAGE;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("error: invalid arguments");
            eprintln!("{line}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAILED
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Simulate { config, out } => simulate(&config, out),
        Command::Equilibria { config } => equilibria(&config),
        Command::Bifurcate {
            config,
            param,
            from,
            to,
            points,
            out,
        } => bifurcate(&config, param, from, to, points, out),
        Command::Ensemble {
            config,
            n,
            seed,
            sigma,
            param,
            out,
        } => ensemble(&config, n, seed, sigma, param, out),
        Command::Scenario { action } => match action {
            ScenarioAction::List => {
                for line in list_scenarios() {
                    println!("{line}");
                }
                Ok(EXIT_OK)
            }
            ScenarioAction::Run { id, set, out } => scenario(&id, &set, out),
        },
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let bytes = std::fs::read(path).map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
    parse_config_bytes(&bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Seed from `BIOCIRCUIT_SEED`, if set.
fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| usage(format!("{SEED_ENV}=`{s}` is not a non-negative integer"))),
        Err(_) => Ok(None),
    }
}

fn output_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> Option<PathBuf> {
    flag.or_else(|| cfg.output_dir.clone())
}

fn write(dir: &Path, name: &str, bytes: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| failed(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| failed(format!("{}: {e}", path.display())))
}

fn simulate(path: &Path, out: Option<PathBuf>) -> Outcome {
    let cfg = load(path)?;
    let dir = output_dir(out, &cfg).ok_or_else(|| usage("--out is required unless [output] dir is set"))?;
    let system = cfg.model.build_system().map_err(usage)?;
    let traj = integrate(&system, &cfg.initial_state, (0.0, cfg.t_end), &cfg.integrator).map_err(failed)?;
    let mut columns = vec!["t"];
    columns.extend(traj.names().iter().copied());
    let mut table = CsvTable::new(columns).map_err(failed)?;
    for (t, x) in traj.times().iter().zip(traj.states()) {
        let mut row = vec![*t];
        row.extend_from_slice(x);
        table.push(row).map_err(failed)?;
    }
    let series: Vec<Series> = (0..traj.dim())
        .map(|j| Series::new(traj.names()[j], traj.times().iter().copied().zip(traj.column(j)).collect()))
        .collect();
    let svg = emit_svg(&series, &PlotStyle::new(cfg.model.family_name(), "time", "concentration")).map_err(failed)?;
    write(&dir, "trajectory.csv", &table.to_csv())?;
    write(&dir, "trajectory.svg", &svg)?;
    println!("{} samples to t = {} written to {}", traj.len(), traj.final_time(), dir.display());
    Ok(EXIT_OK)
}

fn search_box(cfg: &RunConfig) -> Vec<(f64, f64)> {
    cfg.sweep.bounds.clone().unwrap_or_else(|| cfg.model.search_box())
}

fn equilibria(path: &Path) -> Outcome {
    let cfg = load(path)?;
    let system = cfg.model.build_system().map_err(usage)?;
    let bounds = search_box(&cfg);
    if bounds.len() != system.dim() {
        return Err(usage(format!("[sweep] box has {} ranges, model has {} states", bounds.len(), system.dim())));
    }
    let n_starts = cfg.sweep.n_starts.unwrap_or(64);
    let eqs = find_equilibria(&system, &bounds, n_starts).map_err(failed)?;
    let mut columns: Vec<&str> = system.names().to_vec();
    columns.extend(["residual", "stable"]);
    let mut table = CsvTable::new(columns).map_err(failed)?;
    for e in &eqs {
        let mut row = e.point.clone();
        row.push(e.residual);
        row.push(if e.stability.is_stable() { 1.0 } else { 0.0 });
        table.push(row).map_err(failed)?;
    }
    print!("{}", table.to_csv());
    Ok(EXIT_OK)
}

fn bifurcation_outputs(d: &BifurcationDiagram, names: &[&'static str]) -> Result<(CsvTable, String), Failure> {
    let mut columns = vec![d.param_name.as_str(), "branch", "stable"];
    columns.extend(names.iter().copied());
    let mut table = CsvTable::new(columns).map_err(failed)?;
    let mut series = Vec::new();
    for (bi, b) in d.branches.iter().enumerate() {
        let mut pts = Vec::new();
        for q in &b.points {
            let stable = q.stability.is_stable();
            let mut row = vec![d.grid[q.grid_index], bi as f64, if stable { 1.0 } else { 0.0 }];
            row.extend_from_slice(&q.point);
            table.push(row).map_err(failed)?;
            pts.push((d.grid[q.grid_index], q.point[0]));
        }
        let all_stable = b.points.iter().all(|q| q.stability.is_stable());
        let s = Series::new(format!("branch {bi}"), pts);
        series.push(if all_stable { s } else { s.dashed() });
    }
    let svg = emit_svg(&series, &PlotStyle::new("Equilibrium branches", &d.param_name, names[0]))
        .unwrap_or_else(|_| emit_svg(&[Series::new("none", vec![(0.0, 0.0)])], &PlotStyle::new("No equilibria", &d.param_name, names[0])).unwrap_or_default());
    Ok((table, svg))
}

fn bifurcate(
    path: &Path,
    param: Option<String>,
    from: Option<f64>,
    to: Option<f64>,
    points: Option<usize>,
    out: Option<PathBuf>,
) -> Outcome {
    let cfg = load(path)?;
    let param = param.or(cfg.sweep.param.clone()).ok_or_else(|| usage("--param is required unless [sweep] param is set"))?;
    let from = from.or(cfg.sweep.from).ok_or_else(|| usage("--from is required unless [sweep] from is set"))?;
    let to = to.or(cfg.sweep.to).ok_or_else(|| usage("--to is required unless [sweep] to is set"))?;
    let points = points.or(cfg.sweep.points).ok_or_else(|| usage("--points is required unless [sweep] points is set"))?;
    if points < 2 || !(from.is_finite() && to.is_finite()) || from == to {
        return Err(usage("--points must be at least 2 and --from, --to distinct finite numbers"));
    }
    if cfg.model.parameter(&param).is_none() {
        return Err(usage(format!("--param: family {} has no parameter `{param}`", cfg.model.family_name())));
    }
    let grid: Vec<f64> = (0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect();
    let bounds = cfg.sweep.bounds.clone();
    let n_starts = cfg.sweep.n_starts.unwrap_or(64);
    let diag = bifurcation_sweep(&cfg.model, &param, &grid, bounds.as_deref(), n_starts).map_err(failed)?;
    let system = cfg.model.build_system().map_err(usage)?;
    let (table, svg) = bifurcation_outputs(&diag, system.names())?;
    for e in &diag.events {
        println!("stable count {} -> {} in ({}, {}]", e.stable_before, e.stable_after, e.lower, e.upper);
    }
    match output_dir(out, &cfg) {
        Some(dir) => {
            write(&dir, "bifurcation.csv", &table.to_csv())?;
            write(&dir, "bifurcation.svg", &svg)?;
            println!("{} grid points written to {}", grid.len(), dir.display());
        }
        None => print!("{}", table.to_csv()),
    }
    Ok(EXIT_OK)
}

fn ensemble_tables(s: &EnsembleSummary) -> Result<(CsvTable, CsvTable), Failure> {
    let mut samples = CsvTable::new(["sample", "output"]).map_err(failed)?;
    for (i, y) in s.outputs.iter().enumerate() {
        samples.push(vec![i as f64, *y]).map_err(failed)?;
    }
    let mut hist = CsvTable::new(["bin_lo", "bin_hi", "count"]).map_err(failed)?;
    let h = &s.histogram;
    for (i, c) in h.counts.iter().enumerate() {
        hist.push(vec![h.edges[i], h.edges[i + 1], *c as f64]).map_err(failed)?;
    }
    Ok((samples, hist))
}

fn ensemble(
    path: &Path,
    n: Option<usize>,
    seed: Option<u64>,
    sigma: Option<f64>,
    param: Option<String>,
    out: Option<PathBuf>,
) -> Outcome {
    let cfg = load(path)?;
    let e = &cfg.ensemble;
    let n = n.or(e.n).ok_or_else(|| usage("--n is required unless [ensemble] n is set"))?;
    let sigma = sigma.or(e.sigma).ok_or_else(|| usage("--sigma is required unless [ensemble] sigma is set"))?;
    let seed = match seed.or(e.seed) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(DEFAULT_SEED),
    };
    let param = param.or(e.param.clone()).ok_or_else(|| usage("--param is required unless [ensemble] param is set"))?;
    if n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(usage("--sigma must be positive"));
    }
    if cfg.model.parameter(&param).is_none() {
        return Err(usage(format!("--param: family {} has no parameter `{param}`", cfg.model.family_name())));
    }
    let s = ensemble_run(&cfg.model, &param, sigma, n, seed, &cfg.integrator).map_err(failed)?;
    println!("n = {} seed = {} param = {} sigma = {} mean = {} cv = {}", s.n, s.seed, s.param, s.sigma, s.mean, s.cv);
    if let Some(dir) = output_dir(out, &cfg) {
        let (samples, hist) = ensemble_tables(&s)?;
        write(&dir, "samples.csv", &samples.to_csv())?;
        write(&dir, "histogram.csv", &hist.to_csv())?;
        println!("written to {}", dir.display());
    }
    Ok(EXIT_OK)
}

fn parse_override(s: &str) -> Result<(String, f64), Failure> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| usage(format!("--set `{s}`: expected key=value")))?;
    let value = parse_number(v.trim()).ok_or_else(|| usage(format!("--set `{s}`: `{}` is not a number", v.trim())))?;
    Ok((k.trim().to_string(), value))
}

fn scenario(id: &str, set: &[String], out: Option<PathBuf>) -> Outcome {
    let sid = ScenarioId::parse(id).ok_or_else(|| usage(format!("unknown scenario `{id}`; see `scenario list`")))?;
    let mut s = Scenario::new(sid);
    for item in set {
        let (k, v) = parse_override(item)?;
        s = s.with(&k, v);
    }
    let has_seed = s.params().map_err(usage)?.iter().any(|(k, _)| k == "seed");
    if has_seed && !s.overrides.iter().any(|(k, _)| k == "seed") {
        if let Some(seed) = env_seed()? {
            s = s.with("seed", seed as f64);
        }
    }
    let report = run_scenario(&s).map_err(usage)?;
    let dir = out.unwrap_or_else(|| Path::new("reports").join(sid.name()));
    report.write_to(&dir).map_err(|e| failed(format!("{}: {e}", dir.display())))?;
    for w in &report.outputs.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", report.report_txt());
    println!("duration {:.3} s", report.duration.as_secs_f64());
    println!("report written to {}", dir.display());
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}
