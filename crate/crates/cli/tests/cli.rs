//! End-to-end runs of the `biocircuit` binary.

use std::path::Path;
use std::process::{Command, Output};

const PLANT_STEP: &str = "\
[model]
family = plant
initial_state = 0, 0
[disturbances]
h_grn = (0, 0), (1, 1)
[integrator]
t_end = 10
sample_dt = 0.1
";

const GRN: &str = "\
[model]
family = grn
[sweep]
param = u_i
from = 0
to = 3
points = 7
n_starts = 200
";

const FFWD: &str = "\
[model]
family = ffwd
variant = ern
g = 100
[ensemble]
param = d
";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_biocircuit"));
    c.env_remove("BIOCIRCUIT_SEED");
    c
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn scenario_list_has_eight_lines() {
    let out = run(bin().args(["scenario", "list"]));
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    assert_eq!(stdout.lines().count(), 8);
    assert!(stdout.lines().next().unwrap().starts_with("qic_step"));
    assert_eq!(stdout, text(&run(bin().args(["scenario", "list"])).stdout));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(bin().arg("--help")).status.code(), Some(0));
    assert_eq!(run(bin().arg("--version")).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two_with_one_line_naming_the_flag() {
    let out = run(bin().args(["simulate", "--bogus", "x"]));
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("--bogus"));

    let out = run(bin().args(["ensemble", "--config", "x.cfg", "--n", "many"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("--n"));

    let out = run(&mut bin());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_model_section_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "bad.cfg", "[integrator]\nrtol = 1e-6\n");
    let out = run(bin().args(["simulate", "--config", &cfg, "--out"]).arg(dir.path().join("o")));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("[model]"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn unreadable_config_exits_two() {
    let out = run(bin().args(["equilibria", "--config", "/nonexistent/none.cfg"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("--config"));
}

#[test]
fn config_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "dup.cfg", "[model]\nfamily = plant\ndelta = 1\ndelta = 2\n");
    let out = run(bin().args(["equilibria", "--config", &cfg]));
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains('3') && err.contains('4'), "{err}");
}

#[test]
fn simulate_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "plant.cfg", PLANT_STEP);
    let out_dir = dir.path().join("sim");
    let out = run(bin().args(["simulate", "--config", &cfg, "--out"]).arg(&out_dir));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,m,x\n"));
    assert_eq!(csv.lines().count(), 102);
    let svg = std::fs::read_to_string(out_dir.join("trajectory.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn simulate_uses_output_section_and_needs_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "plant.cfg", PLANT_STEP);
    let out = run(bin().args(["simulate", "--config", &cfg]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("--out"));

    let target = dir.path().join("from_cfg");
    let body = format!("{PLANT_STEP}[output]\ndir = {}\n", target.display());
    let cfg = config(dir.path(), "plant_out.cfg", &body);
    let out = run(bin().args(["simulate", "--config", &cfg]));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(target.join("trajectory.csv").exists());
}

#[test]
fn equilibria_lists_the_tristable_network() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "grn.cfg", GRN);
    let out = run(bin().args(["equilibria", "--config", &cfg]));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("x_o,x_n,residual,stable"));
    let stable = lines.filter(|l| l.ends_with(",1")).count();
    assert_eq!(stable, 3, "{stdout}");
}

#[test]
fn bifurcate_with_flags_and_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "grn.cfg", GRN);
    let a = dir.path().join("flags");
    let out = run(bin()
        .args(["bifurcate", "--config", &cfg, "--param", "u_i", "--from", "0", "--to", "2", "--points", "5", "--out"])
        .arg(&a));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(a.join("bifurcation.csv")).unwrap();
    assert!(csv.starts_with("u_i,branch,stable,x_o,x_n\n"));
    assert!(a.join("bifurcation.svg").exists());

    let out = run(bin().args(["bifurcate", "--config", &cfg]));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("u_i,branch,stable,x_o,x_n"));
}

#[test]
fn bifurcate_rejects_bad_requests() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "plant.cfg", PLANT_STEP);
    let out = run(bin().args(["bifurcate", "--config", &cfg, "--from", "0", "--to", "1", "--points", "3"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("--param"));
    let out = run(bin().args(["bifurcate", "--config", &cfg, "--param", "nope", "--from", "0", "--to", "1", "--points", "3"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("nope"));
    let out = run(bin().args(["bifurcate", "--config", &cfg, "--param", "alpha", "--from", "1", "--to", "2", "--points", "1"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ensemble_is_seeded_and_honours_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ffwd.cfg", FFWD);
    let flag = |seed: &str, out: &Path| {
        run(bin().args(["ensemble", "--config", &cfg, "--n", "200", "--sigma", "0.5", "--seed", seed, "--out"]).arg(out))
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = flag("5", &a);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(flag("5", &b).status.code(), Some(0));
    let samples = std::fs::read(a.join("samples.csv")).unwrap();
    assert_eq!(samples, std::fs::read(b.join("samples.csv")).unwrap());
    assert!(a.join("histogram.csv").exists());

    let c = dir.path().join("c");
    let out = run(bin()
        .env("BIOCIRCUIT_SEED", "5")
        .args(["ensemble", "--config", &cfg, "--n", "200", "--sigma", "0.5", "--out"])
        .arg(&c));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(samples, std::fs::read(c.join("samples.csv")).unwrap());

    let d = dir.path().join("d");
    let out = run(bin()
        .env("BIOCIRCUIT_SEED", "6")
        .args(["ensemble", "--config", &cfg, "--n", "200", "--sigma", "0.5", "--out"])
        .arg(&d));
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(samples, std::fs::read(d.join("samples.csv")).unwrap());

    let out = run(bin().env("BIOCIRCUIT_SEED", "x").args(["ensemble", "--config", &cfg, "--n", "20", "--sigma", "0.5"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("BIOCIRCUIT_SEED"));
}

#[test]
fn ensemble_requires_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "ffwd.cfg", FFWD);
    let out = run(bin().args(["ensemble", "--config", &cfg, "--sigma", "0.5"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("--n"));
    let out = run(bin().args(["ensemble", "--config", &cfg, "--n", "10", "--sigma", "-1"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scenario_run_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("titration");
    let out = run(bin().args(["scenario", "run", "ffwd_resource_titration", "--out"]).arg(&out_dir));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    for f in ["titration.csv", "titration.svg", "report.txt", "parameters.txt"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.lines().all(|l| l.starts_with("PASS ")));
    assert!(text(&out.stdout).contains("duration"));
}

#[test]
fn scenario_run_defaults_to_reports_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin().current_dir(dir.path()).args(["scenario", "run", "grn_highgain"]));
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(dir.path().join("reports/grn_highgain/envelope.svg").exists());
}

#[test]
fn failed_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // x_limit = 2 is below the pluripotent basin, so the construct cannot
    // reprogram and the check must fail.
    let out = run(bin()
        .args(["scenario", "run", "repro_trajectories", "--set", "c=10", "--out"])
        .arg(dir.path().join("r")));
    assert_eq!(out.status.code(), Some(1));
    let report = std::fs::read_to_string(dir.path().join("r/report.txt")).unwrap();
    assert!(report.starts_with("FAIL repro_reprogramming"));
}

#[test]
fn scenario_overrides_are_checked() {
    let out = run(bin().args(["scenario", "run", "grn_highgain", "--set", "nope=1"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("nope"));
    let out = run(bin().args(["scenario", "run", "grn_highgain", "--set", "x_star"]));
    assert_eq!(out.status.code(), Some(2));
    let out = run(bin().args(["scenario", "run", "grn_highgain", "--set", "x_star=abc"]));
    assert_eq!(out.status.code(), Some(2));
    let out = run(bin().args(["scenario", "run", "no_such"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("no_such"));
}

#[test]
fn scenario_seed_comes_from_environment_unless_set() {
    let dir = tempfile::tempdir().unwrap();
    let go = |env: Option<&str>, extra: &[&str], sub: &str| {
        let mut c = bin();
        if let Some(v) = env {
            c.env("BIOCIRCUIT_SEED", v);
        }
        c.args(["scenario", "run", "ffwd_copy_number", "--set", "n=500"]).args(extra).arg("--out").arg(dir.path().join(sub));
        let out = run(&mut c);
        assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
        std::fs::read_to_string(dir.path().join(sub).join("parameters.txt")).unwrap()
    };
    assert!(go(None, &[], "a").contains("seed = 1\n"));
    assert!(go(Some("9"), &[], "b").contains("seed = 9\n"));
    assert!(go(Some("9"), &["--set", "seed=4"], "c").contains("seed = 4\n"));
}
