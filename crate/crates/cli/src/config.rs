//! Sectioned `key = value` run configuration.
//!
//! See `docs/formats.md` for the grammar. Parsing is total: any input yields
//! either a fully validated [`RunConfig`] or the first error with its line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use biocircuit_core::models::reference::{ffwd_reference, grn_tristable, qic_reference, repro_reference};
use biocircuit_core::models::{
    DisturbanceInputs, FfwdVariant, GrnInput, Loop, Model, ModelError, ModelFamily, PlantParams, ReproMode,
    Schedule, Signal,
};
use biocircuit_core::{IntegratorConfig, OdeSystem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line, when the error can be pinned to one.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepSettings {
    pub param: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
    pub n_starts: Option<usize>,
    pub bounds: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnsembleSettings {
    pub param: Option<String>,
    pub sigma: Option<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Model,
    pub initial_state: Vec<f64>,
    pub integrator: IntegratorConfig,
    /// End of the `simulate` horizon.
    pub t_end: f64,
    pub sweep: SweepSettings,
    pub ensemble: EnsembleSettings,
    pub output_dir: Option<PathBuf>,
}

const SECTIONS: [&str; 6] = ["model", "disturbances", "integrator", "sweep", "ensemble", "output"];

struct Entry {
    line: usize,
    value: String,
}

type Section = BTreeMap<String, Entry>;

fn split_sections(text: &str) -> Result<BTreeMap<&'static str, (usize, Section)>, ConfigError> {
    let mut sections: BTreeMap<&'static str, (usize, Section)> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line, "section header must end with `]`"))?
                .trim();
            let known = SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| ConfigError::at(line, format!("unknown section [{name}]")))?;
            if let Some((first, _)) = sections.get(known) {
                return Err(ConfigError::at(
                    line,
                    format!("section [{name}] repeated (first opened on line {first})"),
                ));
            }
            sections.insert(known, (line, Section::new()));
            current = Some(known);
            continue;
        }
        let section = current.ok_or_else(|| ConfigError::at(line, "key outside of any section"))?;
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty()
            || !key
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'.')
        {
            return Err(ConfigError::at(line, format!("invalid key `{key}`")));
        }
        if value.is_empty() {
            return Err(ConfigError::at(line, format!("key `{key}` has no value")));
        }
        let entries = &mut sections.get_mut(section).expect("section opened").1;
        if let Some(prev) = entries.get(key) {
            return Err(ConfigError::at(
                line,
                format!("duplicate key `{key}` (lines {} and {line})", prev.line),
            ));
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    Ok(sections)
}

/// Decimal number with optional fraction and exponent; no `inf`/`nan`.
pub fn parse_number(s: &str) -> Option<f64> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != b.len() {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn number(e: &Entry, key: &str) -> Result<f64, ConfigError> {
    parse_number(&e.value).ok_or_else(|| ConfigError::at(e.line, format!("`{key}` expects a number, got `{}`", e.value)))
}

fn integer(e: &Entry, key: &str) -> Result<u64, ConfigError> {
    if !e.value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ConfigError::at(e.line, format!("`{key}` expects a nonnegative integer")));
    }
    e.value
        .parse()
        .map_err(|_| ConfigError::at(e.line, format!("`{key}` is out of range")))
}

fn word<'a>(e: &'a Entry, key: &str) -> Result<&'a str, ConfigError> {
    if e.value.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'.') {
        Ok(&e.value)
    } else {
        Err(ConfigError::at(e.line, format!("`{key}` expects a bare word, got `{}`", e.value)))
    }
}

/// Comma-separated numbers: `0, 1.5, 2`.
fn number_list(e: &Entry, key: &str) -> Result<Vec<f64>, ConfigError> {
    e.value
        .split(',')
        .map(|s| {
            parse_number(s.trim()).ok_or_else(|| ConfigError::at(e.line, format!("`{key}` expects comma-separated numbers")))
        })
        .collect()
}

/// Parenthesised pairs: `(0, 1), (5, 2)`.
fn pair_list(e: &Entry, key: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    let bad = || ConfigError::at(e.line, format!("`{key}` expects pairs like `(0, 1), (5, 2)`"));
    let mut rest = e.value.trim();
    let mut out = Vec::new();
    loop {
        let inner = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = inner.find(')').ok_or_else(bad)?;
        let (a, b) = inner[..close].split_once(',').ok_or_else(bad)?;
        let a = parse_number(a.trim()).ok_or_else(bad)?;
        let b = parse_number(b.trim()).ok_or_else(bad)?;
        out.push((a, b));
        rest = inner[close + 1..].trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        rest = rest.strip_prefix(',').ok_or_else(bad)?.trim_start();
    }
}

/// A constant, a schedule of `(time, value)` pairs, or `sin(offset, amplitude, period)`.
fn signal(e: &Entry, key: &str) -> Result<Signal, ConfigError> {
    if let Some(v) = parse_number(&e.value) {
        return Ok(Signal::constant(v));
    }
    if let Some(args) = e.value.strip_prefix("sin(").and_then(|s| s.strip_suffix(')')) {
        let v = number_list(
            &Entry {
                line: e.line,
                value: args.to_string(),
            },
            key,
        )?;
        if v.len() != 3 {
            return Err(ConfigError::at(e.line, format!("`{key}`: sin takes offset, amplitude, period")));
        }
        return Ok(Signal::Sinusoid {
            offset: v[0],
            amplitude: v[1],
            period: v[2],
        });
    }
    let steps = pair_list(e, key)?;
    Schedule::new(steps)
        .map(Signal::Steps)
        .map_err(|err| ConfigError::at(e.line, format!("`{key}`: {err}")))
}

fn reject_unknown(section: &Section, allowed: &[&str], name: &str) -> Result<(), ConfigError> {
    for (k, e) in section {
        if !allowed.contains(&k.as_str()) {
            return Err(ConfigError::at(e.line, format!("unknown key `{k}` in [{name}]")));
        }
    }
    Ok(())
}

const MODEL_KEYWORDS: [&str; 6] = ["family", "loop", "variant", "input", "mode", "initial_state"];

fn base_model(model: &Section, header: usize) -> Result<Model, ConfigError> {
    let family = model
        .get("family")
        .ok_or_else(|| ConfigError::at(header, "[model] needs a `family` key"))?;
    let choice = |key: &str, options: &[&str]| -> Result<Option<(usize, String)>, ConfigError> {
        match model.get(key) {
            None => Ok(None),
            Some(e) => {
                let w = word(e, key)?;
                if options.contains(&w) {
                    Ok(Some((e.line, w.to_string())))
                } else {
                    Err(ConfigError::at(e.line, format!("`{key}` must be one of {}", options.join(", "))))
                }
            }
        }
    };
    let fam = word(family, "family")?;
    let allowed_mode_key = match fam {
        "plant" => None,
        "qic" => Some("loop"),
        "ffwd" => Some("variant"),
        "grn" => Some("input"),
        "repro" => Some("mode"),
        other => {
            return Err(ConfigError::at(
                family.line,
                format!("unknown family `{other}` (expected plant, qic, ffwd, grn or repro)"),
            ))
        }
    };
    for key in ["loop", "variant", "input", "mode"] {
        if Some(key) != allowed_mode_key {
            if let Some(e) = model.get(key) {
                return Err(ConfigError::at(e.line, format!("`{key}` does not apply to family {fam}")));
            }
        }
    }
    Ok(match fam {
        "plant" => Model::Plant {
            params: PlantParams::default(),
            inputs: DisturbanceInputs::default(),
        },
        "qic" => {
            let (qic, plant) = qic_reference();
            let mode = match choice("loop", &["closed", "open"])? {
                Some((_, w)) if w == "open" => Loop::Open,
                _ => Loop::Closed,
            };
            Model::Qic {
                qic,
                plant,
                inputs: DisturbanceInputs::default(),
                mode,
            }
        }
        "ffwd" => {
            let mut params = ffwd_reference();
            if let Some((_, w)) = choice("variant", &["ern", "microrna"])? {
                params.variant = if w == "ern" { FfwdVariant::Ern } else { FfwdVariant::MicroRna };
            }
            Model::Ffwd {
                params,
                inputs: DisturbanceInputs::default(),
            }
        }
        "grn" => {
            let input = match choice("input", &["open", "highgain"])? {
                Some((_, w)) if w == "highgain" => GrnInput::HighGain {
                    gain: 1000.0,
                    x_star: 2.5,
                },
                _ => GrnInput::Open { u_i: 0.0 },
            };
            Model::Grn {
                params: grn_tristable(),
                input,
            }
        }
        _ => {
            let mode = match choice("mode", &["standalone", "coupled"])? {
                Some((_, w)) if w == "coupled" => ReproMode::Coupled {
                    grn: grn_tristable(),
                    overexpression: 0.0,
                },
                _ => ReproMode::Standalone {
                    h: Signal::constant(0.0),
                },
            };
            Model::Repro {
                params: repro_reference(),
                mode,
                t_off: None,
            }
        }
    })
}

fn apply_disturbances(model: &mut Model, section: &Section) -> Result<(), ConfigError> {
    for (key, e) in section {
        let sig = signal(e, key)?;
        let slot = match (&mut *model, key.as_str()) {
            (Model::Plant { inputs, .. } | Model::Qic { inputs, .. }, "h_grn") => &mut inputs.h_grn,
            (Model::Plant { inputs, .. } | Model::Qic { inputs, .. }, "r") => &mut inputs.r,
            (
                Model::Plant { inputs, .. } | Model::Qic { inputs, .. } | Model::Ffwd { inputs, .. },
                "d1",
            ) => &mut inputs.d1,
            (
                Model::Plant { inputs, .. } | Model::Qic { inputs, .. } | Model::Ffwd { inputs, .. },
                "d2",
            ) => &mut inputs.d2,
            (
                Model::Repro {
                    mode: ReproMode::Standalone { h },
                    ..
                },
                "h_i",
            ) => h,
            (m, k) => {
                return Err(ConfigError::at(
                    e.line,
                    format!("disturbance `{k}` does not apply to family {}", m.family_name()),
                ))
            }
        };
        *slot = sig;
    }
    Ok(())
}

fn integrator(section: Option<&Section>) -> Result<(IntegratorConfig, f64), ConfigError> {
    let mut cfg = IntegratorConfig::default();
    let mut t_end = 10.0;
    let Some(section) = section else {
        return Ok((cfg, t_end));
    };
    reject_unknown(
        section,
        &["rtol", "atol", "h_init", "h_max", "t_end", "t_max", "sample_dt", "ss_tol", "ss_window", "max_steps"],
        "integrator",
    )?;
    for (key, e) in section {
        match key.as_str() {
            "rtol" => cfg.rtol = number(e, key)?,
            "atol" => cfg.atol = number(e, key)?,
            "h_init" => cfg.h_init = Some(number(e, key)?),
            "h_max" => cfg.h_max = number(e, key)?,
            "t_max" => cfg.t_max = number(e, key)?,
            "sample_dt" => cfg.sample_dt = Some(number(e, key)?),
            "ss_tol" => cfg.ss_tol = number(e, key)?,
            "ss_window" => cfg.ss_window = integer(e, key)? as usize,
            "max_steps" => cfg.max_steps = integer(e, key)? as usize,
            _ => {
                t_end = number(e, key)?;
                if !(t_end > 0.0) {
                    return Err(ConfigError::at(e.line, "`t_end` must be positive"));
                }
            }
        }
    }
    if let Err(err) = cfg.validate() {
        let line = section.values().map(|e| e.line).min().unwrap_or(1);
        return Err(ConfigError::at(line, format!("[integrator]: {err}")));
    }
    Ok((cfg, t_end))
}

fn sweep(section: Option<&Section>) -> Result<SweepSettings, ConfigError> {
    let mut s = SweepSettings::default();
    let Some(section) = section else { return Ok(s) };
    reject_unknown(section, &["param", "from", "to", "points", "n_starts", "box"], "sweep")?;
    for (key, e) in section {
        match key.as_str() {
            "param" => s.param = Some(word(e, key)?.to_string()),
            "from" => s.from = Some(number(e, key)?),
            "to" => s.to = Some(number(e, key)?),
            "points" => s.points = Some(integer(e, key)? as usize),
            "n_starts" => s.n_starts = Some(integer(e, key)? as usize),
            _ => {
                let b = pair_list(e, key)?;
                if b.iter().any(|(lo, hi)| !(lo < hi)) {
                    return Err(ConfigError::at(e.line, "`box` intervals must have lo < hi"));
                }
                s.bounds = Some(b);
            }
        }
    }
    Ok(s)
}

fn ensemble(section: Option<&Section>) -> Result<EnsembleSettings, ConfigError> {
    let mut s = EnsembleSettings::default();
    let Some(section) = section else { return Ok(s) };
    reject_unknown(section, &["param", "sigma", "n", "seed"], "ensemble")?;
    for (key, e) in section {
        match key.as_str() {
            "param" => s.param = Some(word(e, key)?.to_string()),
            "sigma" => s.sigma = Some(number(e, key)?),
            "n" => s.n = Some(integer(e, key)? as usize),
            _ => s.seed = Some(integer(e, key)?),
        }
    }
    Ok(s)
}

pub fn parse_config_bytes(bytes: &[u8]) -> Result<RunConfig, ConfigError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count() + 1;
        ConfigError::at(line, "file is not valid UTF-8")
    })?;
    parse_config(text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let sections = split_sections(text)?;
    let (header, model_section) = sections
        .get("model")
        .ok_or_else(|| ConfigError::global("missing [model] section"))?;
    let mut model = base_model(model_section, *header)?;

    // Remember where each parameter was set so validation errors can cite it.
    let mut origin: BTreeMap<String, usize> = BTreeMap::new();
    for (key, e) in model_section {
        if MODEL_KEYWORDS.contains(&key.as_str()) {
            continue;
        }
        let v = number(e, key)?;
        model.set_parameter(key, v).map_err(|err| match err {
            ModelError::UnknownParameter(_) => ConfigError::at(
                e.line,
                format!("unknown parameter `{key}` for family {}", model.family_name()),
            ),
            other => ConfigError::at(e.line, other.to_string()),
        })?;
        origin.insert(key.clone(), e.line);
    }
    if let Some((_, dist)) = sections.get("disturbances") {
        apply_disturbances(&mut model, dist)?;
        for (k, e) in dist {
            origin.insert(k.clone(), e.line);
        }
    }
    let system = model.build().map_err(|err| {
        let line = match &err {
            ModelError::OutOfRange { name, .. } => origin
                .get(*name)
                .or_else(|| origin.get(&format!("grn.{name}")))
                .copied(),
            _ => None,
        };
        ConfigError {
            line: line.or(Some(*header)),
            message: err.to_string(),
        }
    })?;

    let initial_state = match model_section.get("initial_state") {
        Some(e) => {
            let v = number_list(e, "initial_state")?;
            if v.len() != system.dim() {
                return Err(ConfigError::at(
                    e.line,
                    format!("`initial_state` has {} values, family {} needs {}", v.len(), model.family_name(), system.dim()),
                ));
            }
            v
        }
        None => model.initial_state(),
    };

    let (integrator, t_end) = integrator(sections.get("integrator").map(|s| &s.1))?;
    let sweep = sweep(sections.get("sweep").map(|s| &s.1))?;
    let ensemble = ensemble(sections.get("ensemble").map(|s| &s.1))?;
    let output_dir = match sections.get("output") {
        Some((_, section)) => {
            reject_unknown(section, &["dir"], "output")?;
            section.get("dir").map(|e| PathBuf::from(&e.value))
        }
        None => None,
    };
    Ok(RunConfig {
        model,
        initial_state,
        integrator,
        t_end,
        sweep,
        ensemble,
        output_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_plant() {
        let cfg = parse_config("[model]\nfamily = plant\n").unwrap();
        match cfg.model {
            Model::Plant { params, .. } => assert_eq!(params, PlantParams::default()),
            _ => panic!("wrong family"),
        }
        assert_eq!(cfg.initial_state, vec![0.0, 0.0]);
    }

    #[test]
    fn negative_gamma_cites_line_and_invariant() {
        let err = parse_config("[model]\nfamily = plant\n\ngamma = -1\n").unwrap_err();
        assert_eq!(err.line, Some(4));
        assert!(err.message.contains("gamma") && err.message.contains("positive"), "{err}");
    }

    #[test]
    fn duplicate_key_cites_both_lines() {
        let err = parse_config("[model]\nfamily = plant\ndelta = 1\n# x\ndelta = 2\n").unwrap_err();
        assert_eq!(err.line, Some(5));
        assert!(err.message.contains("lines 3 and 5"), "{err}");
    }

    #[test]
    fn missing_model_section_is_named() {
        let err = parse_config("[integrator]\nrtol = 1e-6\n").unwrap_err();
        assert!(err.message.contains("[model]"));
    }

    #[test]
    fn schedules_and_sections() {
        let text = "\
[model]
family = plant
initial_state = 1, 1
[disturbances]
h_grn = (0, 0), (5, 1)
d1 = 0.5
[integrator]
t_end = 20
sample_dt = 0.5
[sweep]
param = alpha
from = 0.5
to = 2
points = 4
box = (0, 10), (0, 10)
[ensemble]
sigma = 0.25
n = 10
seed = 3
[output]
dir = out/run 1
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.t_end, 20.0);
        assert_eq!(cfg.sweep.points, Some(4));
        assert_eq!(cfg.ensemble.seed, Some(3));
        assert_eq!(cfg.output_dir, Some(PathBuf::from("out/run 1")));
        let Model::Plant { inputs, .. } = &cfg.model else { panic!() };
        assert_eq!(inputs.h_grn.value_at(6.0), 1.0);
        assert_eq!(inputs.d1.as_constant(), Some(0.5));
    }

    #[test]
    fn errors_carry_lines() {
        for (text, line) in [
            ("[model]\nfamily = plant\nbogus = 1\n", 3),
            ("[model]\nfamily = plant\n[disturbances]\nh_grn = (5, 1), (0, 0)\n", 4),
            ("[model]\nfamily = plant\n[disturbances]\nd1 = 0\n", 4),
            ("[model]\nfamily = plant\nalpha = 1e\n", 3),
            ("[model]\nfamily = plant\nalpha = inf\n", 3),
            ("[model]\nfamily = plant\n[weird]\n", 3),
            ("family = plant\n", 1),
            ("[model]\nfamily = qic\nvariant = ern\n", 3),
            ("[model]\nfamily = ffwd\n[disturbances]\nh_grn = 1\n", 4),
            ("[model]\nfamily = plant\ninitial_state = 1\n", 3),
            ("[model]\nfamily = plant\n[integrator]\nrtol = -1\n", 4),
        ] {
            let err = parse_config(text).unwrap_err();
            assert_eq!(err.line, Some(line), "{text:?}: {err}");
        }
    }

    #[test]
    fn number_grammar() {
        for ok in ["1", "-2.5", "+3", ".5", "5.", "1e-3", "2.5E+4"] {
            assert!(parse_number(ok).is_some(), "{ok}");
        }
        for bad in ["", "-", ".", "e5", "1e", "nan", "inf", "1.2.3", "0x10", "1 2", "1e999"] {
            assert!(parse_number(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn non_utf8_is_an_error() {
        let err = parse_config_bytes(b"[model]\nfamily = \xff\n").unwrap_err();
        assert_eq!(err.line, Some(2));
    }
}
