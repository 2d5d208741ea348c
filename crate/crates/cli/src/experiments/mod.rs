//! Named scenarios that bundle models, disturbances and checks into
//! reproducible reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::csv::{format_g17, CsvTable};

pub mod ffwd;
pub mod grn;
pub mod qic;
pub mod repro;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScenarioId {
    QicStep,
    FfwdResourceTitration,
    FfwdCopyNumber,
    FfwdHiddenIntegral,
    GrnBifurcation,
    GrnHighgain,
    ReproTrajectories,
    ReproDosageCompensation,
}

pub struct CatalogEntry {
    pub id: ScenarioId,
    pub name: &'static str,
    pub description: &'static str,
    /// What the scenario's main figure shows.
    pub anchor: &'static str,
}

pub const CATALOG: [CatalogEntry; 8] = [
    CatalogEntry {
        id: ScenarioId::QicStep,
        name: "qic_step",
        description: "quasi-integral controller: epsilon scaling and open vs closed loop transcription step",
        anchor: "open/closed loop step response",
    },
    CatalogEntry {
        id: ScenarioId::FfwdResourceTitration,
        name: "ffwd_resource_titration",
        description: "feedforward loop under activator titration of transcriptional resources",
        anchor: "expected feedforward behaviour",
    },
    CatalogEntry {
        id: ScenarioId::FfwdCopyNumber,
        name: "ffwd_copy_number",
        description: "feedforward loop over log-normal copy-number ensembles",
        anchor: "output distribution narrowing",
    },
    CatalogEntry {
        id: ScenarioId::FfwdHiddenIntegral,
        name: "ffwd_hidden_integral",
        description: "memory variable of the endoribonuclease loop and its integral action",
        anchor: "hidden integral derivation",
    },
    CatalogEntry {
        id: ScenarioId::GrnBifurcation,
        name: "grn_bifurcation",
        description: "pluripotency network equilibria versus overexpression",
        anchor: "overexpression bifurcation diagram",
    },
    CatalogEntry {
        id: ScenarioId::GrnHighgain,
        name: "grn_highgain",
        description: "high-gain feedback on x_O against its analytic envelope",
        anchor: "high-gain envelope bound",
    },
    CatalogEntry {
        id: ScenarioId::ReproTrajectories,
        name: "repro_trajectories",
        description: "coupled reprogramming controller versus constant overexpression",
        anchor: "reprogramming time courses",
    },
    CatalogEntry {
        id: ScenarioId::ReproDosageCompensation,
        name: "repro_dosage_compensation",
        description: "copy-number compensation of the reprogramming construct",
        anchor: "dosage compensation residual bounds",
    },
];

impl ScenarioId {
    pub fn parse(name: &str) -> Option<Self> {
        CATALOG.iter().find(|e| e.name == name).map(|e| e.id)
    }

    pub fn name(self) -> &'static str {
        CATALOG.iter().find(|e| e.id == self).map(|e| e.name).expect("catalogued")
    }

    fn defaults(self) -> Vec<(&'static str, f64)> {
        match self {
            Self::QicStep => qic::defaults(),
            Self::FfwdResourceTitration => ffwd::titration_defaults(),
            Self::FfwdCopyNumber => ffwd::copy_number_defaults(),
            Self::FfwdHiddenIntegral => ffwd::hidden_defaults(),
            Self::GrnBifurcation => grn::bifurcation_defaults(),
            Self::GrnHighgain => grn::highgain_defaults(),
            Self::ReproTrajectories => repro::trajectories_defaults(),
            Self::ReproDosageCompensation => repro::dosage_defaults(),
        }
    }
}

/// One line per scenario: `<id>  <description> [<anchor>]`.
pub fn list_scenarios() -> Vec<String> {
    CATALOG
        .iter()
        .map(|e| format!("{:<26}{} [{}]", e.name, e.description, e.anchor))
        .collect()
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario {scenario} has no parameter `{key}`")]
    UnknownOverride { scenario: &'static str, key: String },
    #[error("override `{key}` = {value} is not finite")]
    BadOverride { key: String, value: f64 },
}

/// Resolved scenario parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Params(BTreeMap<&'static str, f64>);

impl Params {
    pub fn get(&self, key: &str) -> f64 {
        *self.0.get(key).unwrap_or_else(|| panic!("scenario parameter `{key}` is declared"))
    }

    pub fn usize(&self, key: &str) -> usize {
        self.get(key).max(0.0).round() as usize
    }

    pub fn seed(&self) -> u64 {
        self.get("seed").max(0.0) as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: ScenarioId,
    pub overrides: Vec<(String, f64)>,
}

impl Scenario {
    pub fn new(id: ScenarioId) -> Self {
        Self { id, overrides: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.overrides.push((key.to_string(), value));
        self
    }

    pub fn params(&self) -> Result<Params, ScenarioError> {
        let mut map: BTreeMap<&'static str, f64> = self.id.defaults().into_iter().collect();
        for (key, value) in &self.overrides {
            if !value.is_finite() {
                return Err(ScenarioError::BadOverride {
                    key: key.clone(),
                    value: *value,
                });
            }
            let slot = map.iter_mut().find(|(k, _)| **k == key.as_str()).ok_or_else(|| {
                ScenarioError::UnknownOverride {
                    scenario: self.id.name(),
                    key: key.clone(),
                }
            })?;
            *slot.1 = *value;
        }
        Ok(Params(map))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub id: &'static str,
    pub passed: bool,
    pub message: String,
}

/// Tables, figures and verdicts accumulated while a scenario runs.
#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub tables: Vec<(String, CsvTable)>,
    pub figures: Vec<(String, String)>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
}

impl Outputs {
    pub fn table(&mut self, name: &str, table: CsvTable) {
        self.tables.push((name.to_string(), table));
    }

    pub fn figure(&mut self, name: &str, svg: Result<String, crate::svg::PlotError>) {
        match svg {
            Ok(svg) => self.figures.push((name.to_string(), svg)),
            Err(e) => self.warnings.push(format!("{name}: {e}")),
        }
    }

    /// Records a check; errors become failed verdicts carrying their context.
    pub fn verdict(&mut self, id: &'static str, outcome: Result<(bool, String), String>) {
        let (passed, message) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        self.verdicts.push(Verdict { id, passed, message });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub id: ScenarioId,
    pub parameters: Params,
    pub outputs: Outputs,
    pub duration: Duration,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.outputs.passed()
    }

    /// `PASS|FAIL <check-id> <message>` lines.
    pub fn report_txt(&self) -> String {
        let mut s = String::new();
        for v in &self.outputs.verdicts {
            let _ = writeln!(s, "{} {} {}", if v.passed { "PASS" } else { "FAIL" }, v.id, v.message);
        }
        s
    }

    /// Resolved parameters in the constants-file format.
    pub fn parameters_txt(&self) -> String {
        let mut s = format!("version = 1\nfamily = {}\n", self.id.name());
        for (k, v) in self.parameters.iter() {
            let _ = writeln!(s, "{k} = {}", format_g17(v));
        }
        s
    }

    /// Writes every table, figure, `report.txt` and `parameters.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, table) in &self.outputs.tables {
            std::fs::write(dir.join(name), table.to_csv())?;
        }
        for (name, svg) in &self.outputs.figures {
            std::fs::write(dir.join(name), svg)?;
        }
        std::fs::write(dir.join("report.txt"), self.report_txt())?;
        std::fs::write(dir.join("parameters.txt"), self.parameters_txt())
    }
}

pub fn run_scenario(s: &Scenario) -> Result<ExperimentReport, ScenarioError> {
    let params = s.params()?;
    let start = Instant::now();
    let mut out = Outputs::default();
    match s.id {
        ScenarioId::QicStep => qic::run(&params, &mut out),
        ScenarioId::FfwdResourceTitration => ffwd::run_titration(&params, &mut out),
        ScenarioId::FfwdCopyNumber => ffwd::run_copy_number(&params, &mut out),
        ScenarioId::FfwdHiddenIntegral => ffwd::run_hidden(&params, &mut out),
        ScenarioId::GrnBifurcation => grn::run_bifurcation(&params, &mut out),
        ScenarioId::GrnHighgain => grn::run_highgain(&params, &mut out),
        ScenarioId::ReproTrajectories => repro::run_trajectories(&params, &mut out),
        ScenarioId::ReproDosageCompensation => repro::run_dosage(&params, &mut out),
    }
    Ok(ExperimentReport {
        id: s.id,
        parameters: params,
        outputs: out,
        duration: start.elapsed(),
    })
}

/// Builds a table from columns of equal length.
pub(crate) fn table_from_columns(names: &[&str], columns: &[&[f64]]) -> CsvTable {
    let mut t = CsvTable::new(names.iter().copied()).expect("static column names");
    let n = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    for i in 0..n {
        t.push(columns.iter().map(|c| c[i]).collect()).expect("rectangular");
    }
    t
}

pub(crate) fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_stable_and_complete() {
        let a = list_scenarios();
        assert_eq!(a.len(), 8);
        assert_eq!(a, list_scenarios());
        for e in &CATALOG {
            assert_eq!(ScenarioId::parse(e.name), Some(e.id));
            assert!(!e.anchor.is_empty());
        }
    }

    #[test]
    fn overrides_must_be_declared() {
        let s = Scenario::new(ScenarioId::GrnHighgain).with("nope", 1.0);
        assert!(matches!(s.params(), Err(ScenarioError::UnknownOverride { .. })));
        let s = Scenario::new(ScenarioId::GrnHighgain).with("x_star", 3.0);
        assert_eq!(s.params().unwrap().get("x_star"), 3.0);
    }
}
