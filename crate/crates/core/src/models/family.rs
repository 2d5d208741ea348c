use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::keys::ParamKeys;
use super::*;
use crate::ode::OdeSystem;

/// A parameterised model that analysis routines can rebuild after changing
/// one named parameter.
pub trait ModelFamily: Clone + Send + Sync {
    type System: OdeSystem;

    fn parameter(&self, key: &str) -> Option<f64>;

    fn set_parameter(&mut self, key: &str, value: f64) -> Result<(), ModelError>;

    fn build(&self) -> Result<Self::System, ModelError>;

    fn initial_state(&self) -> Vec<f64>;

    /// Index of the regulated output coordinate.
    fn output_index(&self) -> usize;

    /// Box expected to contain every equilibrium, for multi-start searches.
    fn search_box(&self) -> Vec<(f64, f64)>;

    /// Analytic steady output, when the family has one.
    fn closed_form_output(&self) -> Option<f64> {
        None
    }
}

/// Every model of the catalog behind one type.
#[derive(Debug, Clone)]
pub enum Model {
    Plant {
        params: PlantParams,
        inputs: DisturbanceInputs,
    },
    Qic {
        qic: QicParams,
        plant: PlantParams,
        inputs: DisturbanceInputs,
        mode: Loop,
    },
    Ffwd {
        params: FfwdParams,
        inputs: DisturbanceInputs,
    },
    Grn {
        params: GrnParams,
        input: GrnInput,
    },
    Repro {
        params: ReproParams,
        mode: ReproMode,
        t_off: Option<f64>,
    },
}

#[derive(Debug, Clone)]
pub enum AnySystem {
    Plant(Plant),
    Qic(Qic),
    Ffwd(Ffwd),
    Grn(Grn),
    Repro(Repro),
}

macro_rules! delegate {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            AnySystem::Plant($s) => $e,
            AnySystem::Qic($s) => $e,
            AnySystem::Ffwd($s) => $e,
            AnySystem::Grn($s) => $e,
            AnySystem::Repro($s) => $e,
        }
    };
}

impl OdeSystem for AnySystem {
    fn dim(&self) -> usize {
        delegate!(self, s => s.dim())
    }
    fn names(&self) -> &[&'static str] {
        delegate!(self, s => s.names())
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        delegate!(self, s => s.rhs(t, x, dx))
    }
    fn breakpoints(&self) -> Vec<f64> {
        delegate!(self, s => s.breakpoints())
    }
}

const INPUT_KEYS: [&str; 4] = ["h_grn", "r", "d1", "d2"];

fn input_get(inputs: &DisturbanceInputs, key: &str) -> Option<f64> {
    let s = match key {
        "h_grn" => &inputs.h_grn,
        "r" => &inputs.r,
        "d1" => &inputs.d1,
        "d2" => &inputs.d2,
        _ => return None,
    };
    s.as_constant()
}

fn input_set(inputs: &mut DisturbanceInputs, key: &str, value: f64) -> bool {
    let s = match key {
        "h_grn" => &mut inputs.h_grn,
        "r" => &mut inputs.r,
        "d1" => &mut inputs.d1,
        "d2" => &mut inputs.d2,
        _ => return false,
    };
    *s = Signal::constant(value);
    true
}

impl Model {
    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Plant { .. } => "plant",
            Self::Qic { .. } => "qic",
            Self::Ffwd { .. } => "ffwd",
            Self::Grn { .. } => "grn",
            Self::Repro { .. } => "repro",
        }
    }

    /// Every name accepted by [`ModelFamily::set_parameter`].
    pub fn parameter_names(&self) -> Vec<&'static str> {
        let mut v: Vec<&'static str> = match self {
            Self::Plant { .. } => PlantParams::KEYS.to_vec(),
            Self::Qic { .. } => {
                let mut v = QicParams::KEYS.to_vec();
                v.extend(PlantParams::KEYS.iter().filter(|k| **k != "alpha"));
                v
            }
            Self::Ffwd { .. } => {
                let mut v = FfwdParams::KEYS.to_vec();
                v.push("d");
                v
            }
            Self::Grn { input, .. } => {
                let mut v = GrnParams::KEYS.to_vec();
                match input {
                    GrnInput::Open { .. } => v.push("u_i"),
                    GrnInput::HighGain { .. } => v.extend(["gain", "x_star"]),
                }
                v
            }
            Self::Repro { mode, .. } => {
                let mut v = ReproParams::KEYS.to_vec();
                v.push("t_off");
                match mode {
                    ReproMode::Standalone { .. } => v.push("h_i"),
                    ReproMode::Coupled { .. } => {
                        v.push("overexpression");
                        v.extend(GRN_PREFIXED);
                    }
                }
                v
            }
        };
        if matches!(self, Self::Plant { .. } | Self::Qic { .. }) {
            v.extend(INPUT_KEYS);
        } else if matches!(self, Self::Ffwd { .. }) {
            v.extend(["d1", "d2"]);
        }
        v
    }

    pub fn build_system(&self) -> Result<AnySystem, ModelError> {
        Ok(match self {
            Self::Plant { params, inputs } => AnySystem::Plant(build_plant(*params, inputs.clone())?),
            Self::Qic {
                qic,
                plant,
                inputs,
                mode,
            } => AnySystem::Qic(build_qic(*qic, *plant, inputs.clone(), *mode)?),
            Self::Ffwd { params, inputs } => AnySystem::Ffwd(build_ffwd(*params, inputs.clone())?),
            Self::Grn { params, input } => AnySystem::Grn(build_grn(*params, *input)?),
            Self::Repro { params, mode, t_off } => AnySystem::Repro(build_repro(*params, mode.clone(), *t_off)?),
        })
    }
}

const GRN_PREFIXED: [&str; 14] = [
    "grn.o_basal",
    "grn.o_self_max",
    "grn.o_self_k",
    "grn.o_complex_max",
    "grn.o_complex_k",
    "grn.n_basal",
    "grn.n_complex_max",
    "grn.n_complex_k",
    "grn.n_repress_k",
    "grn.n_repress_floor",
    "grn.n_self",
    "grn.n_complex",
    "grn.n_repress",
    "grn.gamma",
];

impl ModelFamily for Model {
    type System = AnySystem;

    fn parameter(&self, key: &str) -> Option<f64> {
        match self {
            Self::Plant { params, inputs } => params.get(key).or_else(|| input_get(inputs, key)),
            Self::Qic { qic, plant, inputs, .. } => qic
                .get(key)
                .or_else(|| if key == "alpha" { None } else { plant.get(key) })
                .or_else(|| input_get(inputs, key)),
            Self::Ffwd { params, inputs } => match key {
                "d" => Some(input_get(inputs, "d1")? * input_get(inputs, "d2")?),
                "d1" | "d2" => input_get(inputs, key),
                _ => params.get(key),
            },
            Self::Grn { params, input } => match (key, input) {
                ("u_i", GrnInput::Open { u_i }) => Some(*u_i),
                ("gain", GrnInput::HighGain { gain, .. }) => Some(*gain),
                ("x_star", GrnInput::HighGain { x_star, .. }) => Some(*x_star),
                _ => params.get(key),
            },
            Self::Repro { params, mode, t_off } => match (key, mode) {
                ("t_off", _) => *t_off,
                ("h_i", ReproMode::Standalone { h }) => h.as_constant(),
                ("overexpression", ReproMode::Coupled { overexpression, .. }) => Some(*overexpression),
                (k, ReproMode::Coupled { grn, .. }) if k.starts_with("grn.") => grn.get(&k[4..]),
                _ => params.get(key),
            },
        }
    }

    fn set_parameter(&mut self, key: &str, value: f64) -> Result<(), ModelError> {
        match self {
            Self::Plant { params, inputs } => {
                if !input_set(inputs, key, value) {
                    params.set(key, value)?;
                }
            }
            Self::Qic { qic, plant, inputs, .. } => {
                if qic.set(key, value).is_err() && !input_set(inputs, key, value) {
                    if key == "alpha" {
                        return Err(ModelError::NotSweepable(key.to_string()));
                    }
                    plant.set(key, value)?;
                }
            }
            Self::Ffwd { params, inputs } => match key {
                "d" => {
                    input_set(inputs, "d1", value);
                    input_set(inputs, "d2", 1.0);
                }
                "d1" | "d2" => {
                    input_set(inputs, key, value);
                }
                _ => params.set(key, value)?,
            },
            Self::Grn { params, input } => match (key, input) {
                ("u_i", GrnInput::Open { u_i }) => *u_i = value,
                ("gain", GrnInput::HighGain { gain, .. }) => *gain = value,
                ("x_star", GrnInput::HighGain { x_star, .. }) => *x_star = value,
                ("u_i" | "gain" | "x_star", _) => return Err(ModelError::NotSweepable(key.to_string())),
                _ => params.set(key, value)?,
            },
            Self::Repro { params, mode, t_off } => match (key, mode) {
                ("t_off", _) => *t_off = Some(value),
                ("h_i", ReproMode::Standalone { h }) => *h = Signal::constant(value),
                ("overexpression", ReproMode::Coupled { overexpression, .. }) => *overexpression = value,
                (k, ReproMode::Coupled { grn, .. }) if k.starts_with("grn.") => grn.set(&k[4..], value)?,
                ("h_i" | "overexpression", _) => return Err(ModelError::NotSweepable(key.to_string())),
                _ => params.set(key, value)?,
            },
        }
        Ok(())
    }

    fn build(&self) -> Result<AnySystem, ModelError> {
        self.build_system()
    }

    fn initial_state(&self) -> Vec<f64> {
        let n = match self {
            Self::Plant { .. } | Self::Grn { .. } => 2,
            Self::Qic { .. } => 3,
            Self::Ffwd { params, .. } => match params.variant {
                FfwdVariant::Ern => 4,
                FfwdVariant::MicroRna => 3,
            },
            Self::Repro { mode, .. } => match mode {
                ReproMode::Standalone { .. } => 3,
                ReproMode::Coupled { .. } => 4,
            },
        };
        vec![0.0; n]
    }

    fn output_index(&self) -> usize {
        match self {
            Self::Plant { .. } | Self::Qic { .. } => 1,
            Self::Ffwd { .. } => self.initial_state().len() - 1,
            Self::Grn { .. } => 0,
            Self::Repro { .. } => 2,
        }
    }

    fn search_box(&self) -> Vec<(f64, f64)> {
        // Upper ends are production / decay bounds with a safety factor.
        let pad = |v: f64| (0.0, 2.0 * v.max(1e-3));
        match self {
            Self::Plant { params, inputs } => {
                let m = (params.k() * inputs.d1.max_value() + inputs.h_grn.max_value()) / params.delta;
                let x = (params.kappa() * inputs.d2.max_value() * m + inputs.r.max_value().max(0.0)) / params.gamma;
                vec![pad(m), pad(x)]
            }
            Self::Qic { qic, plant, inputs, .. } => {
                let m = (qic.a_act * plant.r_tx * inputs.d1.max_value() + inputs.h_grn.max_value()) / plant.delta;
                let x = (plant.kappa() * inputs.d2.max_value() * m + inputs.r.max_value().max(0.0)) / plant.gamma;
                vec![pad(m), pad(x), (0.0, qic.u_tot)]
            }
            Self::Ffwd { params: f, inputs } => {
                let (d1, d2) = (inputs.d1.max_value(), inputs.d2.max_value());
                let ctl = f.alpha_bar * d1 / f.delta_bar;
                let e = f.beta_bar * d2 * ctl / f.gamma_bar;
                let m = match f.variant {
                    FfwdVariant::Ern if f.delta == 0.0 => f.alpha * d1 / (f.g * f.beta_bar * inputs.d2.min_value() * f.alpha_bar * inputs.d1.min_value() / (f.gamma_bar * f.delta_bar)),
                    FfwdVariant::MicroRna if f.delta == 0.0 => f.alpha * d1 / (f.g * f.alpha_bar * inputs.d1.min_value() / f.delta_bar),
                    _ => f.alpha * d1 / f.delta.max(1e-300),
                };
                let x = f.beta * d2 * m / f.gamma;
                match f.variant {
                    FfwdVariant::Ern => vec![pad(ctl), pad(e), pad(m), pad(x)],
                    FfwdVariant::MicroRna => vec![pad(ctl), pad(m), pad(x)],
                }
            }
            Self::Grn { params, input } => {
                let u = match input {
                    GrnInput::Open { u_i } => *u_i,
                    GrnInput::HighGain { gain, x_star } => gain * x_star,
                };
                params.invariant_box(u).to_vec()
            }
            Self::Repro { params: r, mode, .. } => {
                let mu = r.d * r.gain * r.beta / r.delta_bar;
                let h = match mode {
                    ReproMode::Standalone { h } => h.max_value(),
                    ReproMode::Coupled { grn, overexpression } => grn.d_bound() + overexpression,
                };
                let m = (h + r.d * r.gain * r.alpha) / r.delta;
                let x = r.kappa * m / r.gamma;
                match mode {
                    ReproMode::Standalone { .. } => vec![pad(m), pad(mu), pad(x)],
                    ReproMode::Coupled { grn, .. } => vec![pad(m), pad(mu), pad(x), pad(grn.n_bound() / grn.gamma)],
                }
            }
        }
    }

    fn closed_form_output(&self) -> Option<f64> {
        match self {
            Self::Plant { params, inputs } => {
                let [h, r, d1, d2] = inputs.settled()?;
                Some(params.steady_state(h, r, d1, d2)[1])
            }
            Self::Ffwd { params, inputs } => {
                let [_, _, d1, d2] = inputs.settled()?;
                Some(ffwd_steady_state(params, d1, d2).x)
            }
            Self::Repro {
                params,
                mode: ReproMode::Standalone { h },
                t_off: None,
            } => Some(repro_steady_state(params, h.settled_value()?).x),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_name_round_trips() {
        let models = [
            Model::Plant {
                params: PlantParams::default(),
                inputs: DisturbanceInputs::default(),
            },
            Model::Qic {
                qic: QicParams::default(),
                plant: PlantParams::default(),
                inputs: DisturbanceInputs::default(),
                mode: Loop::Closed,
            },
            Model::Ffwd {
                params: FfwdParams::default(),
                inputs: DisturbanceInputs::default(),
            },
            Model::Grn {
                params: GrnParams::default(),
                input: GrnInput::Open { u_i: 0.0 },
            },
            Model::Repro {
                params: ReproParams::default(),
                mode: ReproMode::Coupled {
                    grn: GrnParams::default(),
                    overexpression: 0.0,
                },
                t_off: None,
            },
        ];
        for mut m in models {
            for key in m.parameter_names() {
                if key == "d" {
                    continue;
                }
                m.set_parameter(key, 0.75).unwrap_or_else(|e| panic!("{key}: {e}"));
                assert_eq!(m.parameter(key), Some(0.75), "{} {key}", m.family_name());
            }
            assert!(m.set_parameter("bogus", 1.0).is_err());
            let sys = m.build().unwrap();
            assert_eq!(sys.dim(), m.initial_state().len());
            assert_eq!(m.search_box().len(), sys.dim());
        }
    }

    #[test]
    fn closed_forms_track_parameters() {
        let mut m = Model::Ffwd {
            params: FfwdParams::default(),
            inputs: DisturbanceInputs::default(),
        };
        m.set_parameter("d", 2.0).unwrap();
        assert!((m.closed_form_output().unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.parameter("d"), Some(2.0));
    }
}
