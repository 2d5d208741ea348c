use alloc::string::ToString;
use alloc::vec::Vec;

use super::AnalysisError;
use crate::models::{ModelError, ModelFamily};
use crate::ode::{simulate_to_steady_state, IntegratorConfig};

/// Which disturbance a rejection curve varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Lumped multiplicative disturbance (`d`, or `d1` where no lumped one exists).
    D,
    D1,
    D2,
    /// Endogenous transcription (`h_grn`, or `h_i` for the reprogramming model).
    H,
}

impl Channel {
    pub fn nominal(self) -> f64 {
        match self {
            Self::H => 0.0,
            _ => 1.0,
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Self::D => &["d", "d1"],
            Self::D1 => &["d1"],
            Self::D2 => &["d2"],
            Self::H => &["h_grn", "h_i"],
        }
    }

    /// Sets the channel on `family`, returning the parameter name used.
    pub fn apply<F: ModelFamily>(self, family: &mut F, value: f64) -> Result<&'static str, ModelError> {
        let mut last = None;
        for key in self.keys() {
            match family.set_parameter(key, value) {
                Ok(()) => return Ok(key),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap_or_else(|| ModelError::UnknownParameter(self.keys()[0].to_string())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationCurve {
    pub channel: Channel,
    pub grid: Vec<f64>,
    pub outputs: Vec<f64>,
    pub nominal_index: usize,
    /// `(max - min) / output at the nominal disturbance`.
    pub rejection_index: f64,
}

/// Steady output of `family` across a disturbance grid.
pub fn adaptation_curve<F: ModelFamily>(
    family: &F,
    grid: &[f64],
    channel: Channel,
    config: &IntegratorConfig,
) -> Result<AdaptationCurve, AnalysisError> {
    let nominal_index = grid
        .iter()
        .position(|v| *v == channel.nominal())
        .ok_or(AnalysisError::InvalidGrid("grid must contain the nominal disturbance"))?;
    let mut outputs = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut f = family.clone();
        let key = channel.apply(&mut f, value)?;
        let system = f.build()?;
        let ss = simulate_to_steady_state(&system, &f.initial_state(), config)?;
        let eq = ss.into_equilibrium().map_err(|source| AnalysisError::NoConvergence {
            parameter: key.to_string(),
            value,
            source,
        })?;
        outputs.push(eq.point[f.output_index()]);
    }
    let max = outputs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = outputs.iter().copied().fold(f64::INFINITY, f64::min);
    let rejection_index = (max - min) / outputs[nominal_index];
    Ok(AdaptationCurve {
        channel,
        grid: grid.to_vec(),
        outputs,
        nominal_index,
        rejection_index,
    })
}
