use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{rng, AnalysisError};
use crate::models::ModelFamily;
use crate::ode::{simulate_to_steady_state, IntegratorConfig};

pub const HISTOGRAM_BINS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `HISTOGRAM_BINS + 1` edges spanning `[min, max]`.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64]) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / HISTOGRAM_BINS as f64;
        let edges = (0..=HISTOGRAM_BINS).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0; HISTOGRAM_BINS];
        for v in values {
            let bin = if width > 0.0 {
                (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1)
            } else {
                0
            };
            counts[bin] += 1;
        }
        Self { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub n: usize,
    pub seed: u64,
    pub param: String,
    pub sigma: f64,
    pub outputs: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation over mean.
    pub cv: f64,
    pub histogram: Histogram,
}

/// Steady outputs over `n` log-normal draws of one parameter.
///
/// Sample `i` scales the parameter's current value by `exp(sigma * Z_i)`,
/// with `Z_i` the `i`-th normal of the seeded counter stream.
pub fn ensemble_run<F: ModelFamily>(
    family: &F,
    param: &str,
    sigma: f64,
    n: usize,
    seed: u64,
    config: &IntegratorConfig,
) -> Result<EnsembleSummary, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::InvalidArgument("ensemble needs at least two samples"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(AnalysisError::InvalidArgument("sigma must be positive"));
    }
    let base = match family.parameter(param) {
        Some(v) => v,
        None => {
            family.clone().set_parameter(param, 1.0)?;
            1.0
        }
    };
    let mut outputs = Vec::with_capacity(n);
    for i in 0..n {
        let value = base * libm::exp(sigma * rng::normal(seed, i as u64));
        let mut f = family.clone();
        f.set_parameter(param, value)?;
        let y = match f.closed_form_output() {
            Some(y) => y,
            None => {
                let system = f.build()?;
                let ss = simulate_to_steady_state(&system, &f.initial_state(), config)?;
                let eq = ss.into_equilibrium().map_err(|source| AnalysisError::NoConvergence {
                    parameter: param.to_string(),
                    value,
                    source,
                })?;
                eq.point[f.output_index()]
            }
        };
        outputs.push(y);
    }
    let mean = outputs.iter().sum::<f64>() / n as f64;
    let var = outputs.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(EnsembleSummary {
        n,
        seed,
        param: param.to_string(),
        sigma,
        mean,
        cv: libm::sqrt(var) / libm::fabs(mean),
        histogram: Histogram::new(&outputs),
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{DisturbanceInputs, FfwdParams, Model, ReproMode, ReproParams, Signal};

    fn ffwd(g: f64) -> Model {
        Model::Ffwd {
            params: FfwdParams {
                g,
                ..Default::default()
            },
            inputs: DisturbanceInputs::default(),
        }
    }

    #[test]
    fn degenerate_spread() {
        let s = ensemble_run(&ffwd(1.0), "d", 1e-6, 500, 1, &IntegratorConfig::default()).unwrap();
        assert!(s.cv <= 1e-5);
        assert_eq!(s.histogram.counts.iter().sum::<usize>(), 500);
    }

    #[test]
    fn regulation_narrows_distribution() {
        let cfg = IntegratorConfig::default();
        let reg = ensemble_run(&ffwd(100.0), "d", 0.5, 10_000, 42, &cfg).unwrap();
        let unreg = ensemble_run(&ffwd(0.0), "d", 0.5, 10_000, 42, &cfg).unwrap();
        // Unregulated output is proportional to d: CV of the log-normal itself.
        let lognormal_cv = libm::sqrt(libm::exp(0.25) - 1.0);
        assert!((unreg.cv - lognormal_cv).abs() < 0.03);
        assert!(reg.cv <= 0.1 * unreg.cv);
    }

    #[test]
    fn repro_compensates_copy_number() {
        let r = ReproParams {
            gain: 1000.0,
            ..Default::default()
        };
        let model = Model::Repro {
            params: r,
            mode: ReproMode::Standalone {
                h: Signal::constant(5.0),
            },
            t_off: None,
        };
        let s = ensemble_run(&model, "d", 0.5, 2000, 9, &IntegratorConfig::default()).unwrap();
        assert!(s.cv <= 0.02, "{}", s.cv);
    }

    #[test]
    fn reproducible() {
        let cfg = IntegratorConfig::default();
        let a = ensemble_run(&ffwd(1.0), "d", 0.3, 100, 5, &cfg).unwrap();
        let b = ensemble_run(&ffwd(1.0), "d", 0.3, 100, 5, &cfg).unwrap();
        assert_eq!(a, b);
        let c = ensemble_run(&ffwd(1.0), "d", 0.3, 100, 6, &cfg).unwrap();
        assert_ne!(a.outputs, c.outputs);
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = IntegratorConfig::default();
        assert!(ensemble_run(&ffwd(1.0), "d", 0.3, 1, 5, &cfg).is_err());
        assert!(ensemble_run(&ffwd(1.0), "d", 0.0, 10, 5, &cfg).is_err());
    }
}
