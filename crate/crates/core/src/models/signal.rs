use alloc::vec;
use alloc::vec::Vec;

use super::ModelError;

/// Piecewise-constant input: list of `(switch_time, value)` pairs with
/// strictly increasing times. The first value also applies before the first
/// switch time.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    steps: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn new(steps: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if steps.is_empty() {
            return Err(ModelError::InvalidSchedule("schedule has no entries"));
        }
        if steps.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(ModelError::InvalidSchedule("schedule entries must be finite"));
        }
        if steps.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(ModelError::InvalidSchedule(
                "switch times must be strictly increasing",
            ));
        }
        Ok(Self { steps })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            steps: vec![(0.0, value)],
        }
    }

    /// `before` until `at`, `after` from then on.
    pub fn step(before: f64, at: f64, after: f64) -> Self {
        let at = if at > 0.0 { at } else { f64::MIN_POSITIVE };
        Self {
            steps: vec![(0.0, before), (at, after)],
        }
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.steps.partition_point(|(s, _)| *s <= t);
        self.steps[i.saturating_sub(1)].1
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().skip(1).map(|(t, _)| *t)
    }

    pub fn min_value(&self) -> f64 {
        self.steps.iter().map(|s| s.1).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.steps.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn final_value(&self) -> f64 {
        self.steps[self.steps.len() - 1].1
    }

    pub fn is_constant(&self) -> bool {
        self.steps.len() == 1
    }
}

/// Time-indexed input signal.
///
/// Piecewise-constant schedules are the supported class. `Sinusoid` is
/// experimental: it is only used to probe bounded time-varying disturbances
/// and carries no steady state.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    Steps(Schedule),
    Sinusoid {
        offset: f64,
        amplitude: f64,
        period: f64,
    },
}

impl Signal {
    pub fn constant(value: f64) -> Self {
        Self::Steps(Schedule::constant(value))
    }

    pub fn step(before: f64, at: f64, after: f64) -> Self {
        Self::Steps(Schedule::step(before, at, after))
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Self::Steps(s) => s.value_at(t),
            Self::Sinusoid {
                offset,
                amplitude,
                period,
            } => offset + amplitude * libm::sin(2.0 * core::f64::consts::PI * t / period),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Steps(s) => s.breakpoints().collect(),
            Self::Sinusoid { .. } => Vec::new(),
        }
    }

    /// Value after the last switch, if the signal eventually freezes.
    pub fn settled_value(&self) -> Option<f64> {
        match self {
            Self::Steps(s) => Some(s.final_value()),
            Self::Sinusoid { .. } => None,
        }
    }

    /// Constant value, if the signal never changes.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Self::Steps(s) if s.is_constant() => Some(s.final_value()),
            _ => None,
        }
    }

    pub fn min_value(&self) -> f64 {
        match self {
            Self::Steps(s) => s.min_value(),
            Self::Sinusoid {
                offset, amplitude, ..
            } => offset - libm::fabs(*amplitude),
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            Self::Steps(s) => s.max_value(),
            Self::Sinusoid {
                offset, amplitude, ..
            } => offset + libm::fabs(*amplitude),
        }
    }

    pub(crate) fn check(&self, name: &'static str, strictly_positive: bool) -> Result<(), ModelError> {
        if let Self::Sinusoid {
            offset,
            amplitude,
            period,
        } = self
        {
            if !(offset.is_finite() && amplitude.is_finite() && *period > 0.0 && period.is_finite()) {
                return Err(ModelError::InvalidSchedule("sinusoid needs finite offset/amplitude and positive period"));
            }
        }
        let lo = self.min_value();
        if strictly_positive {
            ModelError::positive(name, lo)
        } else {
            ModelError::nonnegative(name, lo)
        }
    }
}

impl Default for Signal {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

/// Exogenous inputs acting on the plant and the feedforward controllers.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceInputs {
    /// Endogenous transcription of the controlled gene (concentration/time).
    pub h_grn: Signal,
    /// Retroactivity flux on the protein (concentration/time).
    pub r: Signal,
    /// Multiplicative perturbation of transcription.
    pub d1: Signal,
    /// Multiplicative perturbation of translation.
    pub d2: Signal,
}

impl Default for DisturbanceInputs {
    fn default() -> Self {
        Self {
            h_grn: Signal::constant(0.0),
            r: Signal::constant(0.0),
            d1: Signal::constant(1.0),
            d2: Signal::constant(1.0),
        }
    }
}

impl DisturbanceInputs {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.h_grn.check("h_grn", false)?;
        if !(self.r.min_value().is_finite() && self.r.max_value().is_finite()) {
            return Err(ModelError::InvalidSchedule("r must be finite"));
        }
        self.d1.check("d1", true)?;
        self.d2.check("d2", true)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = [&self.h_grn, &self.r, &self.d1, &self.d2]
            .iter()
            .flat_map(|s| s.breakpoints())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Values after the last switch of every schedule.
    pub fn settled(&self) -> Option<[f64; 4]> {
        Some([
            self.h_grn.settled_value()?,
            self.r.settled_value()?,
            self.d1.settled_value()?,
            self.d2.settled_value()?,
        ])
    }

    pub fn is_constant(&self) -> bool {
        [&self.h_grn, &self.r, &self.d1, &self.d2]
            .iter()
            .all(|s| s.as_constant().is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_lookup() {
        let s = Schedule::new(vec![(0.0, 1.0), (5.0, 2.0), (7.0, 0.5)]).unwrap();
        assert_eq!(s.value_at(-1.0), 1.0);
        assert_eq!(s.value_at(4.999), 1.0);
        assert_eq!(s.value_at(5.0), 2.0);
        assert_eq!(s.value_at(100.0), 0.5);
        assert_eq!(s.breakpoints().collect::<Vec<_>>(), vec![5.0, 7.0]);
    }

    #[test]
    fn schedule_rejects_unordered_times() {
        assert!(Schedule::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(Schedule::new(vec![]).is_err());
        assert!(Schedule::new(vec![(0.0, f64::NAN)]).is_err());
    }

    #[test]
    fn disturbance_sign_constraints() {
        let mut d = DisturbanceInputs::default();
        assert!(d.validate().is_ok());
        d.d1 = Signal::constant(0.0);
        assert!(d.validate().is_err());
        d.d1 = Signal::constant(1.0);
        d.h_grn = Signal::constant(-0.1);
        assert!(d.validate().is_err());
    }
}
