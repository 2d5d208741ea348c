use alloc::vec::Vec;

use super::ModelError;
use crate::ode::OdeSystem;

/// Lumped pluripotency network on `(x_O, x_N)`: `x_O` activates itself, the
/// complex `c = x_O * x_N` activates both species and `x_O` represses `x_N`
/// down to a leaky floor.
///
/// ```text
/// H_O = b_O + a_O h(x_O; K_O) + a_C h(c; K_C)
/// H_N = (b_N + a_N h(c; K_N)) * (rho + (1 - rho) (1 - h(x_O; K_R)))
/// ```
/// with `h(s; K) = s^n / (K^n + s^n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrnParams {
    pub o_basal: f64,
    pub o_self_max: f64,
    pub o_self_k: f64,
    pub o_complex_max: f64,
    pub o_complex_k: f64,
    pub n_basal: f64,
    pub n_complex_max: f64,
    pub n_complex_k: f64,
    pub n_repress_k: f64,
    /// Fraction of `x_N` production left at full repression, in `(0, 1]`.
    pub n_repress_floor: f64,
    pub n_self: f64,
    pub n_complex: f64,
    pub n_repress: f64,
    pub gamma: f64,
}

impl Default for GrnParams {
    fn default() -> Self {
        super::reference::grn_tristable()
    }
}

fn hill(s: f64, k: f64, n: f64) -> f64 {
    let s = s.max(0.0);
    let sn = libm::pow(s, n);
    sn / (libm::pow(k, n) + sn)
}

impl GrnParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("o_basal", self.o_basal),
            ("o_self_max", self.o_self_max),
            ("o_self_k", self.o_self_k),
            ("o_complex_max", self.o_complex_max),
            ("o_complex_k", self.o_complex_k),
            ("n_basal", self.n_basal),
            ("n_complex_max", self.n_complex_max),
            ("n_complex_k", self.n_complex_k),
            ("n_repress_k", self.n_repress_k),
            ("n_repress_floor", self.n_repress_floor),
            ("n_self", self.n_self),
            ("n_complex", self.n_complex),
            ("n_repress", self.n_repress),
            ("gamma", self.gamma),
        ] {
            ModelError::positive(name, v)?;
        }
        if self.n_repress_floor > 1.0 {
            return Err(ModelError::OutOfRange {
                name: "n_repress_floor",
                value: self.n_repress_floor,
                requirement: "must not exceed 1",
            });
        }
        Ok(())
    }

    pub fn h_o(&self, x_o: f64, x_n: f64) -> f64 {
        let c = x_o.max(0.0) * x_n.max(0.0);
        self.o_basal
            + self.o_self_max * hill(x_o, self.o_self_k, self.n_self)
            + self.o_complex_max * hill(c, self.o_complex_k, self.n_complex)
    }

    pub fn h_n(&self, x_o: f64, x_n: f64) -> f64 {
        let c = x_o.max(0.0) * x_n.max(0.0);
        let drive = self.n_basal + self.n_complex_max * hill(c, self.n_complex_k, self.n_complex);
        let rho = self.n_repress_floor;
        drive * (rho + (1.0 - rho) * (1.0 - hill(x_o, self.n_repress_k, self.n_repress)))
    }

    /// Certified supremum of `H_O`: every saturating term is below its amplitude.
    pub fn d_bound(&self) -> f64 {
        self.o_basal + self.o_self_max + self.o_complex_max
    }

    /// Certified supremum of `H_N`; the repression factor never exceeds 1.
    pub fn n_bound(&self) -> f64 {
        self.n_basal + self.n_complex_max
    }

    /// Forward-invariant box of the open-loop network under input `u_i`.
    pub fn invariant_box(&self, u_i: f64) -> [(f64, f64); 2] {
        [
            (0.0, (self.d_bound() + u_i.max(0.0)) / self.gamma),
            (0.0, self.n_bound() / self.gamma),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrnInput {
    /// Constant overexpression of `x_O`.
    Open { u_i: f64 },
    /// `G (x_star - x_O)`; the negative part acts as extra degradation.
    HighGain { gain: f64, x_star: f64 },
}

#[derive(Debug, Clone)]
pub struct Grn {
    pub params: GrnParams,
    pub input: GrnInput,
}

pub fn build_grn(g: GrnParams, input: GrnInput) -> Result<Grn, ModelError> {
    g.validate()?;
    match input {
        GrnInput::Open { u_i } => ModelError::nonnegative("u_i", u_i)?,
        GrnInput::HighGain { gain, x_star } => {
            ModelError::nonnegative("gain", gain)?;
            ModelError::nonnegative("x_star", x_star)?;
        }
    }
    Ok(Grn { params: g, input })
}

impl OdeSystem for Grn {
    fn dim(&self) -> usize {
        2
    }

    fn names(&self) -> &[&'static str] {
        &["x_o", "x_n"]
    }

    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        let p = &self.params;
        let input = match self.input {
            GrnInput::Open { u_i } => u_i,
            GrnInput::HighGain { gain, x_star } => gain * (x_star - x[0]),
        };
        dx[0] = p.h_o(x[0], x[1]) - p.gamma * x[0] + input;
        dx[1] = p.h_n(x[0], x[1]) - p.gamma * x[1];
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Bounds on `x_O(t)` from `x(0) = 0` under high-gain feedback, using
/// `0 <= H_O <= D`.
pub fn highgain_envelope(t: f64, gain: f64, gamma: f64, x_star: f64, d: f64) -> (f64, f64) {
    let rate = gamma + gain;
    if rate == 0.0 {
        return (0.0, d * t);
    }
    let ramp = -libm::expm1(-rate * t);
    (gain * x_star / rate * ramp, (d + gain * x_star) / rate * ramp)
}
