//! Name-based access to numeric parameters, shared by the constants files,
//! sweeps and the configuration front end.

use super::{FfwdParams, GrnParams, ModelError, PlantParams, QicParams, ReproParams};
use alloc::string::ToString;

pub trait ParamKeys {
    const KEYS: &'static [&'static str];

    fn get(&self, key: &str) -> Option<f64>;

    fn set(&mut self, key: &str, value: f64) -> Result<(), ModelError>;
}

macro_rules! param_keys {
    ($ty:ty { $($field:ident),* $(,)? }) => {
        impl ParamKeys for $ty {
            const KEYS: &'static [&'static str] = &[$(stringify!($field)),*];

            fn get(&self, key: &str) -> Option<f64> {
                match key {
                    $(stringify!($field) => Some(self.$field),)*
                    _ => None,
                }
            }

            fn set(&mut self, key: &str, value: f64) -> Result<(), ModelError> {
                match key {
                    $(stringify!($field) => self.$field = value,)*
                    _ => return Err(ModelError::UnknownParameter(key.to_string())),
                }
                Ok(())
            }
        }
    };
}

param_keys!(PlantParams { alpha, beta, r_tx, r_tl, delta, gamma });
param_keys!(QicParams { k1, k2, km1, km2, gamma_u, v, u_tot, k_act, a_act, n_act, w_open });
param_keys!(FfwdParams { alpha_bar, delta_bar, beta_bar, gamma_bar, g, alpha, beta, delta, gamma });
param_keys!(GrnParams {
    o_basal,
    o_self_max,
    o_self_k,
    o_complex_max,
    o_complex_k,
    n_basal,
    n_complex_max,
    n_complex_k,
    n_repress_k,
    n_repress_floor,
    n_self,
    n_complex,
    n_repress,
    gamma,
});
param_keys!(ReproParams { gain, alpha, beta, c, delta, delta_bar, kappa, gamma, d });
