//! Model families: constructors returning [`OdeSystem`](crate::ode::OdeSystem)
//! values, plus closed-form steady states where they exist.

mod error;
mod family;
mod ffwd;
mod grn;
pub mod keys;
mod plant;
mod qic;
pub mod reference;
mod repro;
mod signal;

pub use error::ModelError;
pub use family::{AnySystem, Model, ModelFamily};
pub use ffwd::{build_ffwd, ffwd_steady_state, titration_d1, Ffwd, FfwdParams, FfwdSteady, FfwdVariant};
pub use grn::{build_grn, highgain_envelope, Grn, GrnInput, GrnParams};
pub use keys::ParamKeys;
pub use plant::{build_plant, Plant, PlantParams};
pub use qic::{build_qic, calibrate_open_loop, mm_cycle_rate, Loop, Qic, QicParams, ZeroOrderReport};
pub use repro::{build_repro, repro_steady_state, Repro, ReproMode, ReproParams, ReproSteady};
pub use signal::{DisturbanceInputs, Schedule, Signal};
