//! Analyses layered on the model catalog.

mod adaptation;
mod bifurcation;
mod ensemble;
mod error;
mod hidden;
pub mod rng;

pub use adaptation::{adaptation_curve, AdaptationCurve, Channel};
pub use bifurcation::{bifurcation_sweep, BifurcationDiagram, BifurcationEvent, Branch, BranchPoint};
pub use ensemble::{ensemble_run, EnsembleSummary, Histogram, HISTOGRAM_BINS};
pub use error::AnalysisError;
pub use hidden::{hidden_integral_trace, v_ref, HiddenIntegralTrace};
