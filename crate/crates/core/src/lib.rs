//! Simulation and analysis core for biomolecular controllers.
//!
//! The crate is `no_std` (it needs `alloc`) and is split into three layers:
//!
//! * [`ode`] - adaptive Dormand-Prince integration, steady-state detection,
//!   multi-start Newton equilibrium search and linear stability classification.
//! * [`models`] - the gene-expression plant, the phosphorylation-cycle
//!   quasi-integral controller, endoribonuclease / microRNA feedforward
//!   controllers, the lumped pluripotency network and the combined
//!   high-gain / feedforward reprogramming controller, each with closed-form
//!   steady states where one exists.
//! * [`analysis`] - bifurcation sweeps, disturbance-rejection curves, the
//!   hidden-integral diagnostic of the feedforward loop and seeded ensembles.
//!
//! File formats, the command line front end and scenario reports live in the
//! companion `biocircuit` crate.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod models;
pub mod ode;


pub use ode::{
    classify_stability, find_equilibria, integrate, simulate_to_steady_state, Equilibrium,
    IntegratorConfig, OdeError, OdeSystem, Stability, SteadyState, Trajectory,
};
