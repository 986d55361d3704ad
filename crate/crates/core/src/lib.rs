//! Numerical experiments on entropy, correlations and the direction of heat
//! flow between finite quantum systems, plus a Monte Carlo model of
//! momentum-correlated collisions in a dilute gas.
//!
//! Modules, bottom up:
//! - [`qmath`]: dense complex linear algebra and seeded random objects;
//! - [`states`]: density operators, Gibbs states, entropies;
//! - [`inequalities`]: ensemble checks of entropic inequalities;
//! - [`exchange`]: heat exchange between correlated or uncorrelated pairs,
//!   and the reservoir-cycle runner;
//! - [`gas`]: collision kinematics and the gas ensembles.

pub mod error;
pub mod exchange;
pub mod gas;
pub mod inequalities;
pub mod qmath;
pub mod states;

pub use error::{Error, Result};
