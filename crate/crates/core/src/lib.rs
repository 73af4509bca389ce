//! Simulation and verification toolkit for stochastic flows generated by SDEs
//! with singular (localized-`L_p`) drift.
//!
//! The crate is organised around the pipeline a study usually follows:
//!
//! * [`model`] holds coefficient fields with their analytic metadata and the
//!   numerical probes (localized norms, ellipticity, Hölder modulus, radial
//!   drift profiles).
//! * [`simulate`] evolves whole ensembles of initial conditions under one
//!   shared Brownian path, forward and in pullback form.
//! * [`constants`] evaluates the closed-form constants and thresholds.
//! * [`dispersion`], [`krylov`] and [`attractor`] turn simulations into
//!   Monte Carlo checks of rate functions, occupation bounds and
//!   absorption/expansion events.
//! * [`elliptic`] is a finite-difference resolvent solver and builds the
//!   numerical Zvonkin transform.
//! * [`cli`] wires everything to declarative scenario files.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod attractor;
pub mod cli;
pub mod constants;
pub mod dispersion;
pub mod elliptic;
pub mod error;
pub mod krylov;
pub mod mesh;
pub mod model;
pub mod plot;
pub mod seed;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use model::SdeModel;
pub use simulate::{FlowEnsemble, NoisePath, Taming, TimeGrid};
