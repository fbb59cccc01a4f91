//! Multiscale model of demyelinating plaque formation.
//!
//! A mesoscopic velocity-jump description of self-reactive leukocytes and
//! cytokines, its reaction-diffusion-chemotaxis limit, and the Turing analysis
//! and pattern simulations built on top of the limit system.
//!
//! - [`model`]: dimensionless parameters, reaction terms, volume-filling
//!   squeeze functions, the homogeneous equilibrium.
//! - [`stability`]: linearization, Routh–Hurwitz, Hopf thresholds, dispersion
//!   relation, Turing threshold, bifurcation diagrams.
//! - [`pde`]: finite-volume method-of-lines solver in one space dimension and
//!   pattern metrics.
//! - [`kinetic`]: discrete-velocity solver for the scaled kinetic system and
//!   diffusive-limit experiments.
//! - [`homogeneous`]: reaction-only ODE, positivity harness, closed-form
//!   oracles, reduced two-field system.
//! - [`cli`]: configuration parsing and the subcommand driver used by the
//!   `plaquesim` binary.

pub mod cli;
pub mod error;
pub mod homogeneous;
pub mod io;
pub mod kinetic;
pub mod model;
pub mod pde;
pub mod stability;

pub use error::{Error, Result};
pub use model::{DimensionalParams, EquilibriumPoint, ModelParams, Squeeze};
