//! The reaction system without transport: direct integration, the
//! forward-Euler positivity harness, closed-form cytokine and myelin
//! populations, and the reduced two-field `(R, C)` system.

mod closed_form;
mod harness;
mod ode;
mod reduced;

pub use closed_form::{
    appendix_check, closed_form_nc, closed_form_ne, AppendixCheck, ClosedForm, QUADRATURE_TOL,
};
pub use harness::{
    euler_pointwise, euler_positivity_harness, euler_run, positivity_sweep, EulerRun,
    PositivityReport, PositivitySweep,
};
pub use ode::{
    integrate, ode_simulate, oscillation_period, rk4_step, PopulationSystem, Trajectory,
};
pub use reduced::{reduced_system, ReducedForm, ReducedSystem};
