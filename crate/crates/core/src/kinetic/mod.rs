//! Discrete-velocity solver for the scaled mesoscopic system in one space
//! dimension, and the experiments that compare its moments with the
//! macroscopic limit.

mod limit;
mod operators;
mod reference;
mod solver;
mod state;
mod velocity;

pub use limit::{
    chemotactic_drift, diffusive_limit_error, kinetic_simulate, mode_decay, smooth_initial, Drift,
    EpsRun, KineticRecord, KineticRecordMeta, LimitEntry, LimitOptions, LimitReport, ModeDecay,
};
pub use operators::{turning_l0_r, turning_l1_r, turning_lc, turning_rate_r};
pub use reference::{
    macro_advance, macro_dt_limit, macro_rhs, MacroClosure, MacroCoefficients, MacroState,
};
pub use solver::{
    kinetic_dt_bound, kinetic_rhs, KineticDerivative, KineticOptions, KineticRunStats,
    KineticStepper, KineticTransport,
};
pub use state::{myelin_split, KineticState};
pub use velocity::VelocityGrid;
