//! Method-of-lines finite-volume solver for the dimensionless system on an
//! interval with zero-flux walls, and metrics for the patterns it produces.

mod grid;
mod integrator;
mod metrics;
mod scheme;
mod simulate;
mod state;

pub use grid::Grid1D;
pub use integrator::{
    dt_bounds, DtBounds, Rk4, StepStats, DEFAULT_DT_SAFETY, NEGATIVITY_TOL, PACKING_TOL,
};
pub use metrics::{
    cosine_amplitudes, dominant_mode, fit_linear_growth, oscillation_score, pattern_metrics,
    pattern_metrics_with, variance, GrowthFit, PatternMetrics, Regime, RegimeThresholds,
};
pub use scheme::{flux_r, rhs, rhs_into, FluxScheme, RhsWorkspace};
pub use simulate::{simulate, simulate_from, RunMetadata, SimOptions, SpaceTimeRecord};
pub use state::{init_state, FieldState, FIELD_NAMES};
