//! Linear stability of the homogeneous equilibrium: Routh–Hurwitz, Hopf
//! thresholds, the dispersion function, the Turing threshold on the
//! chemotactic sensitivity, and bifurcation diagrams in `(theta, xi)`.

mod bifurcation;
mod linear;
mod report;

pub use bifurcation::{
    bifurcation_diagram, classify, BifurcationCell, BifurcationClass, BifurcationDiagram,
    BoundaryCurves,
};
pub use linear::{
    dispersion_h, fastest_neumann_mode, growth_rates, hopf_period, linearize, linearize_with,
    neumann_wavenumbers, routh_hurwitz, spectrum, theta_hopf, turing_threshold_xi, turing_unstable,
    unstable_band, DispersionRelation, FastestMode, GrowthRate, JacobianForm, LinearizedSystem,
    RouthHurwitz,
};
pub use report::{DispersionPoint, ReportOptions, StabilityReport};
