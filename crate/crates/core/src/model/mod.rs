//! Dimensionless model: parameters, reaction terms, squeeze functions and the
//! homogeneous equilibrium.

mod dimensional;
mod equilibrium;
mod params;
mod squeeze;

pub use dimensional::{ball_measure, nondimensionalize, DensityScales, DimensionalParams};
pub use equilibrium::{
    admissibility_bounds, equilibrium, reaction_terms, reaction_terms_unchecked, EquilibriumPoint,
};
pub use params::ModelParams;
pub use squeeze::{squeeze_phi0, squeeze_phi1, Squeeze};
