use serde::{Deserialize, Serialize};

use super::squeeze::Squeeze;
use crate::error::{Error, Result};

/// The twelve dimensionless coefficients of the reaction-diffusion-chemotaxis
/// system, plus the squeeze pair.
///
/// The state ordering used throughout the crate is `(A, S, R, C, E)`:
/// activated immune cells, suppressor cells, self-reactive leukocytes,
/// cytokines, destroyed myelin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Leukocyte-driven activation of A.
    pub beta: f64,
    /// Natural decay of A.
    pub zeta: f64,
    /// Proliferation of suppressors on contact with A.
    pub mu: f64,
    /// Cytokine-to-leukocyte diffusivity ratio.
    pub delta: f64,
    /// Cytokine decay.
    pub tau: f64,
    /// Chemotactic sensitivity.
    pub xi: f64,
    /// Leukocyte proliferation on contact with A.
    pub eta: f64,
    /// Leukocyte suppression by S.
    pub phi: f64,
    /// Leukocyte natural death.
    pub theta: f64,
    /// Myelin destruction rate.
    pub theta_cap: f64,
    /// Half-saturation of the damage rate.
    pub omega_cap: f64,
    /// Myelin restoration rate.
    pub xi_cap: f64,
    #[serde(default)]
    pub squeeze: Squeeze,
}

impl ModelParams {
    /// The reference parameter set with `theta = 0.42` and `xi = 6`.
    pub fn paper() -> Self {
        ModelParams {
            beta: 0.2,
            zeta: 2.0,
            mu: 2.01,
            delta: 0.1,
            tau: 0.5,
            xi: 6.0,
            eta: 1.0,
            phi: 1.0,
            theta: 0.42,
            theta_cap: 30.0,
            omega_cap: 0.001,
            xi_cap: 0.02,
            squeeze: Squeeze::Cosine,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_squeeze(mut self, squeeze: Squeeze) -> Self {
        self.squeeze = squeeze;
        self
    }

    /// `(name, value)` pairs in the canonical order.
    pub fn named(&self) -> [(&'static str, f64); 12] {
        [
            ("beta", self.beta),
            ("zeta", self.zeta),
            ("mu", self.mu),
            ("delta", self.delta),
            ("tau", self.tau),
            ("xi", self.xi),
            ("eta", self.eta),
            ("phi", self.phi),
            ("theta", self.theta),
            ("Theta_cap", self.theta_cap),
            ("Omega_cap", self.omega_cap),
            ("Xi_cap", self.xi_cap),
        ]
    }

    /// Every coefficient must be finite and positive. `xi = 0` is accepted as
    /// the chemotaxis-free reference case, and `theta = 0` so that parameter
    /// sweeps may start at the axis.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named() {
            if !value.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {value}")));
            }
            let zero_ok = matches!(name, "xi" | "theta");
            if value < 0.0 || (value == 0.0 && !zero_ok) {
                return Err(Error::param(name, format!("must be positive, got {value}")));
            }
        }
        if self.zeta >= self.mu {
            log::warn!(
                "zeta = {} is not below mu = {}; admissibility no longer implies theta < eta/mu",
                self.zeta,
                self.mu
            );
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::paper()
    }
}
