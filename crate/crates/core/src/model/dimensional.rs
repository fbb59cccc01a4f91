use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::squeeze::Squeeze;
use crate::error::{Error, Result};

/// Dimensional rates, speeds and turning frequencies of the mesoscopic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalParams {
    /// Constant source of antigen-presenting cells.
    pub alpha: f64,
    pub p12: f64,
    pub p31: f64,
    pub p21: f64,
    /// Cytokine production per A-R encounter.
    pub pc2: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// Cytokine decay.
    pub dc: f64,
    pub d13: f64,
    pub d23: f64,
    pub b52: f64,
    pub b62: f64,
    pub r5: f64,
    pub r6: f64,
    /// Packing bound of leukocytes.
    pub r_m: f64,
    /// Total myelin.
    pub e_bar: f64,
    /// Maximum leukocyte speed.
    pub v_cap: f64,
    /// Maximum cytokine speed.
    pub w_cap: f64,
    /// Leukocyte turning rate.
    pub lambda: f64,
    /// Cytokine turning rate.
    pub sigma: f64,
    /// Microscopic chemotactic rate.
    pub gamma: f64,
    /// Space dimension.
    pub n: u32,
    #[serde(default)]
    pub squeeze: Squeeze,
}

impl DimensionalParams {
    /// A dimensional set whose dimensionless image is [`ModelParams::paper`]:
    /// unit time, length and density scales, `D_R = 1`, `D_C = 0.1`, `chi = 6`.
    pub fn paper_reference() -> Self {
        DimensionalParams {
            alpha: 1.0,
            p12: 0.2,
            p31: 2.01,
            p21: 1.0,
            pc2: 1.0,
            d1: 2.0,
            d2: 0.42,
            d3: 1.0,
            dc: 0.5,
            d13: 1.0,
            d23: 1.0,
            b52: 1.0,
            b62: 30.0,
            r5: 0.001,
            r6: 0.02,
            r_m: 1.0,
            e_bar: 1.0,
            v_cap: 1.0,
            w_cap: 1.0,
            lambda: 1.0 / 3.0,
            sigma: 10.0 / 3.0,
            gamma: 12.0,
            n: 1,
            squeeze: Squeeze::Cosine,
        }
    }

    /// Dimensional constants with unit time, length and density scales whose
    /// dimensionless image is `p`: `V = W = 1`, `D_R = 1`, `D_C = delta`,
    /// `gamma = 2 xi` in one dimension.
    pub fn unit_scale(p: &ModelParams) -> Self {
        DimensionalParams {
            alpha: 1.0,
            p12: p.beta,
            p31: p.mu,
            p21: p.eta,
            pc2: 1.0,
            d1: p.zeta,
            d2: p.theta,
            d3: 1.0,
            dc: p.tau,
            d13: 1.0,
            d23: p.phi,
            b52: 1.0,
            b62: p.theta_cap,
            r5: p.omega_cap,
            r6: p.xi_cap,
            r_m: 1.0,
            e_bar: 1.0,
            v_cap: 1.0,
            w_cap: 1.0,
            lambda: 1.0 / 3.0,
            sigma: 1.0 / (3.0 * p.delta),
            gamma: 2.0 * p.xi,
            n: 1,
            squeeze: p.squeeze,
        }
    }

    pub fn named(&self) -> [(&'static str, f64); 22] {
        [
            ("alpha", self.alpha),
            ("p12", self.p12),
            ("p31", self.p31),
            ("p21", self.p21),
            ("pC2", self.pc2),
            ("d1", self.d1),
            ("d2", self.d2),
            ("d3", self.d3),
            ("dC", self.dc),
            ("d13", self.d13),
            ("d23", self.d23),
            ("b52", self.b52),
            ("b62", self.b62),
            ("r5", self.r5),
            ("r6", self.r6),
            ("R_M", self.r_m),
            ("E_bar", self.e_bar),
            ("V_cap", self.v_cap),
            ("W_cap", self.w_cap),
            ("lambda", self.lambda),
            ("sigma", self.sigma),
            ("gamma", self.gamma),
        ]
    }

    /// All rates positive and finite, `n` in 1..=3. `gamma = 0` is accepted
    /// (chemotaxis switched off).
    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named() {
            if !value.is_finite() || value < 0.0 || (value == 0.0 && name != "gamma") {
                return Err(Error::param(
                    name,
                    format!("must be positive and finite, got {value}"),
                ));
            }
        }
        if !(1..=3).contains(&self.n) {
            return Err(Error::param(
                "n",
                format!("space dimension must be 1, 2 or 3, got {}", self.n),
            ));
        }
        Ok(())
    }

    /// Measure of the velocity ball of radius `V_cap`.
    pub fn omega(&self) -> f64 {
        ball_measure(self.v_cap, self.n)
    }

    pub fn diffusion_r(&self) -> f64 {
        self.v_cap * self.v_cap / ((self.n as f64 + 2.0) * self.lambda)
    }

    pub fn diffusion_c(&self) -> f64 {
        self.w_cap * self.w_cap / ((self.n as f64 + 2.0) * self.sigma)
    }

    pub fn chi(&self) -> f64 {
        let n1 = self.n as f64 + 1.0;
        self.gamma * self.omega() * self.v_cap / (n1 * n1)
    }

    /// Local reaction rates of the dimensional limit system at
    /// `(A, S, R, C, E)`.
    pub fn reaction_terms(&self, state: [f64; 5]) -> [f64; 5] {
        let [a, s, r, c, e] = state;
        [
            self.alpha + self.p12 * a * r - self.d13 * a * s - self.d1 * a,
            self.p31 * s * a - self.d3 * s,
            self.p21 * r * a - self.d23 * r * s - self.d2 * r,
            self.pc2 * a * r - self.dc * c,
            (self.e_bar - e) * self.b52 * self.b62 * r * r / (self.r5 + self.b52 * r) - self.r6 * e,
        ]
    }

    pub fn scales(&self) -> DensityScales {
        DensityScales {
            a: self.alpha / self.d3,
            s: self.d3 / self.d13,
            r: self.r_m,
            c: self.pc2 * self.alpha * self.r_m / (self.d3 * self.d3),
            e: self.e_bar,
            time: 1.0 / self.d3,
            length: (self.diffusion_r() / self.d3).sqrt(),
        }
    }
}

impl Default for DimensionalParams {
    fn default() -> Self {
        Self::paper_reference()
    }
}

/// `|V B^n|`: length, area or volume of the ball of radius `v`.
pub fn ball_measure(v: f64, n: u32) -> f64 {
    match n {
        1 => 2.0 * v,
        2 => PI * v * v,
        _ => 4.0 * PI * v * v * v / 3.0,
    }
}

/// Units of the dimensionless variables: a dimensional quantity equals its
/// dimensionless value times the matching scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityScales {
    pub a: f64,
    pub s: f64,
    pub r: f64,
    pub c: f64,
    pub e: f64,
    pub time: f64,
    pub length: f64,
}

impl DensityScales {
    fn as_array(&self) -> [f64; 5] {
        [self.a, self.s, self.r, self.c, self.e]
    }

    pub fn to_dimensional(&self, state: [f64; 5]) -> [f64; 5] {
        let k = self.as_array();
        std::array::from_fn(|i| state[i] * k[i])
    }

    pub fn to_dimensionless(&self, state: [f64; 5]) -> [f64; 5] {
        let k = self.as_array();
        std::array::from_fn(|i| state[i] / k[i])
    }
}

fn ratio(num: f64, den: f64, den_name: &str) -> Result<f64> {
    if den == 0.0 {
        Err(Error::param(
            den_name,
            "appears in a denominator and must be nonzero",
        ))
    } else {
        Ok(num / den)
    }
}

/// Maps dimensional constants to the twelve dimensionless coefficients.
///
/// The myelin damage coefficient carries a factor `R_M` (`b62 * R_M / d3`):
/// it is what rescaling `R` by `R_M` in the damage term produces.
pub fn nondimensionalize(dim: &DimensionalParams) -> Result<ModelParams> {
    for (name, value) in dim.named() {
        if !value.is_finite() {
            return Err(Error::param(name, format!("must be finite, got {value}")));
        }
    }
    if !(1..=3).contains(&dim.n) {
        return Err(Error::param(
            "n",
            format!("space dimension must be 1, 2 or 3, got {}", dim.n),
        ));
    }
    let d3 = dim.d3;
    let d3sq = d3 * d3;
    if dim.lambda == 0.0 {
        return Err(Error::param(
            "lambda",
            "appears in a denominator and must be nonzero",
        ));
    }
    if dim.sigma == 0.0 {
        return Err(Error::param(
            "sigma",
            "appears in a denominator and must be nonzero",
        ));
    }
    let d_r = dim.diffusion_r();
    if d_r == 0.0 {
        return Err(Error::param("V_cap", "leukocyte diffusivity vanishes"));
    }
    Ok(ModelParams {
        beta: ratio(dim.r_m * dim.p12, d3, "d3")?,
        zeta: ratio(dim.d1, d3, "d3")?,
        mu: ratio(dim.p31 * dim.alpha, d3sq, "d3")?,
        delta: dim.diffusion_c() / d_r,
        tau: ratio(dim.dc, d3, "d3")?,
        xi: ratio(dim.chi() * dim.pc2 * dim.alpha * dim.r_m, d_r * d3sq, "d3")?,
        eta: ratio(dim.p21 * dim.alpha, d3sq, "d3")?,
        phi: ratio(dim.d23, dim.d13, "d13")?,
        theta: ratio(dim.d2, d3, "d3")?,
        theta_cap: ratio(dim.b62 * dim.r_m, d3, "d3")?,
        omega_cap: ratio(
            dim.r5,
            dim.r_m * dim.b52,
            if dim.r_m == 0.0 { "R_M" } else { "b52" },
        )?,
        xi_cap: ratio(dim.r6, d3, "d3")?,
        squeeze: dim.squeeze,
    })
}
