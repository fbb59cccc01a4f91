use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear::{routh_hurwitz, theta_hopf, turing_threshold_xi};
use crate::error::{Error, Result};
use crate::io;
use crate::model::{admissibility_bounds, equilibrium, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BifurcationClass {
    Inadmissible,
    HomogeneousUnstable,
    Stable,
    Turing,
}

impl BifurcationClass {
    pub fn name(self) -> &'static str {
        match self {
            BifurcationClass::Inadmissible => "inadmissible",
            BifurcationClass::HomogeneousUnstable => "homogeneous-unstable",
            BifurcationClass::Stable => "stable",
            BifurcationClass::Turing => "turing",
        }
    }
}

/// Classifies one `(theta, xi)` point. At `xi == xi*` the point is stable.
pub fn classify(p: &ModelParams) -> BifurcationClass {
    let eq = equilibrium(p);
    if !eq.admissible {
        return BifurcationClass::Inadmissible;
    }
    if !routh_hurwitz(p).homogeneous_stable {
        return BifurcationClass::HomogeneousUnstable;
    }
    match turing_threshold_xi(p) {
        Some(xs) if p.xi > xs => BifurcationClass::Turing,
        _ => BifurcationClass::Stable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCell {
    pub theta: f64,
    pub xi: f64,
    pub class: BifurcationClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurves {
    pub theta_bar: f64,
    pub theta_bar_minus_beta_phi: f64,
    pub theta_minus: Option<f64>,
    pub theta_plus: Option<f64>,
    /// `(theta, xi*)` along the theta axis; `None` where undefined.
    pub xi_star: Vec<(f64, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub thetas: Vec<f64>,
    pub xis: Vec<f64>,
    /// Row-major in `theta`, then `xi`.
    pub cells: Vec<BifurcationCell>,
    pub boundaries: BoundaryCurves,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Classifies a `theta x xi` grid in parallel. The result order does not
/// depend on scheduling.
pub fn bifurcation_diagram(
    base: &ModelParams,
    theta_range: (f64, f64),
    xi_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<BifurcationDiagram> {
    let (nt, nx) = resolution;
    if nt < 2 || nx < 2 {
        return Err(Error::Invalid(format!(
            "resolution must be at least 2 per axis, got {nt} x {nx}"
        )));
    }
    for (name, (lo, hi)) in [("theta", theta_range), ("xi", xi_range)] {
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::Invalid(format!(
                "{name} range [{lo}, {hi}] is not a finite interval"
            )));
        }
    }
    let thetas = linspace(theta_range.0, theta_range.1, nt);
    let xis = linspace(xi_range.0, xi_range.1, nx);
    let cells: Vec<BifurcationCell> = (0..nt * nx)
        .into_par_iter()
        .map(|idx| {
            let (theta, xi) = (thetas[idx / nx], xis[idx % nx]);
            let p = base.with_theta(theta).with_xi(xi);
            BifurcationCell {
                theta,
                xi,
                class: classify(&p),
            }
        })
        .collect();

    let (theta_bar, theta_low) = admissibility_bounds(base);
    let hopf = theta_hopf(base);
    let xi_star = thetas
        .par_iter()
        .map(|&t| (t, turing_threshold_xi(&base.with_theta(t))))
        .collect();
    Ok(BifurcationDiagram {
        thetas,
        xis,
        cells,
        boundaries: BoundaryCurves {
            theta_bar,
            theta_bar_minus_beta_phi: theta_low,
            theta_minus: hopf.map(|h| h.0),
            theta_plus: hopf.map(|h| h.1),
            xi_star,
        },
    })
}

impl BifurcationDiagram {
    pub fn class_at(&self, i_theta: usize, i_xi: usize) -> BifurcationClass {
        self.cells[i_theta * self.xis.len() + i_xi].class
    }

    /// `theta,xi,class` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        io::write_csv_text(
            path,
            &["theta", "xi", "class"],
            self.cells.iter().map(|c| {
                vec![
                    io::fmt_f64(c.theta),
                    io::fmt_f64(c.xi),
                    c.class.name().to_string(),
                ]
            }),
        )
    }

    /// `theta,xi_star` rows, empty cell where undefined.
    pub fn write_boundary_csv(&self, path: &Path) -> Result<()> {
        io::write_csv_text(
            path,
            &["theta", "xi_star"],
            self.boundaries
                .xi_star
                .iter()
                .map(|(t, x)| vec![io::fmt_f64(*t), x.map(io::fmt_f64).unwrap_or_default()]),
        )
    }
}
