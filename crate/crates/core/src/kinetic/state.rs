use serde::{Deserialize, Serialize};

use super::velocity::VelocityGrid;
use crate::error::{Error, Result};
use crate::model::DimensionalParams;
use crate::pde::{FieldState, Grid1D};

/// Velocity-resolved leukocytes and cytokines plus the local populations.
/// Distributions are stored cell-major: `fr[i * M + j]` is cell `i`,
/// velocity node `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticState {
    pub t: f64,
    pub eps: f64,
    pub grid: Grid1D,
    pub vr: VelocityGrid,
    pub vc: VelocityGrid,
    pub fr: Vec<f64>,
    pub fc: Vec<f64>,
    pub a: Vec<f64>,
    pub s: Vec<f64>,
    /// Sane myelin.
    pub e1: Vec<f64>,
    /// Partially damaged myelin.
    pub e2: Vec<f64>,
    /// Destroyed myelin.
    pub e: Vec<f64>,
}

/// Splits intact myelin `E_bar - E` into sane and partially damaged parts at
/// their exchange balance `r5 E2 = b52 E1 R`.
pub fn myelin_split(e_bar: f64, e: f64, r: f64, dim: &DimensionalParams) -> (f64, f64) {
    let intact = e_bar - e;
    let e2 = intact * dim.b52 * r / (dim.r5 + dim.b52 * r);
    (intact - e2, e2)
}

impl KineticState {
    /// Velocity-uniform lift of dimensional macroscopic fields:
    /// `f_R = R / (2 V)`, `f_C = C / (2 W)`.
    pub fn lift(
        fields: &FieldState,
        dim: &DimensionalParams,
        grid: &Grid1D,
        eps: f64,
        velocities_r: usize,
        velocities_c: usize,
    ) -> Result<Self> {
        if fields.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "{} cells against a grid of {}",
                fields.len(),
                grid.n
            )));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::param("eps", format!("must be positive, got {eps}")));
        }
        if dim.n != 1 {
            return Err(Error::param("n", "the kinetic solver is one-dimensional"));
        }
        let vr = VelocityGrid::new(dim.v_cap, velocities_r)?;
        let vc = VelocityGrid::new(dim.w_cap, velocities_c)?;
        let n = grid.n;
        let mut fr = Vec::with_capacity(n * vr.len());
        let mut fc = Vec::with_capacity(n * vc.len());
        for i in 0..n {
            fr.extend(std::iter::repeat_n(fields.r[i] / vr.omega, vr.len()));
            fc.extend(std::iter::repeat_n(fields.c[i] / vc.omega, vc.len()));
        }
        let (mut e1, mut e2) = (vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            (e1[i], e2[i]) = myelin_split(dim.e_bar, fields.e[i], fields.r[i], dim);
        }
        Ok(KineticState {
            t: fields.t,
            eps,
            grid: *grid,
            vr,
            vc,
            fr,
            fc,
            a: fields.a.clone(),
            s: fields.s.clone(),
            e1,
            e2,
            e: fields.e.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.grid.n
    }

    pub fn is_empty(&self) -> bool {
        self.grid.n == 0
    }

    pub fn fr_cell(&self, i: usize) -> &[f64] {
        let m = self.vr.len();
        &self.fr[i * m..(i + 1) * m]
    }

    pub fn fc_cell(&self, i: usize) -> &[f64] {
        let m = self.vc.len();
        &self.fc[i * m..(i + 1) * m]
    }

    pub fn density_r(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.vr.integrate(self.fr_cell(i)))
            .collect()
    }

    pub fn density_c(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.vc.integrate(self.fc_cell(i)))
            .collect()
    }

    /// Macroscopic densities `(A, S, R, C, E)`.
    pub fn moments(&self) -> FieldState {
        FieldState {
            t: self.t,
            a: self.a.clone(),
            s: self.s.clone(),
            r: self.density_r(),
            c: self.density_c(),
            e: self.e.clone(),
        }
    }

    /// Fluxes `int v f dv` of leukocytes and cytokines.
    pub fn flux_moments(&self) -> (Vec<f64>, Vec<f64>) {
        let jr = (0..self.len())
            .map(|i| self.vr.first_moment(self.fr_cell(i)))
            .collect();
        let jc = (0..self.len())
            .map(|i| self.vc.first_moment(self.fc_cell(i)))
            .collect();
        (jr, jc)
    }

    /// Largest `|E1 + E2 + E - E_bar|` over cells.
    pub fn myelin_defect(&self, e_bar: f64) -> f64 {
        (0..self.len()).fold(0.0f64, |m, i| {
            m.max((self.e1[i] + self.e2[i] + self.e[i] - e_bar).abs())
        })
    }

    pub fn negative_entries(&self) -> usize {
        self.fr.iter().chain(&self.fc).filter(|v| **v < 0.0).count()
    }
}
