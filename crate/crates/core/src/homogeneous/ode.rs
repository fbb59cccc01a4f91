use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::model::{reaction_terms_unchecked, DimensionalParams, ModelParams};

/// Sampled solution of a five-component ODE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 5]>,
    /// Componentwise minimum over the run.
    pub min: [f64; 5],
    /// Largest value of the third component (leukocytes).
    pub max_r: f64,
}

impl Trajectory {
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    pub fn last(&self) -> [f64; 5] {
        *self.states.last().unwrap()
    }

    /// Columns `t,n_A,n_S,n_R,n_C,n_E`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        io::write_csv(
            path,
            &["t", "n_A", "n_S", "n_R", "n_C", "n_E"],
            self.times.iter().zip(&self.states).map(|(t, s)| {
                let mut row = vec![*t];
                row.extend_from_slice(s);
                row
            }),
        )
    }
}

/// One classical RK4 step. The stage arithmetic matches the PDE
/// integrator, so a spatially uniform PDE state evolves bit-identically.
#[inline]
pub fn rk4_step(f: &impl Fn([f64; 5]) -> [f64; 5], u: [f64; 5], dt: f64) -> [f64; 5] {
    let axpy = |x: [f64; 5], h: f64, k: [f64; 5]| std::array::from_fn(|i| x[i] + h * k[i]);
    let k1 = f(u);
    let k2 = f(axpy(u, 0.5 * dt, k1));
    let k3 = f(axpy(u, 0.5 * dt, k2));
    let k4 = f(axpy(u, dt, k3));
    let h = dt / 6.0;
    std::array::from_fn(|i| u[i] + h * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]))
}

/// Integrates `u' = f(u)` with RK4 at a fixed step, sampling every step. The
/// final step is shortened to end at `t_end`.
pub fn integrate(
    f: impl Fn([f64; 5]) -> [f64; 5],
    initial: [f64; 5],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Invalid(format!(
            "need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let steps = (t_end / dt).ceil() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut u = initial;
    let mut t = 0.0;
    times.push(t);
    states.push(u);
    for k in 0..steps {
        let h = if k + 1 == steps { t_end - t } else { dt };
        u = rk4_step(&f, u, h);
        t = if k + 1 == steps {
            t_end
        } else {
            (k + 1) as f64 * dt
        };
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                t,
                dt,
                field: ["A", "S", "R", "C", "E"][i].to_string(),
            });
        }
        times.push(t);
        states.push(u);
    }
    let mut min = [f64::INFINITY; 5];
    let mut max_r = f64::NEG_INFINITY;
    for s in &states {
        for i in 0..5 {
            min[i] = min[i].min(s[i]);
        }
        max_r = max_r.max(s[2]);
    }
    Ok(Trajectory {
        times,
        states,
        min,
        max_r,
    })
}

/// Reaction-only dimensionless system.
pub fn ode_simulate(p: &ModelParams, initial: [f64; 5], t_end: f64, dt: f64) -> Result<Trajectory> {
    if initial.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::param("initial", "all components must be >= 0"));
    }
    integrate(|u| reaction_terms_unchecked(u, p), initial, t_end, dt)
}

/// Whole-population system: densities multiplied by the volume `|V|`.
/// Bilinear and saturation coefficients are divided by `|V|`, the source
/// and the myelin capacity multiplied by it, and linear rates are unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSystem {
    pub volume: f64,
    pub alpha_star: f64,
    pub p12_star: f64,
    pub d13_star: f64,
    pub d1: f64,
    pub p31_star: f64,
    pub d3: f64,
    pub p21_star: f64,
    pub d23_star: f64,
    pub d2: f64,
    pub pc2_star: f64,
    pub dc: f64,
    pub b62_star: f64,
    pub b52_star: f64,
    pub r5: f64,
    pub r6: f64,
    pub n_e_hat: f64,
}

impl PopulationSystem {
    pub fn new(dim: &DimensionalParams, volume: f64) -> Result<Self> {
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(Error::param(
                "volume",
                format!("must be positive, got {volume}"),
            ));
        }
        dim.validate()?;
        let v = volume;
        Ok(PopulationSystem {
            volume: v,
            alpha_star: dim.alpha * v,
            p12_star: dim.p12 / v,
            d13_star: dim.d13 / v,
            d1: dim.d1,
            p31_star: dim.p31 / v,
            d3: dim.d3,
            p21_star: dim.p21 / v,
            d23_star: dim.d23 / v,
            d2: dim.d2,
            pc2_star: dim.pc2 / v,
            dc: dim.dc,
            b62_star: dim.b62 / v,
            b52_star: dim.b52 / v,
            r5: dim.r5,
            r6: dim.r6,
            n_e_hat: dim.e_bar * v,
        })
    }

    /// Damage rate `b62* b52* n_R^2 / (r5 + b52* n_R)`.
    pub fn damage(&self, n_r: f64) -> f64 {
        self.b62_star * self.b52_star * n_r * n_r / (self.r5 + self.b52_star * n_r)
    }

    pub fn rhs(&self, n: [f64; 5]) -> [f64; 5] {
        let [a, s, r, c, e] = n;
        [
            self.alpha_star + self.p12_star * a * r - self.d13_star * a * s - self.d1 * a,
            self.p31_star * s * a - self.d3 * s,
            self.p21_star * r * a - self.d23_star * r * s - self.d2 * r,
            self.pc2_star * a * r - self.dc * c,
            (self.n_e_hat - e) * self.damage(r) - self.r6 * e,
        ]
    }

    pub fn simulate(&self, initial: [f64; 5], t_end: f64, dt: f64) -> Result<Trajectory> {
        if initial.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::param("initial", "all components must be >= 0"));
        }
        integrate(|n| self.rhs(n), initial, t_end, dt)
    }
}

/// Mean spacing of upward mean-crossings of `x` after `t_from`; `None` when
/// fewer than three crossings occur.
pub fn oscillation_period(times: &[f64], x: &[f64], t_from: f64) -> Option<f64> {
    let start = times.iter().position(|t| *t >= t_from)?;
    let (t, x) = (&times[start..], &x[start..]);
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut crossings = Vec::new();
    for k in 0..x.len().saturating_sub(1) {
        if x[k] < mean && x[k + 1] >= mean {
            let frac = (mean - x[k]) / (x[k + 1] - x[k]);
            crossings.push(t[k] + frac * (t[k + 1] - t[k]));
        }
    }
    (crossings.len() >= 3)
        .then(|| (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}
