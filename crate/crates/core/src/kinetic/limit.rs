use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::reference::{
    macro_advance, macro_dt_limit, MacroClosure, MacroCoefficients, MacroState,
};
use super::solver::{KineticOptions, KineticRunStats, KineticStepper};
use super::state::{myelin_split, KineticState};
use super::velocity::VelocityGrid;
use crate::error::{Error, Result};
use crate::io;
use crate::model::{equilibrium, nondimensionalize, DimensionalParams};
use crate::pde::{FieldState, Grid1D};

const FIELD_NAMES: [&str; 5] = ["A", "S", "R", "C", "E"];

/// Dimensional equilibrium modulated by a few random Neumann cosine modes,
/// `u = u_eq (1 + amplitude sum_m c_m cos(m pi x / L) / m)` with `c_m`
/// uniform on `[-1, 1]`, in `A, S, R, C`. `E` sits at equilibrium.
pub fn smooth_initial(
    dim: &DimensionalParams,
    grid: &Grid1D,
    seed: u64,
    amplitude: f64,
) -> Result<FieldState> {
    let p = nondimensionalize(dim)?;
    let eq = equilibrium(&p);
    eq.require_admissible()?;
    let base = dim.scales().to_dimensional(eq.as_array());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = FieldState::uniform(grid.n, base);
    for field in st.fields_mut().into_iter().take(4) {
        let coeffs: Vec<f64> = (1..=4)
            .map(|m| rng.random_range(-1.0..=1.0) / m as f64)
            .collect();
        for (i, v) in field.iter_mut().enumerate() {
            let x = grid.center(i);
            let wave: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c * ((m + 1) as f64 * PI * x / grid.length).cos())
                .sum();
            *v *= 1.0 + amplitude * wave;
        }
    }
    Ok(st)
}

fn l2_distance(grid: &Grid1D, u: &[f64], v: &[f64]) -> f64 {
    (grid.dx * u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    /// Strictly decreasing.
    pub eps_list: Vec<f64>,
    pub t_probe: f64,
    /// Solver settings; `eps` is overwritten per entry.
    pub kinetic: KineticOptions,
    pub closure: MacroClosure,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            eps_list: vec![0.1, 0.05, 0.025],
            t_probe: 1.0,
            kinetic: KineticOptions::default(),
            closure: MacroClosure::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    pub eps: f64,
    pub field: String,
    /// NaN when the kinetic run failed.
    pub l2_error: f64,
    /// `log(e_prev / e) / log(eps_prev / eps)` against the previous entry.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRun {
    pub eps: f64,
    pub stats: Option<KineticRunStats>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub coefficients: MacroCoefficients,
    pub t_probe: f64,
    pub entries: Vec<LimitEntry>,
    pub runs: Vec<EpsRun>,
}

impl LimitReport {
    /// Errors of one field in `eps_list` order.
    pub fn errors(&self, field: &str) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.field == field)
            .map(|e| e.l2_error)
            .collect()
    }

    pub fn strictly_decreasing(&self, field: &str) -> bool {
        let e = self.errors(field);
        !e.is_empty() && e.iter().all(|v| v.is_finite()) && e.windows(2).all(|w| w[1] < w[0])
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self.entries.iter().map(|e| {
            vec![
                io::fmt_f64(e.eps),
                e.field.clone(),
                io::fmt_f64(e.l2_error),
                e.observed_order.map_or_else(String::new, io::fmt_f64),
            ]
        });
        io::write_csv_text(path, &["eps", "field", "L2_error", "observed_order"], rows)
    }
}

/// Runs the kinetic solver from the velocity-uniform lift of `initial` for
/// every `eps` and compares the moments at `t_probe` with the macroscopic
/// reference started from the same data. Runs go in parallel; entries keep
/// the order of `eps_list`.
pub fn diffusive_limit_error(
    dim: &DimensionalParams,
    grid: &Grid1D,
    initial: &FieldState,
    opts: &LimitOptions,
) -> Result<LimitReport> {
    if opts.eps_list.is_empty() || opts.eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param(
            "eps_list",
            "must be non-empty and strictly decreasing",
        ));
    }
    if !(opts.t_probe > 0.0 && opts.t_probe.is_finite()) {
        return Err(Error::param("t_probe", "must be positive"));
    }
    let vr = VelocityGrid::new(dim.v_cap, opts.kinetic.velocities_r)?;
    let vc = VelocityGrid::new(dim.w_cap, opts.kinetic.velocities_c)?;
    let coef = MacroCoefficients::new(dim, opts.closure, &vr, &vc);
    let e1 = (0..grid.n)
        .map(|i| myelin_split(dim.e_bar, initial.e[i], initial.r[i], dim).0)
        .collect();
    let mut reference = MacroState {
        fields: initial.clone(),
        e1,
    };
    let dt = 0.1 * macro_dt_limit(dim, grid, &coef);
    macro_advance(
        &mut reference,
        dim,
        grid,
        &coef,
        opts.kinetic.interactions,
        opts.kinetic.freeze_c,
        opts.t_probe,
        dt,
    )?;

    let outcomes: Vec<Result<(FieldState, KineticRunStats)>> = opts
        .eps_list
        .par_iter()
        .map(|&eps| {
            let kopts = KineticOptions {
                eps,
                ..opts.kinetic.clone()
            };
            let mut st = KineticState::lift(
                initial,
                dim,
                grid,
                eps,
                kopts.velocities_r,
                kopts.velocities_c,
            )?;
            let mut stepper = KineticStepper::new(&st, kopts)?;
            let stats = stepper.advance(&mut st, dim, opts.t_probe)?;
            Ok((st.moments(), stats))
        })
        .collect();

    let mut entries = Vec::new();
    let mut runs = Vec::new();
    let mut previous: Option<(f64, [f64; 5])> = None;
    for (&eps, outcome) in opts.eps_list.iter().zip(outcomes) {
        let errors = match outcome {
            Ok((moments, stats)) => {
                runs.push(EpsRun {
                    eps,
                    stats: Some(stats),
                    error: None,
                });
                let ours = moments.fields();
                let theirs = reference.fields.fields();
                std::array::from_fn(|f| l2_distance(grid, ours[f], theirs[f]))
            }
            Err(err) => {
                runs.push(EpsRun {
                    eps,
                    stats: None,
                    error: Some(err.to_string()),
                });
                [f64::NAN; 5]
            }
        };
        for (f, name) in FIELD_NAMES.iter().enumerate() {
            let observed_order = previous
                .map(|(pe, perr)| (perr[f] / errors[f]).ln() / (pe / eps).ln())
                .filter(|v| v.is_finite());
            entries.push(LimitEntry {
                eps,
                field: name.to_string(),
                l2_error: errors[f],
                observed_order,
            });
        }
        previous = Some((eps, errors));
    }
    Ok(LimitReport {
        coefficients: coef,
        t_probe: opts.t_probe,
        entries,
        runs,
    })
}

/// Amplitude of `cos(k x)` in `u` on the cell centres.
fn cosine_amplitude(grid: &Grid1D, u: &[f64], k: f64) -> f64 {
    2.0 / grid.n as f64
        * u.iter()
            .enumerate()
            .map(|(i, v)| v * (k * grid.center(i)).cos())
            .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeDecay {
    pub eps: f64,
    pub mode: usize,
    pub k: f64,
    pub rate_r: f64,
    pub rate_c: f64,
    /// Measured `rate / k^2`, the leukocyte one divided by `Phi0` of the mean.
    pub d_r_measured: f64,
    pub d_c_measured: f64,
    /// `V^2 / (3 lambda)` and `W^2 / (3 sigma)`.
    pub d_r: f64,
    pub d_c: f64,
}

impl ModeDecay {
    pub fn rel_error_r(&self) -> f64 {
        (self.d_r_measured / self.d_r - 1.0).abs()
    }

    pub fn rel_error_c(&self) -> f64 {
        (self.d_c_measured / self.d_c - 1.0).abs()
    }
}

/// Pure transport: no interactions, no chemotaxis, a single cosine mode
/// `cos(m pi x / L)` on top of a dilute leukocyte level and a unit
/// cytokine level. Decay rates are fitted between `t_end / 4` and `t_end`,
/// after the initial layer.
pub fn mode_decay(
    dim: &DimensionalParams,
    grid: &Grid1D,
    eps: f64,
    mode: usize,
    t_end: f64,
    velocities: usize,
) -> Result<ModeDecay> {
    if mode == 0 {
        return Err(Error::param("mode", "must be at least 1"));
    }
    let dim = DimensionalParams {
        gamma: 0.0,
        ..dim.clone()
    };
    let k = mode as f64 * PI / grid.length;
    let r_bar = 1e-3 * dim.r_m;
    let c_bar = 1.0;
    let mut init = FieldState::zeros(grid.n);
    for i in 0..grid.n {
        let wave = (k * grid.center(i)).cos();
        init.r[i] = r_bar * (1.0 + 0.5 * wave);
        init.c[i] = c_bar * (1.0 + 0.5 * wave);
    }
    let opts = KineticOptions {
        eps,
        velocities_r: velocities,
        velocities_c: velocities,
        interactions: false,
        ..KineticOptions::default()
    };
    let mut st = KineticState::lift(&init, &dim, grid, eps, velocities, velocities)?;
    let mut stepper = KineticStepper::new(&st, opts)?;
    let t1 = 0.25 * t_end;
    stepper.advance(&mut st, &dim, t1)?;
    let (r1, c1) = (
        cosine_amplitude(grid, &st.density_r(), k),
        cosine_amplitude(grid, &st.density_c(), k),
    );
    stepper.advance(&mut st, &dim, t_end - t1)?;
    let (r2, c2) = (
        cosine_amplitude(grid, &st.density_r(), k),
        cosine_amplitude(grid, &st.density_c(), k),
    );
    let span = t_end - t1;
    let rate_r = (r1 / r2).ln() / span;
    let rate_c = (c1 / c2).ln() / span;
    let phi0 = dim.squeeze.phi0(r_bar / dim.r_m)?;
    Ok(ModeDecay {
        eps,
        mode,
        k,
        rate_r,
        rate_c,
        d_r_measured: rate_r / (k * k * phi0),
        d_c_measured: rate_c / (k * k),
        d_r: dim.diffusion_r(),
        d_c: dim.diffusion_c(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub eps: f64,
    pub gradient: f64,
    pub measured: f64,
    /// `chi_k Phi0 Phi1 dC` with `chi_k = gamma sum(w v^2) / V`.
    pub kinetic_prediction: f64,
    /// `chi Phi1 dC` with `chi = gamma omega V / 4`.
    pub nominal_prediction: f64,
}

impl Drift {
    pub fn rel_error_kinetic(&self) -> f64 {
        (self.measured / self.kinetic_prediction - 1.0).abs()
    }

    pub fn rel_error_nominal(&self) -> f64 {
        (self.measured / self.nominal_prediction - 1.0).abs()
    }
}

/// Centroid velocity of a dilute Gaussian leukocyte bump climbing a frozen
/// linear cytokine profile `C = gradient * x`, interactions off. Measured
/// between `t_end / 4` and `t_end`.
pub fn chemotactic_drift(
    dim: &DimensionalParams,
    grid: &Grid1D,
    eps: f64,
    gradient: f64,
    t_end: f64,
    velocities: usize,
) -> Result<Drift> {
    if !(gradient >= 0.0) {
        return Err(Error::param(
            "gradient",
            "must be non-negative so that C stays non-negative",
        ));
    }
    let height = 1e-3 * dim.r_m;
    let x0 = grid.length / 3.0;
    let mut init = FieldState::zeros(grid.n);
    for i in 0..grid.n {
        let x = grid.center(i);
        init.r[i] = height * (-0.5 * (x - x0) * (x - x0)).exp();
        init.c[i] = gradient * x;
    }
    let opts = KineticOptions {
        eps,
        velocities_r: velocities,
        velocities_c: velocities,
        interactions: false,
        freeze_c: true,
        ..KineticOptions::default()
    };
    let mut st = KineticState::lift(&init, dim, grid, eps, velocities, velocities)?;
    let mut stepper = KineticStepper::new(&st, opts)?;
    let centroid = |st: &KineticState| {
        let r = st.density_r();
        let mass: f64 = r.iter().sum();
        r.iter()
            .enumerate()
            .map(|(i, v)| grid.center(i) * v)
            .sum::<f64>()
            / mass
    };
    let t1 = 0.25 * t_end;
    stepper.advance(&mut st, dim, t1)?;
    let x1 = centroid(&st);
    stepper.advance(&mut st, dim, t_end - t1)?;
    let x2 = centroid(&st);
    let rel = height / dim.r_m;
    let sq = dim.squeeze;
    let chi_k = dim.gamma * st.vr.second_moment() / dim.v_cap;
    Ok(Drift {
        eps,
        gradient,
        measured: (x2 - x1) / (t_end - t1),
        kinetic_prediction: chi_k * sq.phi0(rel)? * sq.phi1(rel)? * gradient,
        nominal_prediction: dim.chi() * sq.phi1(rel)? * gradient,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticRecordMeta {
    pub options: KineticOptions,
    pub grid: Grid1D,
    pub stats: KineticRunStats,
}

/// Snapshots of the moments and of the fluxes `J_R`, `J_C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticRecord {
    pub times: Vec<f64>,
    pub fields: BTreeMap<String, Vec<Vec<f64>>>,
    pub metadata: KineticRecordMeta,
}

impl KineticRecord {
    /// `<stem>_<field>.csv` per field and `<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        for (name, rows) in &self.fields {
            let path = dir.join(format!("{stem}_{name}.csv"));
            io::write_space_time_csv(&path, &self.times, rows)?;
            paths.push(path);
        }
        let meta = dir.join(format!("{stem}.json"));
        io::write_json(&meta, &self.metadata)?;
        paths.push(meta);
        Ok(paths)
    }
}

fn push_snapshot(fields: &mut BTreeMap<String, Vec<Vec<f64>>>, st: &KineticState) {
    let m = st.moments();
    let (jr, jc) = st.flux_moments();
    for (name, u) in FIELD_NAMES.iter().zip(m.fields()) {
        fields.entry(name.to_string()).or_default().push(u.clone());
    }
    fields.entry("J_R".into()).or_default().push(jr);
    fields.entry("J_C".into()).or_default().push(jc);
}

/// Lifts `initial` and runs the kinetic solver to `t_end`, snapshotting
/// every `snapshot_every` and at the end.
pub fn kinetic_simulate(
    initial: &FieldState,
    dim: &DimensionalParams,
    grid: &Grid1D,
    opts: &KineticOptions,
    t_end: f64,
    snapshot_every: f64,
) -> Result<KineticRecord> {
    if !(t_end > 0.0 && snapshot_every > 0.0) {
        return Err(Error::param(
            "t_end",
            "t_end and snapshot_every must be positive",
        ));
    }
    let mut st = KineticState::lift(
        initial,
        dim,
        grid,
        opts.eps,
        opts.velocities_r,
        opts.velocities_c,
    )?;
    let mut stepper = KineticStepper::new(&st, opts.clone())?;
    let mut fields = BTreeMap::new();
    let mut times = vec![st.t];
    push_snapshot(&mut fields, &st);
    let mut total = KineticRunStats {
        dt_min: f64::INFINITY,
        ..Default::default()
    };
    let t0 = st.t;
    let mut next = 1;
    loop {
        let target = (t0 + next as f64 * snapshot_every).min(t0 + t_end);
        let remaining = target - st.t;
        let s = stepper.advance(&mut st, dim, remaining)?;
        total.steps += s.steps;
        total.negative_events += s.negative_events;
        total.dt_min = total.dt_min.min(s.dt_min);
        total.dt_max = total.dt_max.max(s.dt_max);
        total.max_myelin_defect = total.max_myelin_defect.max(s.max_myelin_defect);
        times.push(st.t);
        push_snapshot(&mut fields, &st);
        if target >= t0 + t_end {
            break;
        }
        next += 1;
    }
    Ok(KineticRecord {
        times,
        fields,
        metadata: KineticRecordMeta {
            options: opts.clone(),
            grid: *grid,
            stats: total,
        },
    })
}
