use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use super::integrator::{dt_bounds, Rk4, StepStats, DEFAULT_DT_SAFETY};
use super::scheme::FluxScheme;
use super::state::{init_state, FieldState, FIELD_NAMES};
use crate::error::{Error, Result};
use crate::io;
use crate::model::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub t_end: f64,
    pub snapshot_every: f64,
    pub seed: u64,
    /// Relative amplitude of the initial perturbation.
    pub amplitude: f64,
    pub scheme: FluxScheme,
    pub dt_safety: f64,
    /// Fields to snapshot besides `E`.
    pub extra_fields: Vec<String>,
    /// Stop early and flag the record incomplete after this many seconds.
    pub wall_clock_budget: Option<f64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            t_end: 500.0,
            snapshot_every: 1.0,
            seed: 0,
            amplitude: 0.01,
            scheme: FluxScheme::Central,
            dt_safety: DEFAULT_DT_SAFETY,
            extra_fields: Vec::new(),
            wall_clock_budget: None,
        }
    }
}

impl SimOptions {
    pub fn with_fields(mut self, names: &[&str]) -> Self {
        self.extra_fields = names.iter().map(|s| s.to_string()).collect();
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::param(
                "t_end",
                format!("must be positive, got {}", self.t_end),
            ));
        }
        if !(self.snapshot_every > 0.0) {
            return Err(Error::param("snapshot_every", "must be positive"));
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::param("dt_safety", "must lie in (0, 1]"));
        }
        for f in &self.extra_fields {
            if !FIELD_NAMES.iter().any(|n| n.eq_ignore_ascii_case(f)) {
                return Err(Error::param("fields", format!("unknown field `{f}`")));
            }
        }
        Ok(())
    }
}

/// Everything needed to re-run a simulation, plus what happened during it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub params: ModelParams,
    pub grid: Grid1D,
    pub options: SimOptions,
    pub steps: u64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub clamp_events: usize,
    pub negative_events: usize,
    pub complete: bool,
    #[serde(skip)]
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeRecord {
    pub times: Vec<f64>,
    /// Snapshot matrices keyed by field name (`"E"` always present).
    pub fields: BTreeMap<String, Vec<Vec<f64>>>,
    pub metadata: RunMetadata,
}

impl SpaceTimeRecord {
    pub fn field(&self, name: &str) -> Option<&Vec<Vec<f64>>> {
        self.fields.get(name)
    }

    pub fn e(&self) -> &Vec<Vec<f64>> {
        &self.fields["E"]
    }

    /// Writes `<stem>_<field>.csv` per field, `<stem>.json` with the
    /// metadata, and `<stem>_E.pgm` (time downwards, range `[min, max]` of
    /// E). Returns the written paths.
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
        let e = self.e();
        let (lo, hi) = e
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                (l.min(*v), h.max(*v))
            });
        let img = dir.join(format!("{stem}_E.pgm"));
        io::write_pgm(&img, e, lo, hi)?;
        paths.push(img);
        Ok(paths)
    }
}

/// Seeds the perturbed equilibrium and integrates to `t_end`.
pub fn simulate(p: &ModelParams, grid: &Grid1D, opts: &SimOptions) -> Result<SpaceTimeRecord> {
    opts.validate()?;
    p.validate()?;
    let state = init_state(p, grid, opts.seed, opts.amplitude)?;
    simulate_from(state, p, grid, opts)
}

/// Integrates from a given state. Snapshots are taken at `t0` and at every
/// multiple of `snapshot_every`, and at `t_end`; the step is shortened to
/// land on each snapshot time exactly.
pub fn simulate_from(
    mut state: FieldState,
    p: &ModelParams,
    grid: &Grid1D,
    opts: &SimOptions,
) -> Result<SpaceTimeRecord> {
    opts.validate()?;
    if state.len() != grid.n {
        return Err(Error::GridMismatch(format!(
            "state has {} cells, grid {}",
            state.len(),
            grid.n
        )));
    }
    let start = Instant::now();
    let mut names: Vec<String> = vec!["E".to_string()];
    for f in &opts.extra_fields {
        let canon = FIELD_NAMES
            .iter()
            .find(|n| n.eq_ignore_ascii_case(f))
            .unwrap()
            .to_string();
        if !names.contains(&canon) {
            names.push(canon);
        }
    }
    let mut fields: BTreeMap<String, Vec<Vec<f64>>> =
        names.iter().map(|n| (n.clone(), Vec::new())).collect();
    let mut times = Vec::new();
    let snap =
        |st: &FieldState, times: &mut Vec<f64>, fields: &mut BTreeMap<String, Vec<Vec<f64>>>| {
            times.push(st.t);
            for (name, rows) in fields.iter_mut() {
                rows.push(st.field(name).unwrap().to_vec());
            }
        };
    snap(&state, &mut times, &mut fields);

    let mut rk = Rk4::new(grid.n, opts.scheme);
    let t0 = state.t;
    let t_end = t0 + opts.t_end;
    let mut next_index = 1u64;
    let mut stats = StepStats::default();
    let (mut steps, mut dt_min, mut dt_max) = (0u64, f64::INFINITY, 0.0f64);
    let mut complete = true;

    while state.t < t_end {
        let next_snap = (t0 + next_index as f64 * opts.snapshot_every).min(t_end);
        let dt_stable = opts.dt_safety * dt_bounds(&state, p, grid).min();
        let remaining = next_snap - state.t;
        let (dt, lands) = if dt_stable >= remaining {
            (remaining, true)
        } else {
            (dt_stable, false)
        };
        stats += rk.step(&mut state, p, grid, dt)?;
        steps += 1;
        if !lands {
            dt_min = dt_min.min(dt);
            dt_max = dt_max.max(dt);
        }
        if lands {
            state.t = next_snap;
            snap(&state, &mut times, &mut fields);
            next_index += 1;
            if let Some(budget) = opts.wall_clock_budget {
                if start.elapsed().as_secs_f64() > budget && state.t < t_end {
                    complete = false;
                    log::warn!(
                        "wall-clock budget of {budget} s exhausted at t = {}",
                        state.t
                    );
                    break;
                }
            }
        }
    }
    if stats.clamp_events > 0 {
        log::warn!("{} clamping events of R during the run", stats.clamp_events);
    }

    Ok(SpaceTimeRecord {
        times,
        fields,
        metadata: RunMetadata {
            params: *p,
            grid: *grid,
            options: opts.clone(),
            steps,
            dt_min,
            dt_max,
            clamp_events: stats.clamp_events,
            negative_events: stats.negative_events,
            complete,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    })
}
