use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::homogeneous::{
    appendix_check, ode_simulate, oscillation_period, positivity_sweep, reduced_system,
    PopulationSystem, ReducedForm,
};
use crate::io;
use crate::kinetic::{
    chemotactic_drift, diffusive_limit_error, mode_decay, smooth_initial, KineticOptions,
    LimitOptions,
};
use crate::model::{admissibility_bounds, equilibrium, reaction_terms_unchecked};
use crate::pde::{pattern_metrics_with, simulate, Grid1D, RegimeThresholds, SimOptions};
use crate::stability::{
    bifurcation_diagram, dispersion_h, fastest_neumann_mode, growth_rates, hopf_period,
    neumann_wavenumbers, unstable_band, BifurcationClass, JacobianForm, ReportOptions,
    StabilityReport,
};

pub const COMMANDS: [&str; 8] = [
    "equilibrium",
    "stability",
    "dispersion",
    "bifurcation",
    "simulate",
    "kinetic-limit",
    "ode",
    "appendix-check",
];

#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub command: String,
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

#[derive(Debug)]
pub struct RunFailure {
    pub command: String,
    pub error: Error,
    /// Files written before the failure; they are incomplete.
    pub partial_outputs: Vec<PathBuf>,
}

impl RunFailure {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "error": self.error.kind(),
            "message": self.error.to_string(),
            "partial": !self.partial_outputs.is_empty(),
            "partial_outputs": self.partial_outputs,
        })
    }

    /// 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.error {
            Error::Config { .. } | Error::Invalid(_) | Error::Parameter { .. } => 2,
            _ => 1,
        }
    }
}

struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name);
        io::write_json_rounded(&p, value)
    }
}

/// Runs one subcommand, writing into `cfg.run.out`. A sidecar
/// `<command>.ini` is written first; feeding it back as `--config`
/// reproduces every output.
pub fn run_subcommand(cfg: &RunConfig, name: &str) -> std::result::Result<RunOutcome, RunFailure> {
    let mut out = Outputs {
        dir: cfg.run.out.clone(),
        files: Vec::new(),
    };
    let fail = |error: Error, out: &Outputs| RunFailure {
        command: name.to_string(),
        error,
        partial_outputs: out.files.clone(),
    };
    if !COMMANDS.contains(&name) {
        return Err(fail(
            Error::Invalid(format!(
                "unknown subcommand `{name}`; expected one of {}",
                COMMANDS.join(", ")
            )),
            &out,
        ));
    }
    if let Err(e) = prepare(cfg, name, &mut out) {
        return Err(fail(e, &out));
    }
    let summary = match name {
        "equilibrium" => run_equilibrium(cfg, &mut out),
        "stability" => run_stability(cfg, &mut out),
        "dispersion" => run_dispersion(cfg, &mut out),
        "bifurcation" => run_bifurcation(cfg, &mut out),
        "simulate" => run_simulate(cfg, &mut out),
        "kinetic-limit" => run_kinetic_limit(cfg, &mut out),
        "ode" => run_ode(cfg, &mut out),
        _ => run_appendix(cfg, &mut out),
    };
    match summary {
        Ok(summary) => Ok(RunOutcome {
            command: name.to_string(),
            files: out.files,
            summary: io::round_json(summary),
        }),
        Err(e) => Err(fail(e, &out)),
    }
}

fn prepare(cfg: &RunConfig, name: &str, out: &mut Outputs) -> Result<()> {
    std::fs::create_dir_all(&out.dir)?;
    let probe = out.dir.join(".write-probe");
    std::fs::write(&probe, b"")?;
    std::fs::remove_file(&probe)?;
    let mut sidecar = cfg.clone();
    sidecar.command = Some(name.to_string());
    let p = out.path(&format!("{name}.ini"));
    std::fs::write(p, sidecar.to_ini())?;
    Ok(())
}

fn grid(cfg: &RunConfig) -> Result<Grid1D> {
    Grid1D::new(cfg.grid.length, cfg.grid.cells)
}

fn run_equilibrium(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = cfg.params.model()?;
    p.validate()?;
    let eq = equilibrium(&p);
    let residual = reaction_terms_unchecked(eq.as_array(), &p);
    let (theta_bar, theta_low) = admissibility_bounds(&p);
    let report = json!({
        "params": p,
        "equilibrium": eq,
        "residual": residual,
        "theta_bar": theta_bar,
        "theta_bar_minus_beta_phi": theta_low,
    });
    out.json("equilibrium.json", &report)?;
    Ok(report)
}

fn run_stability(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = cfg.params.model()?;
    let opts = ReportOptions {
        k2_max: cfg.run.k2_max,
        samples: cfg.run.samples,
        domain_length: Some(cfg.grid.length),
        max_mode: cfg.run.max_mode,
    };
    let report = StabilityReport::compute(&p, &opts)?;
    out.json("stability.json", &report)?;
    let rows = report.dispersion.iter().map(|d| vec![d.k2, d.h, d.max_re]);
    io::write_csv(
        &out.path("stability_dispersion.csv"),
        &["k2", "h", "max_re"],
        rows,
    )?;
    Ok(json!({
        "admissible": report.equilibrium.admissible,
        "theta_bar": report.theta_bar,
        "theta_bar_minus_beta_phi": report.theta_bar_minus_beta_phi,
        "theta_minus": report.theta_minus,
        "theta_plus": report.theta_plus,
        "homogeneous_stable": report.homogeneous_stable,
        "xi_star": report.xi_star,
        "k2_star": report.k2_star,
        "turing_unstable": report.turing_unstable,
        "discrepancies": report.discrepancies,
    }))
}

fn run_dispersion(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = cfg.params.model()?;
    let n = cfg.run.samples.max(2);
    let k2s: Vec<f64> = (0..n)
        .map(|i| cfg.run.k2_max * i as f64 / (n - 1) as f64)
        .collect();
    let ks: Vec<f64> = k2s.iter().map(|k2| k2.sqrt()).collect();
    let factored = growth_rates(&p, &ks, JacobianForm::Factored)?;
    let consistent = growth_rates(&p, &ks, JacobianForm::Consistent)?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        rows.push(vec![
            ks[i],
            k2s[i],
            dispersion_h(k2s[i], &p)?,
            factored[i].max_re,
            consistent[i].max_re,
        ]);
    }
    io::write_csv(
        &out.path("dispersion.csv"),
        &["k", "k2", "h", "max_re_factored", "max_re_consistent"],
        rows,
    )?;
    let modes = neumann_wavenumbers(cfg.grid.length, cfg.run.max_mode);
    let mp = growth_rates(&p, &modes, JacobianForm::Factored)?;
    let mc = growth_rates(&p, &modes, JacobianForm::Consistent)?;
    let mode_rows = (0..modes.len()).map(|m| vec![m as f64, modes[m], mp[m].max_re, mc[m].max_re]);
    io::write_csv(
        &out.path("dispersion_modes.csv"),
        &["m", "k", "max_re_factored", "max_re_consistent"],
        mode_rows,
    )?;
    let summary = json!({
        "unstable_band_factored": unstable_band(&factored),
        "unstable_band_consistent": unstable_band(&consistent),
        "fastest_mode_factored": fastest_neumann_mode(&p, cfg.grid.length, cfg.run.max_mode, JacobianForm::Factored)?,
        "fastest_mode_consistent": fastest_neumann_mode(&p, cfg.grid.length, cfg.run.max_mode, JacobianForm::Consistent)?,
    });
    out.json("dispersion.json", &summary)?;
    Ok(summary)
}

fn run_bifurcation(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = cfg.params.model()?;
    let s = &cfg.sweep;
    let diagram = bifurcation_diagram(
        &p,
        (s.theta_min, s.theta_max),
        (s.xi_min, s.xi_max),
        (s.theta_points, s.xi_points),
    )?;
    diagram.write_csv(&out.path("bifurcation.csv"))?;
    diagram.write_boundary_csv(&out.path("bifurcation_boundaries.csv"))?;
    let count = |c: BifurcationClass| diagram.cells.iter().filter(|x| x.class == c).count();
    let b = &diagram.boundaries;
    let summary = json!({
        "theta_bar": b.theta_bar,
        "theta_bar_minus_beta_phi": b.theta_bar_minus_beta_phi,
        "theta_minus": b.theta_minus,
        "theta_plus": b.theta_plus,
        "cells": {
            "inadmissible": count(BifurcationClass::Inadmissible),
            "homogeneous-unstable": count(BifurcationClass::HomogeneousUnstable),
            "stable": count(BifurcationClass::Stable),
            "turing": count(BifurcationClass::Turing),
        },
    });
    out.json("bifurcation.json", &summary)?;
    Ok(summary)
}

fn run_simulate(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = cfg.params.model()?;
    let g = grid(cfg)?;
    let r = &cfg.run;
    let opts = SimOptions {
        t_end: r.t_end.unwrap_or(500.0),
        snapshot_every: r.snapshot_every,
        seed: r.seed,
        amplitude: r.amplitude,
        scheme: r.scheme,
        dt_safety: r.dt_safety,
        extra_fields: r.fields.clone(),
        wall_clock_budget: r.wall_clock_budget,
    };
    let record = simulate(&p, &g, &opts)?;
    out.files.extend(record.write(&out.dir, "simulate")?);
    let thresholds = RegimeThresholds {
        oscillation_min: r.osc_min,
        drift_max: r.drift_max,
        ..RegimeThresholds::default()
    };
    let metrics = pattern_metrics_with(&record, &thresholds)?;
    out.json("simulate_metrics.json", &metrics)?;
    let m = &record.metadata;
    Ok(json!({
        "complete": m.complete,
        "partial": !m.complete,
        "t_reached": record.times.last(),
        "steps": m.steps,
        "clamp_events": m.clamp_events,
        "negative_events": m.negative_events,
        "regime": metrics.regime.name(),
        "oscillation_score": metrics.oscillation_score,
        "early_oscillation_score": metrics.early_oscillation_score,
        "late_oscillation_score": metrics.late_oscillation_score,
        "late_drift": metrics.late_drift,
        "thresholds": thresholds,
    }))
}

fn run_kinetic_limit(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let dim = cfg.params.dimensional();
    dim.validate()?;
    let g = grid(cfg)?;
    let r = &cfg.run;
    let initial = smooth_initial(&dim, &g, r.seed, r.amplitude)?;
    let opts = LimitOptions {
        eps_list: cfg.sweep.eps_list.clone(),
        t_probe: r.t_probe,
        kinetic: KineticOptions {
            velocities_r: r.velocities,
            velocities_c: r.velocities,
            transport: r.transport,
            ..KineticOptions::default()
        },
        closure: r.closure,
    };
    let report = diffusive_limit_error(&dim, &g, &initial, &opts)?;
    report.write_csv(&out.path("kinetic_limit.csv"))?;
    let eps_min = *cfg.sweep.eps_list.last().unwrap();
    let decay = mode_decay(&dim, &g, eps_min, 2, 4.0, r.velocities)?;
    let drift = chemotactic_drift(&dim, &g, eps_min, 0.25, 2.0, r.velocities)?;
    let summary = json!({
        "closure": r.closure.name(),
        "coefficients": report.coefficients,
        "r_errors": report.errors("R"),
        "r_strictly_decreasing": report.strictly_decreasing("R"),
        "entries": report.entries,
        "runs": report.runs,
        "mode_decay": decay,
        "mode_decay_rel_error_r": decay.rel_error_r(),
        "mode_decay_rel_error_c": decay.rel_error_c(),
        "drift": drift,
        "drift_rel_error_kinetic": drift.rel_error_kinetic(),
        "drift_rel_error_nominal": drift.rel_error_nominal(),
    });
    out.json("kinetic_limit.json", &summary)?;
    Ok(summary)
}

fn run_ode(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = cfg.params.model()?;
    p.validate()?;
    let eq = equilibrium(&p).as_array();
    let initial =
        cfg.run
            .initial
            .unwrap_or([1.1 * eq[0], 1.1 * eq[1], 1.1 * eq[2], 1.1 * eq[3], eq[4]]);
    let t_end = cfg.run.t_end.unwrap_or(200.0);
    let traj = ode_simulate(&p, initial, t_end, cfg.run.dt)?;
    traj.write_csv(&out.path("ode.csv"))?;
    let period = oscillation_period(&traj.times, &traj.component(0), 0.5 * t_end);
    let summary = json!({
        "initial": initial,
        "t_end": t_end,
        "dt": cfg.run.dt,
        "last": traj.last(),
        "min": traj.min,
        "max_r": traj.max_r,
        "period": period,
        "hopf_period": hopf_period(&p),
    });
    out.json("ode.json", &summary)?;
    Ok(summary)
}

fn run_appendix(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let dim = cfg.params.dimensional();
    dim.validate()?;
    let p = cfg.params.model()?;
    let v = cfg.run.volume;
    let sys = PopulationSystem::new(&dim, v)?;
    let t_end = cfg.run.t_end.unwrap_or(40.0);
    let initial = match cfg.run.initial {
        Some(n) => n,
        None => {
            let u = dim.scales().to_dimensional(equilibrium(&p).as_array());
            [
                0.6 * u[0] * v,
                1.3 * u[1] * v,
                0.5 * u[2] * v,
                0.1 * v,
                0.2 * v,
            ]
        }
    };
    let check = appendix_check(&sys, initial, t_end, cfg.run.dt)?;
    sys.simulate(initial, t_end, check.dt)?
        .write_csv(&out.path("appendix_trajectory.csv"))?;
    let sweep = positivity_sweep(&p, cfg.run.levels, &cfg.sweep.dt_list, t_end);
    let rows = sweep.failures.iter().map(|(dt, n)| vec![*dt, *n as f64]);
    io::write_csv(
        &out.path("appendix_positivity.csv"),
        &["dt", "failures"],
        rows,
    )?;
    let nominal = reduced_system(&dim, ReducedForm::Nominal)?;
    let corrected = reduced_system(&dim, ReducedForm::Corrected)?;
    let selected = if cfg.run.reduced == ReducedForm::Nominal {
        &nominal
    } else {
        &corrected
    };
    let summary = json!({
        "closed_form": check,
        "closed_form_within_tolerance": check.nc_max_rel_error < 1e-6 && check.ne_max_rel_error < 1e-6,
        "positivity": sweep,
        "reduced_selected": selected.form.name(),
        "reduced_well_posed": selected.well_posed,
        "reduced_nominal": nominal,
        "reduced_corrected": corrected,
        "reduced_fixed_point_nominal": nominal.fixed_point(),
        "reduced_fixed_point_corrected": corrected.fixed_point(),
    });
    out.json("appendix.json", &summary)?;
    Ok(summary)
}

/// Paths of the files a finished run produced, relative to `dir`.
pub fn relative_outputs(outcome: &RunOutcome, dir: &Path) -> Vec<String> {
    outcome
        .files
        .iter()
        .map(|p| p.strip_prefix(dir).unwrap_or(p).display().to_string())
        .collect()
}
