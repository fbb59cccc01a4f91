use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{equilibrium, reaction_terms_unchecked, ModelParams};

/// One forward-Euler run of the reaction system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerRun {
    pub dt: f64,
    pub steps: usize,
    /// Componentwise minimum over the run, initial value included.
    pub min: [f64; 5],
    pub positive: bool,
    pub last: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub initial: [f64; 5],
    pub t_end: f64,
    pub runs: Vec<EulerRun>,
    /// Max-norm change of the final state between consecutive step sizes
    /// (sorted from coarse to fine).
    pub refinement_changes: Vec<f64>,
    /// Whether those changes shrink as the step is refined.
    pub converging: bool,
}

/// Explicit Euler `U <- U + dt F(U)` for `ceil(t_end / dt)` steps. A zero
/// step returns the initial value.
pub fn euler_run(p: &ModelParams, initial: [f64; 5], dt: f64, t_end: f64) -> EulerRun {
    let steps = if dt > 0.0 {
        (t_end / dt).ceil() as usize
    } else {
        0
    };
    let mut u = initial;
    let mut min = initial;
    for _ in 0..steps {
        let f = reaction_terms_unchecked(u, p);
        for i in 0..5 {
            u[i] += dt * f[i];
            min[i] = min[i].min(u[i]);
        }
        if u.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    EulerRun {
        dt,
        steps,
        min,
        positive: min.iter().all(|v| *v >= 0.0) && u.iter().all(|v| v.is_finite()),
        last: u,
    }
}

/// Runs forward Euler at every step size. Violations are recorded, not
/// raised.
pub fn euler_positivity_harness(
    p: &ModelParams,
    initial: [f64; 5],
    dt_list: &[f64],
    t_end: f64,
) -> PositivityReport {
    let mut dts = dt_list.to_vec();
    dts.sort_by(|a, b| b.total_cmp(a));
    let runs: Vec<EulerRun> = dts
        .iter()
        .map(|dt| euler_run(p, initial, *dt, t_end))
        .collect();
    let refinement_changes: Vec<f64> = runs
        .windows(2)
        .map(|w| (0..5).fold(0.0f64, |m, i| m.max((w[0].last[i] - w[1].last[i]).abs())))
        .collect();
    let converging = refinement_changes.windows(2).all(|w| w[1] <= w[0]);
    PositivityReport {
        initial,
        t_end,
        runs,
        refinement_changes,
        converging,
    }
}

/// Evolves every point of a field independently: there is no exchange
/// between points without transport.
pub fn euler_pointwise(p: &ModelParams, field: &[[f64; 5]], dt: f64, t_end: f64) -> Vec<EulerRun> {
    field.iter().map(|u| euler_run(p, *u, dt, t_end)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivitySweep {
    /// Levels per component: evenly spaced over `[0, 2 U1]`, except `S`,
    /// which takes the positive levels `2 S1 l / levels`, `l = 1..=levels`.
    /// `S = 0` is invariant and, without suppressors, `A` and `R` grow
    /// without bound, so no fixed step keeps the myelin equation positive.
    pub levels: usize,
    pub initial_conditions: usize,
    /// Step sizes, coarse to fine, with the number of initial conditions
    /// that went negative at each.
    pub failures: Vec<(f64, usize)>,
    /// Largest probed step such that it and every finer probed step kept
    /// all components nonnegative.
    pub dt_star: Option<f64>,
}

/// Probes a `levels^5` grid of initial conditions in `[0, 2 U1]`.
pub fn positivity_sweep(
    p: &ModelParams,
    levels: usize,
    dt_list: &[f64],
    t_end: f64,
) -> PositivitySweep {
    let u1 = equilibrium(p).as_array();
    let levels = levels.max(2);
    let total = levels.pow(5);
    let initials: Vec<[f64; 5]> = (0..total)
        .map(|mut k| {
            std::array::from_fn(|i| {
                let l = k % levels;
                k /= levels;
                if i == 1 {
                    2.0 * u1[i].abs() * (l + 1) as f64 / levels as f64
                } else {
                    2.0 * u1[i].abs() * l as f64 / (levels - 1) as f64
                }
            })
        })
        .collect();
    let mut dts = dt_list.to_vec();
    dts.sort_by(|a, b| b.total_cmp(a));
    let failures: Vec<(f64, usize)> = dts
        .iter()
        .map(|dt| {
            let bad = initials
                .par_iter()
                .filter(|u| !euler_run(p, **u, *dt, t_end).positive)
                .count();
            (*dt, bad)
        })
        .collect();
    let mut dt_star = None;
    for (dt, bad) in failures.iter().rev() {
        if *bad > 0 {
            break;
        }
        dt_star = Some(*dt);
    }
    PositivitySweep {
        levels,
        initial_conditions: total,
        failures,
        dt_star,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_step_near_equilibrium_stays_positive() {
        let p = ModelParams::paper();
        let mut u0 = equilibrium(&p).as_array();
        u0[2] *= 0.9;
        u0[4] = 0.0;
        let rep = euler_positivity_harness(&p, u0, &[1e-1, 1e-2, 1e-3], 50.0);
        assert!(rep.runs.iter().all(|r| r.positive));
        assert!(rep.converging, "{:?}", rep.refinement_changes);
    }

    #[test]
    fn zero_step_returns_initial() {
        let p = ModelParams::paper();
        let u0 = [0.1, 0.2, 0.3, 0.4, 0.5];
        let run = euler_run(&p, u0, 0.0, 10.0);
        assert_eq!(run.last, u0);
        assert_eq!(run.steps, 0);
    }

    #[test]
    fn points_evolve_independently() {
        let p = ModelParams::paper();
        let field = [
            [0.5, 0.1, 0.3, 0.3, 0.9],
            [0.2, 0.0, 0.6, 0.1, 0.0],
            [1.0, 0.4, 0.0, 0.0, 0.5],
        ];
        let together = euler_pointwise(&p, &field, 1e-2, 5.0);
        for (u, run) in field.iter().zip(&together) {
            assert_eq!(run.last, euler_run(&p, *u, 1e-2, 5.0).last);
        }
    }

    #[test]
    fn sweep_reports_a_threshold() {
        let p = ModelParams::paper();
        let sw = positivity_sweep(&p, 3, &[2.0, 0.1, 0.01], 20.0);
        assert_eq!(sw.initial_conditions, 243);
        assert!(
            sw.failures[0].1 > 0,
            "a huge step should overshoot somewhere"
        );
        assert!(sw.dt_star.is_some_and(|d| d <= 0.1));
    }
}
