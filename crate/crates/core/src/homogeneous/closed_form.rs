use serde::{Deserialize, Serialize};

use super::ode::PopulationSystem;
use crate::error::{Error, Result};

/// A quadrature-evaluated solution together with the max relative change
/// observed when the sample grid is coarsened by half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub refinement_change: f64,
}

fn check_grid(times: &[f64], series: &[&[f64]]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::GridMismatch("need at least two samples".into()));
    }
    for s in series {
        if s.len() != times.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples against {} times",
                s.len(),
                times.len()
            )));
        }
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridMismatch("times must increase strictly".into()));
    }
    Ok(())
}

/// `y' = q(t) - k(t) y` by the integrating factor, with both integrals
/// taken by the trapezoid rule and advanced interval by interval so the
/// exponentials never overflow.
fn linear_solution(times: &[f64], q: &[f64], k: &[f64], y0: f64) -> Vec<f64> {
    let mut y = Vec::with_capacity(times.len());
    y.push(y0);
    for j in 0..times.len() - 1 {
        let h = times[j + 1] - times[j];
        let decay = (-0.5 * h * (k[j] + k[j + 1])).exp();
        let next = decay * (y[j] + 0.5 * h * q[j]) + 0.5 * h * q[j + 1];
        y.push(next);
    }
    y
}

fn with_refinement(times: &[f64], q: &[f64], k: &[f64], y0: f64) -> ClosedForm {
    let values = linear_solution(times, q, k, y0);
    let every_other = |v: &[f64]| v.iter().step_by(2).copied().collect::<Vec<f64>>();
    let coarse = linear_solution(&every_other(times), &every_other(q), &every_other(k), y0);
    let refinement_change = coarse
        .iter()
        .zip(values.iter().step_by(2))
        .map(|(c, f)| (c - f).abs() / f.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    ClosedForm {
        times: times.to_vec(),
        values,
        refinement_change,
    }
}

/// `n_C(t) = e^{-dC t} [n_C(0) + int_0^t e^{dC s} pC2* n_A n_R ds]`.
pub fn closed_form_nc(
    times: &[f64],
    n_a: &[f64],
    n_r: &[f64],
    pc2_star: f64,
    dc: f64,
    nc0: f64,
) -> Result<ClosedForm> {
    check_grid(times, &[n_a, n_r])?;
    let q: Vec<f64> = n_a.iter().zip(n_r).map(|(a, r)| pc2_star * a * r).collect();
    let k = vec![dc; times.len()];
    Ok(with_refinement(times, &q, &k, nc0))
}

/// `n_E(t) = e^{-I(t)} [n_E(0) + n_E_hat int_0^t e^{I(u)} g(u) du]` with
/// `g` the damage rate and `I = int (g + r6)`.
pub fn closed_form_ne(
    times: &[f64],
    n_r: &[f64],
    sys: &PopulationSystem,
    ne0: f64,
) -> Result<ClosedForm> {
    check_grid(times, &[n_r])?;
    if n_r.iter().any(|r| *r < 0.0) {
        return Err(Error::param("n_R", "trajectory must be nonnegative"));
    }
    let g: Vec<f64> = n_r.iter().map(|r| sys.damage(*r)).collect();
    let q: Vec<f64> = g.iter().map(|g| sys.n_e_hat * g).collect();
    let k: Vec<f64> = g.iter().map(|g| g + sys.r6).collect();
    Ok(with_refinement(times, &q, &k, ne0))
}

/// Closed forms set against the directly integrated population system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixCheck {
    pub volume: f64,
    pub initial: [f64; 5],
    pub t_end: f64,
    /// Sample spacing after refinement.
    pub dt: f64,
    pub nc_refinement_change: f64,
    pub ne_refinement_change: f64,
    pub nc_max_rel_error: f64,
    pub ne_max_rel_error: f64,
    /// The same comparison for `n_C(0) + e^{-dC t} int e^{dC s} n_A n_R ds`,
    /// i.e. without the decay of the initial value and without `pC2*`.
    pub nc_without_decay_max_rel_error: f64,
    pub population_min: [f64; 5],
    pub population_max: [f64; 5],
}

/// Refinement target for the quadratures.
pub const QUADRATURE_TOL: f64 = 1e-8;

fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .skip(1)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1e-12 * scale).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Integrates the population system from `initial`, halving the step
/// (from `dt`, at most eight times) until both quadratures change by less
/// than [`QUADRATURE_TOL`] under coarsening, then compares.
pub fn appendix_check(
    sys: &PopulationSystem,
    initial: [f64; 5],
    t_end: f64,
    dt: f64,
) -> Result<AppendixCheck> {
    let mut dt = dt;
    let mut halvings = 0;
    loop {
        let tr = sys.simulate(initial, t_end, dt)?;
        let (na, nr) = (tr.component(0), tr.component(2));
        let nc = closed_form_nc(&tr.times, &na, &nr, sys.pc2_star, sys.dc, initial[3])?;
        let ne = closed_form_ne(&tr.times, &nr, sys, initial[4])?;
        let converged =
            nc.refinement_change < QUADRATURE_TOL && ne.refinement_change < QUADRATURE_TOL;
        if converged || halvings == 8 {
            if !converged {
                log::warn!(
                    "quadrature refinement stalled at dt = {dt}: {:.2e} (C), {:.2e} (E)",
                    nc.refinement_change,
                    ne.refinement_change
                );
            }
            let undecayed = {
                let q: Vec<f64> = na.iter().zip(&nr).map(|(a, r)| a * r).collect();
                let integral = linear_solution(&tr.times, &q, &vec![sys.dc; q.len()], 0.0);
                integral
                    .iter()
                    .map(|v| initial[3] + v)
                    .collect::<Vec<f64>>()
            };
            let mut population_max = [f64::NEG_INFINITY; 5];
            for s in &tr.states {
                for i in 0..5 {
                    population_max[i] = population_max[i].max(s[i]);
                }
            }
            return Ok(AppendixCheck {
                volume: sys.volume,
                initial,
                t_end,
                dt,
                nc_refinement_change: nc.refinement_change,
                ne_refinement_change: ne.refinement_change,
                nc_max_rel_error: max_rel_error(&nc.values, &tr.component(3)),
                ne_max_rel_error: max_rel_error(&ne.values, &tr.component(4)),
                nc_without_decay_max_rel_error: max_rel_error(&undecayed, &tr.component(3)),
                population_min: tr.min,
                population_max,
            });
        }
        dt *= 0.5;
        halvings += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{equilibrium, DimensionalParams, ModelParams};

    fn grid(t_end: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
    }

    #[test]
    fn pure_decay() {
        let t = grid(10.0, 1000);
        let z = vec![0.0; t.len()];
        let nc = closed_form_nc(&t, &z, &z, 1.0, 0.5, 2.0).unwrap();
        for (ti, v) in t.iter().zip(&nc.values) {
            assert!((v - 2.0 * (-0.5 * ti).exp()).abs() < 1e-12);
        }
        let sys = PopulationSystem::new(&DimensionalParams::paper_reference(), 3.0).unwrap();
        let ne = closed_form_ne(&t, &z, &sys, 1.5).unwrap();
        for (ti, v) in t.iter().zip(&ne.values) {
            assert!((v - 1.5 * (-sys.r6 * ti).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_source_relaxes_to_its_steady_state() {
        let t = grid(60.0, 60_000);
        let a = vec![2.0; t.len()];
        let r = vec![1.5; t.len()];
        let nc = closed_form_nc(&t, &a, &r, 0.4, 0.5, 0.0).unwrap();
        assert!((nc.values.last().unwrap() - 3.0 * 0.4 / 0.5).abs() < 1e-6);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let t = grid(1.0, 10);
        let short = vec![0.0; 5];
        assert!(matches!(
            closed_form_nc(&t, &short, &t, 1.0, 1.0, 0.0),
            Err(Error::GridMismatch(_))
        ));
    }

    /// Both closed forms reproduce the directly integrated populations.
    #[test]
    fn agrees_with_direct_integration() {
        let dim = DimensionalParams::paper_reference();
        let v = 7.0 * std::f64::consts::PI;
        let sys = PopulationSystem::new(&dim, v).unwrap();
        let u1 = equilibrium(&ModelParams::paper()).as_array();
        let n0 = [
            0.6 * u1[0] * v,
            1.3 * u1[1] * v,
            0.5 * u1[2] * v,
            0.1 * v,
            0.2 * v,
        ];
        let chk = appendix_check(&sys, n0, 40.0, 1e-3).unwrap();
        assert!(chk.nc_refinement_change < QUADRATURE_TOL, "{chk:?}");
        assert!(chk.ne_refinement_change < QUADRATURE_TOL, "{chk:?}");
        assert!(chk.nc_max_rel_error < 1e-6, "{chk:?}");
        assert!(chk.ne_max_rel_error < 1e-6, "{chk:?}");
        assert!(chk.nc_without_decay_max_rel_error > 1e-2);
        assert!(chk.population_min.iter().all(|m| *m >= 0.0));
    }
}
