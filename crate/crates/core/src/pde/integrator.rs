use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use super::scheme::{rhs_into, FluxScheme, RhsWorkspace};
use super::state::{FieldState, FIELD_NAMES};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Tolerances of the bound checks after each step.
pub const NEGATIVITY_TOL: f64 = 1e-12;
pub const PACKING_TOL: f64 = 1e-9;

/// Safety factor applied to every explicit time-step bound.
pub const DEFAULT_DT_SAFETY: f64 = 0.2;

/// The three explicit step limits at a given state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtBounds {
    pub diffusion: f64,
    pub reaction: f64,
    pub advection: f64,
}

impl DtBounds {
    pub fn min(&self) -> f64 {
        self.diffusion.min(self.reaction).min(self.advection)
    }
}

/// `dx^2 / (2 max Phi0 max(1, delta))`, the inverse Gershgorin bound of the
/// reaction Jacobian, and `dx / max |xi Phi1 dC/dx|`.
pub fn dt_bounds(state: &FieldState, p: &ModelParams, grid: &Grid1D) -> DtBounds {
    let diffusion = grid.dx * grid.dx / (2.0 * p.squeeze.phi0_max() * p.delta.max(1.0));
    let mut rate: f64 = 0.0;
    let mut speed: f64 = 0.0;
    let n = state.len();
    for i in 0..n {
        let [a, s, r, _, e] = state.cell(i);
        let r = r.max(0.0);
        let om = p.omega_cap + r;
        let rows = [
            (p.beta * r - s - p.zeta).abs() + a.abs() + (p.beta * a).abs(),
            (p.mu * s).abs() + (p.mu * a - 1.0).abs(),
            (p.eta * r).abs() + (p.phi * r).abs() + (p.eta * a - p.phi * s - p.theta).abs(),
            r + a.abs() + p.tau,
            (p.theta_cap * (1.0 - e) * r * (r + 2.0 * p.omega_cap) / (om * om)).abs()
                + p.theta_cap * r * r / om
                + p.xi_cap,
        ];
        rate = rows.iter().fold(rate, |m, v| m.max(*v));
        if i + 1 < n {
            let w = p.squeeze.phi1_unchecked(r);
            speed = speed.max((p.xi * w * (state.c[i + 1] - state.c[i]) / grid.dx).abs());
        }
    }
    DtBounds {
        diffusion,
        reaction: if rate > 0.0 {
            1.0 / rate
        } else {
            f64::INFINITY
        },
        advection: if speed > 0.0 {
            grid.dx / speed
        } else {
            f64::INFINITY
        },
    }
}

/// Bound violations recorded during one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    /// Cells where `R` left `[0, 1]` by more than the tolerances and was
    /// clamped back.
    pub clamp_events: usize,
    /// Cells where some other field dropped below `-1e-12`.
    pub negative_events: usize,
}

impl std::ops::AddAssign for StepStats {
    fn add_assign(&mut self, o: Self) {
        self.clamp_events += o.clamp_events;
        self.negative_events += o.negative_events;
    }
}

/// Classical fourth-order Runge–Kutta with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    pub scheme: FluxScheme,
    /// Transport only when false.
    pub reactions: bool,
    k1: FieldState,
    k2: FieldState,
    k3: FieldState,
    k4: FieldState,
    tmp: FieldState,
    ws: RhsWorkspace,
}

impl Rk4 {
    pub fn new(n: usize, scheme: FluxScheme) -> Self {
        Rk4 {
            scheme,
            reactions: true,
            k1: FieldState::zeros(n),
            k2: FieldState::zeros(n),
            k3: FieldState::zeros(n),
            k4: FieldState::zeros(n),
            tmp: FieldState::zeros(n),
            ws: RhsWorkspace::new(n),
        }
    }

    pub fn without_reactions(mut self) -> Self {
        self.reactions = false;
        self
    }

    /// Advances `state` by `dt` in place. `R` is clamped to `[0, 1]`
    /// afterwards; clamps beyond the tolerances are counted.
    pub fn step(
        &mut self,
        state: &mut FieldState,
        p: &ModelParams,
        grid: &Grid1D,
        dt: f64,
    ) -> Result<StepStats> {
        if dt == 0.0 {
            return Ok(StepStats::default());
        }
        let (scheme, reactions) = (self.scheme, self.reactions);
        rhs_into(
            state,
            p,
            grid,
            scheme,
            reactions,
            &mut self.ws,
            &mut self.k1,
        );
        self.tmp.set_axpy(state, 0.5 * dt, &self.k1);
        rhs_into(
            &self.tmp,
            p,
            grid,
            scheme,
            reactions,
            &mut self.ws,
            &mut self.k2,
        );
        self.tmp.set_axpy(state, 0.5 * dt, &self.k2);
        rhs_into(
            &self.tmp,
            p,
            grid,
            scheme,
            reactions,
            &mut self.ws,
            &mut self.k3,
        );
        self.tmp.set_axpy(state, dt, &self.k3);
        rhs_into(
            &self.tmp,
            p,
            grid,
            scheme,
            reactions,
            &mut self.ws,
            &mut self.k4,
        );

        let h = dt / 6.0;
        let ks = [&self.k1, &self.k2, &self.k3, &self.k4];
        for (f, field) in state.fields_mut().into_iter().enumerate() {
            let k = |j: usize| ks[j].fields()[f];
            let (k1, k2, k3, k4) = (k(0), k(1), k(2), k(3));
            for i in 0..field.len() {
                field[i] += h * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
            }
        }
        let t_old = state.t;
        state.t += dt;

        let mut stats = StepStats::default();
        for (f, field) in state.fields().iter().enumerate() {
            if field.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence {
                    t: t_old,
                    dt,
                    field: FIELD_NAMES[f].to_string(),
                });
            }
            if f != 2 {
                stats.negative_events += field.iter().filter(|v| **v < -NEGATIVITY_TOL).count();
            }
        }
        for r in state.r.iter_mut() {
            if *r > 1.0 || *r < 0.0 {
                if *r > 1.0 + PACKING_TOL || *r < -NEGATIVITY_TOL {
                    stats.clamp_events += 1;
                }
                *r = r.clamp(0.0, 1.0);
            }
        }
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::equilibrium;
    use crate::pde::init_state;

    #[test]
    fn zero_step_is_identity() {
        let p = ModelParams::paper();
        let g = Grid1D::reference(32).unwrap();
        let st0 = init_state(&p, &g, 3, 0.01).unwrap();
        let mut st = st0.clone();
        Rk4::new(g.n, FluxScheme::Central)
            .step(&mut st, &p, &g, 0.0)
            .unwrap();
        assert_eq!(st, st0);
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let p = ModelParams::paper();
        let g = Grid1D::reference(32).unwrap();
        let eq = equilibrium(&p).as_array();
        let mut st = FieldState::uniform(g.n, eq);
        let dt = DEFAULT_DT_SAFETY * dt_bounds(&st, &p, &g).min();
        let mut rk = Rk4::new(g.n, FluxScheme::Central);
        for _ in 0..100 {
            rk.step(&mut st, &p, &g, dt).unwrap();
        }
        let back = FieldState {
            t: st.t,
            ..FieldState::uniform(g.n, eq)
        };
        assert!(st.max_abs_diff(&back) < 1e-10);
    }

    #[test]
    fn divergence_is_reported() {
        let p = ModelParams::paper();
        let g = Grid1D::reference(32).unwrap();
        let mut st = init_state(&p, &g, 3, 0.01).unwrap();
        st.a[4] = f64::NAN;
        let err = Rk4::new(g.n, FluxScheme::Central)
            .step(&mut st, &p, &g, 1e-3)
            .unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    /// Self-convergence against a dt/8 reference on a smooth run: halving
    /// dt must reduce the error by at least a factor of 4.
    #[test]
    fn observed_order_at_least_two() {
        let p = ModelParams::paper();
        let g = Grid1D::reference(32).unwrap();
        let st0 = init_state(&p, &g, 11, 0.05).unwrap();
        let t_end = 2.0;
        let run = |dt: f64| {
            let mut st = st0.clone();
            let mut rk = Rk4::new(g.n, FluxScheme::Central);
            let steps = (t_end / dt).round() as usize;
            for _ in 0..steps {
                rk.step(&mut st, &p, &g, dt).unwrap();
            }
            st
        };
        let base = 0.05;
        let reference = run(base / 8.0);
        let e1 = run(base).max_abs_diff(&reference);
        let e2 = run(base / 2.0).max_abs_diff(&reference);
        let order = (e1 / e2).log2();
        assert!(order >= 2.0, "observed order {order} ({e1:e}, {e2:e})");
    }

    #[test]
    fn transport_only_conserves_mass() {
        let p = ModelParams::paper();
        let g = Grid1D::reference(64).unwrap();
        let mut st = init_state(&p, &g, 5, 0.2).unwrap();
        let (m_r, m_c) = (g.integrate(&st.r), g.integrate(&st.c));
        let mut rk = Rk4::new(g.n, FluxScheme::Central).without_reactions();
        let dt = DEFAULT_DT_SAFETY * dt_bounds(&st, &p, &g).min();
        let steps = (1.0 / dt).ceil() as usize;
        for _ in 0..steps {
            rk.step(&mut st, &p, &g, dt).unwrap();
        }
        let per_time = 1.0 / st.t;
        assert!((g.integrate(&st.r) - m_r).abs() * per_time < 1e-10);
        assert!((g.integrate(&st.c) - m_c).abs() * per_time < 1e-10);
    }
}
