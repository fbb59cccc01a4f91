use serde::{Deserialize, Serialize};

use super::operators::{chemotactic_bias, relax_into, turning_rate_r};
use super::state::KineticState;
use super::velocity::VelocityGrid;
use crate::error::{Error, Result};
use crate::model::DimensionalParams;

/// Face values for the free-streaming term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KineticTransport {
    /// Face average of the two neighbours. Its discrete diffusive limit is
    /// the centred macroscopic operator, so the error vanishes with `eps`.
    #[default]
    Central,
    /// Donor cell per velocity sign. Positive, but its numerical diffusion
    /// `dx |v| / (2 eps)` grows without bound as `eps` shrinks.
    Upwind,
}

impl KineticTransport {
    pub fn name(self) -> &'static str {
        match self {
            KineticTransport::Central => "central",
            KineticTransport::Upwind => "upwind",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticOptions {
    pub eps: f64,
    pub velocities_r: usize,
    pub velocities_c: usize,
    pub transport: KineticTransport,
    pub dt_safety: f64,
    /// Reactions, sources and myelin damage; off leaves pure transport and
    /// turning.
    pub interactions: bool,
    /// Hold the cytokine distribution fixed (drift experiments).
    pub freeze_c: bool,
}

impl Default for KineticOptions {
    fn default() -> Self {
        KineticOptions {
            eps: 0.05,
            velocities_r: 16,
            velocities_c: 16,
            transport: KineticTransport::Central,
            dt_safety: 0.5,
            interactions: true,
            freeze_c: false,
        }
    }
}

/// Time derivative of every component of a [`KineticState`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KineticDerivative {
    pub fr: Vec<f64>,
    pub fc: Vec<f64>,
    pub a: Vec<f64>,
    pub s: Vec<f64>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub e: Vec<f64>,
}

impl KineticDerivative {
    fn sized(st: &KineticState) -> Self {
        let n = st.len();
        KineticDerivative {
            fr: vec![0.0; st.fr.len()],
            fc: vec![0.0; st.fc.len()],
            a: vec![0.0; n],
            s: vec![0.0; n],
            e1: vec![0.0; n],
            e2: vec![0.0; n],
            e: vec![0.0; n],
        }
    }
}

/// Centred gradient with mirrored ghost cells.
pub(crate) fn centred_gradient(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let left = u[i.saturating_sub(1)];
            let right = u[(i + 1).min(n - 1)];
            (right - left) / (2.0 * dx)
        })
        .collect()
}

/// `-(v / eps) d f / dx` for every node, specular reflection at both walls.
fn streaming(
    f: &[f64],
    vg: &VelocityGrid,
    n: usize,
    dx: f64,
    eps: f64,
    scheme: KineticTransport,
    out: &mut [f64],
) {
    let m = vg.len();
    let at = |i: isize, j: usize| -> f64 {
        if i < 0 {
            f[vg.mirror(j)]
        } else if i as usize >= n {
            f[(n - 1) * m + vg.mirror(j)]
        } else {
            f[i as usize * m + j]
        }
    };
    let face = |i: isize, j: usize| -> f64 {
        // value on the face between cells i and i + 1
        let v = vg.nodes[j];
        match scheme {
            KineticTransport::Central => 0.5 * (at(i, j) + at(i + 1, j)),
            KineticTransport::Upwind => {
                if v > 0.0 {
                    at(i, j)
                } else {
                    at(i + 1, j)
                }
            }
        }
    };
    for i in 0..n as isize {
        for j in 0..m {
            let v = vg.nodes[j];
            out[i as usize * m + j] = -v / (eps * dx) * (face(i, j) - face(i - 1, j));
        }
    }
}

/// Right-hand side of the scaled kinetic system in its slow time variable:
/// free streaming at `1/eps`, random turning at `1/eps^2`, chemotactic
/// turning at `1/eps`, reactions at order one, sane-myelin exchange at
/// order `eps`.
pub fn kinetic_rhs(
    st: &KineticState,
    dim: &DimensionalParams,
    opts: &KineticOptions,
) -> Result<KineticDerivative> {
    let mut out = KineticDerivative::sized(st);
    rhs_into(st, dim, opts, &mut out)?;
    Ok(out)
}

fn rhs_into(
    st: &KineticState,
    dim: &DimensionalParams,
    opts: &KineticOptions,
    out: &mut KineticDerivative,
) -> Result<()> {
    let n = st.len();
    let eps = st.eps;
    let dx = st.grid.dx;
    let (mr, mc) = (st.vr.len(), st.vc.len());
    let r = st.density_r();
    let c = st.density_c();
    let dcdx = centred_gradient(&c, dx);

    streaming(&st.fr, &st.vr, n, dx, eps, opts.transport, &mut out.fr);
    let mut turn = vec![0.0; mr.max(mc)];
    for i in 0..n {
        let f = st.fr_cell(i);
        let rate = turning_rate_r(r[i], dim)? / (eps * eps);
        relax_into(f, rate, &st.vr, &mut turn[..mr]);
        let bias = chemotactic_bias(r[i], dcdx[i], dim) * r[i] / eps;
        let growth = if opts.interactions {
            dim.p21 * st.a[i] - dim.d23 * st.s[i] - dim.d2
        } else {
            0.0
        };
        for j in 0..mr {
            out.fr[i * mr + j] += turn[j] + bias * st.vr.nodes[j] + growth * f[j];
        }
    }

    if opts.freeze_c {
        out.fc.iter_mut().for_each(|v| *v = 0.0);
    } else {
        streaming(&st.fc, &st.vc, n, dx, eps, opts.transport, &mut out.fc);
        for i in 0..n {
            let f = st.fc_cell(i);
            relax_into(f, dim.sigma / (eps * eps), &st.vc, &mut turn[..mc]);
            let source = if opts.interactions {
                dim.pc2 * st.a[i] * r[i] / st.vc.omega
            } else {
                0.0
            };
            let decay = if opts.interactions { dim.dc } else { 0.0 };
            for j in 0..mc {
                out.fc[i * mc + j] += turn[j] + source - decay * f[j];
            }
        }
    }

    for i in 0..n {
        if !opts.interactions {
            out.a[i] = 0.0;
            out.s[i] = 0.0;
            out.e1[i] = 0.0;
            out.e2[i] = 0.0;
            out.e[i] = 0.0;
            continue;
        }
        let (a, s, ri) = (st.a[i], st.s[i], r[i]);
        out.a[i] = dim.alpha + dim.p12 * a * ri - dim.d13 * a * s - dim.d1 * a;
        out.s[i] = dim.p31 * s * a - dim.d3 * s;
        let exchange = eps * (dim.r5 * st.e2[i] - dim.b52 * st.e1[i] * ri);
        let destruction = dim.b62 * st.e2[i] * ri - dim.r6 * st.e[i];
        out.e1[i] = exchange;
        out.e2[i] = -exchange - destruction;
        out.e[i] = destruction;
    }
    Ok(())
}

/// Explicit-Euler step limit (before the safety factor): relaxation
/// `1/r`, the centred transport-relaxation bound `2r/(r^2+s^2)` (or the
/// upwind CFL `1/(r+s)`), chemotactic bias, and reaction rates.
pub fn kinetic_dt_bound(
    st: &KineticState,
    dim: &DimensionalParams,
    opts: &KineticOptions,
) -> Result<f64> {
    let eps = st.eps;
    let dx = st.grid.dx;
    let r = st.density_r();
    let c = st.density_c();
    let dcdx = centred_gradient(&c, dx);
    let mut rate_r: f64 = 0.0;
    let mut bias: f64 = 0.0;
    let mut react: f64 = 0.0;
    for i in 0..st.len() {
        rate_r = rate_r.max(turning_rate_r(r[i], dim)? / (eps * eps));
        bias = bias
            .max((chemotactic_bias(r[i], dcdx[i], dim) * st.vr.omega * st.vr.v_cap / eps).abs());
        if opts.interactions {
            let (a, s, ri) = (st.a[i].abs(), st.s[i].abs(), r[i].abs());
            let rows = [
                (dim.p12 * ri - dim.d13 * s - dim.d1).abs() + dim.p12 * a + dim.d13 * a,
                (dim.p31 * a - dim.d3).abs() + dim.p31 * s,
                (dim.p21 * a - dim.d23 * s - dim.d2).abs() + dim.p21 * ri + dim.d23 * ri,
                dim.dc + dim.pc2 * (a + ri),
                dim.b52 * ri + dim.r5 + dim.b62 * ri + dim.r6,
            ];
            react = rows.iter().fold(react, |m, v| m.max(*v));
        }
    }
    let pair = |rate: f64, speed: f64| match opts.transport {
        KineticTransport::Central => (1.0 / rate).min(2.0 * rate / (rate * rate + speed * speed)),
        KineticTransport::Upwind => 1.0 / (rate + speed),
    };
    let mut dt = pair(rate_r, st.vr.v_cap / (eps * dx));
    if !opts.freeze_c {
        dt = dt.min(pair(dim.sigma / (eps * eps), st.vc.v_cap / (eps * dx)));
    }
    if bias > 0.0 {
        dt = dt.min(1.0 / bias);
    }
    if react > 0.0 {
        dt = dt.min(1.0 / react);
    }
    Ok(dt)
}

/// Counters from a kinetic run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KineticRunStats {
    pub steps: u64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Distribution entries found below zero after a step.
    pub negative_events: usize,
    /// Largest `|E1 + E2 + E - E_bar|` seen.
    pub max_myelin_defect: f64,
}

/// Explicit Euler with reusable buffers.
#[derive(Debug, Clone)]
pub struct KineticStepper {
    pub opts: KineticOptions,
    k: KineticDerivative,
}

impl KineticStepper {
    pub fn new(st: &KineticState, opts: KineticOptions) -> Result<Self> {
        if !(opts.dt_safety > 0.0 && opts.dt_safety <= 1.0) {
            return Err(Error::param("dt_safety", "must lie in (0, 1]"));
        }
        Ok(KineticStepper {
            opts,
            k: KineticDerivative::sized(st),
        })
    }

    pub fn step(
        &mut self,
        st: &mut KineticState,
        dim: &DimensionalParams,
        dt: f64,
    ) -> Result<usize> {
        rhs_into(st, dim, &self.opts, &mut self.k)?;
        let k = &self.k;
        let pairs: [(&mut Vec<f64>, &Vec<f64>); 7] = [
            (&mut st.fr, &k.fr),
            (&mut st.fc, &k.fc),
            (&mut st.a, &k.a),
            (&mut st.s, &k.s),
            (&mut st.e1, &k.e1),
            (&mut st.e2, &k.e2),
            (&mut st.e, &k.e),
        ];
        for (u, du) in pairs {
            for (x, d) in u.iter_mut().zip(du) {
                *x += dt * d;
            }
        }
        let t_old = st.t;
        st.t += dt;
        if st
            .fr
            .iter()
            .chain(&st.fc)
            .chain(&st.a)
            .chain(&st.e)
            .any(|v| !v.is_finite())
        {
            return Err(Error::Divergence {
                t: t_old,
                dt,
                field: "kinetic".into(),
            });
        }
        Ok(st.negative_entries())
    }

    /// Advances to `t + duration`, shortening the last step to land on it.
    pub fn advance(
        &mut self,
        st: &mut KineticState,
        dim: &DimensionalParams,
        duration: f64,
    ) -> Result<KineticRunStats> {
        let t_end = st.t + duration;
        let mut stats = KineticRunStats {
            dt_min: f64::INFINITY,
            ..Default::default()
        };
        while st.t < t_end {
            let bound = self.opts.dt_safety * kinetic_dt_bound(st, dim, &self.opts)?;
            let dt = bound.min(t_end - st.t);
            let lands = dt >= t_end - st.t;
            stats.negative_events += self.step(st, dim, dt)?;
            if lands {
                st.t = t_end;
            }
            stats.steps += 1;
            stats.dt_min = stats.dt_min.min(dt);
            stats.dt_max = stats.dt_max.max(dt);
            stats.max_myelin_defect = stats.max_myelin_defect.max(st.myelin_defect(dim.e_bar));
        }
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{equilibrium, nondimensionalize};
    use crate::pde::{FieldState, Grid1D};

    fn equilibrium_fields(dim: &DimensionalParams, n: usize) -> FieldState {
        let p = nondimensionalize(dim).unwrap();
        let u = dim.scales().to_dimensional(equilibrium(&p).as_array());
        FieldState::uniform(n, u)
    }

    #[test]
    fn homogeneous_equilibrium_is_stationary() {
        let dim = DimensionalParams::paper_reference();
        let g = Grid1D::new(10.0, 32).unwrap();
        let f = equilibrium_fields(&dim, 32);
        let st = KineticState::lift(&f, &dim, &g, 0.1, 16, 16).unwrap();
        let d = kinetic_rhs(&st, &dim, &KineticOptions::default()).unwrap();
        for v in
            d.fr.iter()
                .chain(&d.fc)
                .chain(&d.a)
                .chain(&d.s)
                .chain(&d.e1)
                .chain(&d.e2)
                .chain(&d.e)
        {
            assert!(v.abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn myelin_rows_telescope() {
        let dim = DimensionalParams::paper_reference();
        let g = Grid1D::new(10.0, 32).unwrap();
        let mut f = equilibrium_fields(&dim, 32);
        for i in 0..32 {
            f.r[i] *= 1.0 + 0.3 * (i as f64).sin();
            f.e[i] = 0.1 * i as f64 / 32.0;
        }
        let mut st = KineticState::lift(&f, &dim, &g, 0.1, 16, 16).unwrap();
        st.e1[4] += 0.05;
        st.e2[4] -= 0.05;
        let d = kinetic_rhs(&st, &dim, &KineticOptions::default()).unwrap();
        for i in 0..32 {
            assert!((d.e1[i] + d.e2[i] + d.e[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cytokine_production_matches_local_rate() {
        let dim = DimensionalParams::paper_reference();
        let g = Grid1D::new(10.0, 32).unwrap();
        let f = FieldState::uniform(32, [0.7, 0.0, 0.4, 0.0, 0.0]);
        let st = KineticState::lift(&f, &dim, &g, 0.1, 16, 16).unwrap();
        let d = kinetic_rhs(&st, &dim, &KineticOptions::default()).unwrap();
        let produced = st.vc.integrate(&d.fc[..16]);
        assert!((produced - dim.pc2 * 0.7 * 0.4).abs() < 1e-14);
    }

    #[test]
    fn transport_and_turning_conserve_mass() {
        let dim = DimensionalParams::paper_reference();
        let g = Grid1D::new(10.0, 32).unwrap();
        let mut f = equilibrium_fields(&dim, 32);
        for i in 0..32 {
            f.r[i] *= 1.0 + 0.5 * (0.7 * i as f64).cos();
            f.c[i] *= 1.0 + 0.5 * (0.3 * i as f64).sin();
        }
        for transport in [KineticTransport::Central, KineticTransport::Upwind] {
            let opts = KineticOptions {
                interactions: false,
                transport,
                ..KineticOptions::default()
            };
            let mut st = KineticState::lift(&f, &dim, &g, 0.1, 16, 16).unwrap();
            let (m_r, m_c) = (g.integrate(&st.density_r()), g.integrate(&st.density_c()));
            let mut stepper = KineticStepper::new(&st, opts).unwrap();
            let stats = stepper.advance(&mut st, &dim, 0.2).unwrap();
            assert!(stats.steps > 10);
            assert!((g.integrate(&st.density_r()) - m_r).abs() < 1e-12 * m_r);
            assert!((g.integrate(&st.density_c()) - m_c).abs() < 1e-12 * m_c);
            assert_eq!(stats.negative_events, 0);
        }
    }

    #[test]
    fn myelin_total_is_kept() {
        let dim = DimensionalParams::paper_reference();
        let g = Grid1D::new(10.0, 32).unwrap();
        let mut f = equilibrium_fields(&dim, 32);
        f.e.iter_mut().for_each(|e| *e = 0.0);
        let mut st = KineticState::lift(&f, &dim, &g, 0.1, 16, 16).unwrap();
        let mut stepper = KineticStepper::new(&st, KineticOptions::default()).unwrap();
        let stats = stepper.advance(&mut st, &dim, 1.0).unwrap();
        assert!(stats.steps >= 100);
        assert!(
            stats.max_myelin_defect < 1e-10,
            "{}",
            stats.max_myelin_defect
        );
        assert!(st.e.iter().all(|e| *e > 0.0));
    }
}
