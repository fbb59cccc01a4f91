use serde::{Deserialize, Serialize};

use super::solver::centred_gradient;
use super::velocity::VelocityGrid;
use crate::error::{Error, Result};
use crate::model::DimensionalParams;
use crate::pde::{FieldState, Grid1D};

/// Which macroscopic transport and myelin law the reference solver uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MacroClosure {
    /// `D_R = V^2/(3 lambda)`, chemotaxis `chi Phi1(R) R dC` with
    /// `chi = gamma omega V / 4`, and the saturating myelin law.
    Nominal,
    /// What the discrete kinetic model converges to: diffusivities from the
    /// discrete velocity moments, chemotaxis `chi_k Phi0(R) Phi1(R) R dC`
    /// with `chi_k = gamma sum(w v^2) / V`, and sane myelin frozen on the
    /// fast time scale.
    #[default]
    KineticLimit,
}

impl MacroClosure {
    pub fn name(self) -> &'static str {
        match self {
            MacroClosure::Nominal => "nominal",
            MacroClosure::KineticLimit => "kinetic-limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroCoefficients {
    pub closure: MacroClosure,
    pub d_r: f64,
    pub d_c: f64,
    pub chi: f64,
    pub phi0_in_chemotaxis: bool,
}

impl MacroCoefficients {
    pub fn new(
        dim: &DimensionalParams,
        closure: MacroClosure,
        vr: &VelocityGrid,
        vc: &VelocityGrid,
    ) -> Self {
        match closure {
            MacroClosure::Nominal => MacroCoefficients {
                closure,
                d_r: dim.diffusion_r(),
                d_c: dim.diffusion_c(),
                chi: dim.chi(),
                phi0_in_chemotaxis: false,
            },
            MacroClosure::KineticLimit => MacroCoefficients {
                closure,
                d_r: vr.second_moment() / (vr.omega * dim.lambda),
                d_c: vc.second_moment() / (vc.omega * dim.sigma),
                chi: dim.gamma * vr.second_moment() / dim.v_cap,
                phi0_in_chemotaxis: true,
            },
        }
    }
}

/// Macroscopic fields plus the sane-myelin level used by the kinetic-limit
/// closure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroState {
    pub fields: FieldState,
    pub e1: Vec<f64>,
}

/// `(J[i+1] - J[i-1]) / (2 dx)` with odd reflection of `J` at the walls.
fn centred_divergence(j: &[f64], dx: f64, out: &mut [f64]) {
    let n = j.len();
    for i in 0..n {
        let left = if i == 0 { -j[0] } else { j[i - 1] };
        let right = if i + 1 == n { -j[n - 1] } else { j[i + 1] };
        out[i] = (right - left) / (2.0 * dx);
    }
}

/// Time derivative of the reference system. Transport uses centred
/// gradients and divergences with mirrored ghosts: the exact discrete
/// limit of the kinetic scheme with central streaming.
pub fn macro_rhs(
    st: &MacroState,
    dim: &DimensionalParams,
    grid: &Grid1D,
    coef: &MacroCoefficients,
    interactions: bool,
    freeze_c: bool,
) -> FieldState {
    let f = &st.fields;
    let n = f.len();
    let sq = dim.squeeze;
    let gr = centred_gradient(&f.r, grid.dx);
    let gc = centred_gradient(&f.c, grid.dx);
    let mut out = FieldState::zeros(n);
    let jr: Vec<f64> = (0..n)
        .map(|i| {
            let rel = f.r[i] / dim.r_m;
            let phi0 = sq.phi0_unchecked(rel);
            let sens = if coef.phi0_in_chemotaxis { phi0 } else { 1.0 };
            coef.d_r * phi0 * gr[i] - coef.chi * sens * sq.phi1_unchecked(rel) * f.r[i] * gc[i]
        })
        .collect();
    centred_divergence(&jr, grid.dx, &mut out.r);
    if !freeze_c {
        let jc: Vec<f64> = gc.iter().map(|g| coef.d_c * g).collect();
        centred_divergence(&jc, grid.dx, &mut out.c);
    }
    if interactions {
        for i in 0..n {
            let [a, s, r, c, e] = f.cell(i);
            out.a[i] = dim.alpha + dim.p12 * a * r - dim.d13 * a * s - dim.d1 * a;
            out.s[i] = dim.p31 * s * a - dim.d3 * s;
            out.r[i] += (dim.p21 * a - dim.d23 * s - dim.d2) * r;
            if !freeze_c {
                out.c[i] += dim.pc2 * a * r - dim.dc * c;
            }
            out.e[i] = match coef.closure {
                MacroClosure::Nominal => dim.reaction_terms([a, s, r, c, e])[4],
                MacroClosure::KineticLimit => dim.b62 * (dim.e_bar - st.e1[i] - e) * r - dim.r6 * e,
            };
        }
    }
    out
}

/// Classical RK4 on the reference system with a fixed step no larger than
/// `dt_max`, shortened to land on `duration`.
pub fn macro_advance(
    st: &mut MacroState,
    dim: &DimensionalParams,
    grid: &Grid1D,
    coef: &MacroCoefficients,
    interactions: bool,
    freeze_c: bool,
    duration: f64,
    dt_max: f64,
) -> Result<()> {
    if st.fields.len() != grid.n || st.e1.len() != grid.n {
        return Err(Error::GridMismatch(
            "reference state and grid differ".into(),
        ));
    }
    let steps = (duration / dt_max).ceil().max(1.0) as usize;
    let dt = duration / steps as f64;
    let t0 = st.fields.t;
    let shifted = |base: &MacroState, h: f64, k: &FieldState| {
        let mut out = base.clone();
        out.fields.set_axpy(&base.fields, h, k);
        out
    };
    for step in 0..steps {
        let k1 = macro_rhs(st, dim, grid, coef, interactions, freeze_c);
        let k2 = macro_rhs(
            &shifted(st, 0.5 * dt, &k1),
            dim,
            grid,
            coef,
            interactions,
            freeze_c,
        );
        let k3 = macro_rhs(
            &shifted(st, 0.5 * dt, &k2),
            dim,
            grid,
            coef,
            interactions,
            freeze_c,
        );
        let k4 = macro_rhs(
            &shifted(st, dt, &k3),
            dim,
            grid,
            coef,
            interactions,
            freeze_c,
        );
        let ks = [k1.fields(), k2.fields(), k3.fields(), k4.fields()];
        for (f, field) in st.fields.fields_mut().into_iter().enumerate() {
            for i in 0..field.len() {
                field[i] +=
                    dt / 6.0 * (ks[0][f][i] + 2.0 * (ks[1][f][i] + ks[2][f][i]) + ks[3][f][i]);
            }
        }
        st.fields.t = t0 + (step + 1) as f64 * dt;
        if st
            .fields
            .fields()
            .iter()
            .any(|u| u.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::Divergence {
                t: st.fields.t,
                dt,
                field: "reference".into(),
            });
        }
    }
    Ok(())
}

/// Explicit-diffusion step limit `dx^2 / (2 D max Phi0)` for the reference.
pub fn macro_dt_limit(dim: &DimensionalParams, grid: &Grid1D, coef: &MacroCoefficients) -> f64 {
    let d = (coef.d_r * dim.squeeze.phi0_max()).max(coef.d_c);
    grid.dx * grid.dx / (2.0 * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::nondimensionalize;
    use crate::pde::{init_state, simulate_from, SimOptions};

    #[test]
    fn kinetic_coefficients_approach_the_continuum_ones() {
        let dim = DimensionalParams::paper_reference();
        let vr = VelocityGrid::new(dim.v_cap, 64).unwrap();
        let vc = VelocityGrid::new(dim.w_cap, 64).unwrap();
        let k = MacroCoefficients::new(&dim, MacroClosure::KineticLimit, &vr, &vc);
        let p = MacroCoefficients::new(&dim, MacroClosure::Nominal, &vr, &vc);
        assert!((k.d_r / p.d_r - 1.0).abs() < 1e-3);
        assert!((k.d_c / p.d_c - 1.0).abs() < 1e-3);
        // 2 gamma V^2 / 3 against gamma V^2 / 2
        assert!((k.chi / p.chi - 4.0 / 3.0).abs() < 1e-3);
    }

    /// The nominal closure is the dimensionless model: on the reference
    /// constants it tracks the finite-volume solver up to discretisation.
    #[test]
    fn nominal_closure_tracks_the_main_solver() {
        let dim = DimensionalParams::paper_reference();
        let p = nondimensionalize(&dim).unwrap();
        let g = Grid1D::reference(128).unwrap();
        let mut init = init_state(&p, &g, 3, 0.05).unwrap();
        // smooth the data so the two discretisations agree to O(dx^2)
        for f in init.fields_mut().into_iter().take(4) {
            let m = f.iter().sum::<f64>() / f.len() as f64;
            for (i, v) in f.iter_mut().enumerate() {
                *v = m * (1.0 + 0.05 * (2.0 * std::f64::consts::PI * g.center(i) / g.length).cos());
            }
        }
        let opts = SimOptions {
            t_end: 1.0,
            ..SimOptions::default()
        }
        .with_fields(&["R", "E"]);
        let fv = simulate_from(init.clone(), &p, &g, &opts).unwrap();
        let vr = VelocityGrid::new(1.0, 16).unwrap();
        let coef = MacroCoefficients::new(&dim, MacroClosure::Nominal, &vr, &vr);
        let mut st = MacroState {
            e1: vec![0.0; g.n],
            fields: init,
        };
        let dt = 0.2 * macro_dt_limit(&dim, &g, &coef);
        macro_advance(&mut st, &dim, &g, &coef, true, false, 1.0, dt).unwrap();
        for (name, ours) in [("R", &st.fields.r), ("E", &st.fields.e)] {
            let theirs = fv.fields[name].last().unwrap();
            for i in 0..g.n {
                assert!(
                    (ours[i] - theirs[i]).abs() < 1e-3,
                    "{name} cell {i}: {} vs {}",
                    ours[i],
                    theirs[i]
                );
            }
        }
    }
}
