use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use super::state::FieldState;
use crate::model::{reaction_terms_unchecked, ModelParams};

/// Discretisation of the leukocyte flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluxScheme {
    /// Central gradients, arithmetic face averages of `Phi0(R)` and
    /// `Phi1(R) R`.
    #[default]
    Central,
    /// Sign-preserving variant. Random motility is written as
    /// `Phi1 dR - R dPhi1` (equal to `Phi0 dR`) with the cross terms taken
    /// from opposite cells, and chemotaxis is upwinded with the volume
    /// factor evaluated in the receiving cell. Outflow from a cell is always
    /// proportional to its own density, and inflow shuts off once the
    /// receiving cell is full.
    VolumeFillingUpwind,
}

impl FluxScheme {
    pub fn name(self) -> &'static str {
        match self {
            FluxScheme::Central => "central",
            FluxScheme::VolumeFillingUpwind => "volume-filling-upwind",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "central" => Some(FluxScheme::Central),
            "volume-filling-upwind" | "upwind" => Some(FluxScheme::VolumeFillingUpwind),
            _ => None,
        }
    }
}

/// Face values of `Phi0(R) dR/dx - xi Phi1(R) R dC/dx`, length `N + 1`,
/// zero on both boundary faces.
pub fn flux_r(
    r: &[f64],
    c: &[f64],
    p: &ModelParams,
    grid: &Grid1D,
    scheme: FluxScheme,
) -> Vec<f64> {
    let mut out = vec![0.0; r.len() + 1];
    flux_r_into(r, c, p, grid, scheme, &mut out);
    out
}

pub(crate) fn flux_r_into(
    r: &[f64],
    c: &[f64],
    p: &ModelParams,
    grid: &Grid1D,
    scheme: FluxScheme,
    out: &mut [f64],
) {
    let n = r.len();
    debug_assert_eq!(out.len(), n + 1);
    let inv_dx = 1.0 / grid.dx;
    let sq = p.squeeze;
    out[0] = 0.0;
    out[n] = 0.0;
    match scheme {
        FluxScheme::Central => {
            let mut d_left = sq.phi0_unchecked(r[0]);
            let mut w_left = sq.phi1_unchecked(r[0]) * r[0];
            for i in 0..n - 1 {
                let d_right = sq.phi0_unchecked(r[i + 1]);
                let w_right = sq.phi1_unchecked(r[i + 1]) * r[i + 1];
                let dr = (r[i + 1] - r[i]) * inv_dx;
                let dc = (c[i + 1] - c[i]) * inv_dx;
                out[i + 1] = 0.5 * (d_left + d_right) * dr - p.xi * 0.5 * (w_left + w_right) * dc;
                d_left = d_right;
                w_left = w_right;
            }
        }
        FluxScheme::VolumeFillingUpwind => {
            let mut q_left = sq.phi1_unchecked(r[0]);
            for i in 0..n - 1 {
                let q_right = sq.phi1_unchecked(r[i + 1]);
                let diffusive = (q_left * r[i + 1] - q_right * r[i]) * inv_dx;
                let v = p.xi * (c[i + 1] - c[i]) * inv_dx;
                // rightward transport flux; the bracket is its negative
                let advective = v.max(0.0) * r[i] * q_right - (-v).max(0.0) * r[i + 1] * q_left;
                out[i + 1] = diffusive - advective;
                q_left = q_right;
            }
        }
    }
}

/// Scratch buffers for [`rhs_into`].
#[derive(Debug, Clone)]
pub struct RhsWorkspace {
    flux: Vec<f64>,
}

impl RhsWorkspace {
    pub fn new(n: usize) -> Self {
        RhsWorkspace {
            flux: vec![0.0; n + 1],
        }
    }
}

/// Time derivative of every field. With `reactions = false` only transport
/// is kept (used to check discrete conservation).
pub fn rhs(
    state: &FieldState,
    p: &ModelParams,
    grid: &Grid1D,
    scheme: FluxScheme,
    reactions: bool,
) -> FieldState {
    let mut out = FieldState::zeros(state.len());
    let mut ws = RhsWorkspace::new(state.len());
    rhs_into(state, p, grid, scheme, reactions, &mut ws, &mut out);
    out
}

pub fn rhs_into(
    state: &FieldState,
    p: &ModelParams,
    grid: &Grid1D,
    scheme: FluxScheme,
    reactions: bool,
    ws: &mut RhsWorkspace,
    out: &mut FieldState,
) {
    let n = state.len();
    let inv_dx = 1.0 / grid.dx;
    flux_r_into(&state.r, &state.c, p, grid, scheme, &mut ws.flux);
    let diff_c = p.delta * inv_dx * inv_dx;
    out.t = state.t;
    for i in 0..n {
        let transport_r = (ws.flux[i + 1] - ws.flux[i]) * inv_dx;
        let c_left = if i > 0 { state.c[i - 1] } else { state.c[i] };
        let c_right = if i + 1 < n {
            state.c[i + 1]
        } else {
            state.c[i]
        };
        let transport_c = diff_c * (c_left - 2.0 * state.c[i] + c_right);
        if reactions {
            let f = reaction_terms_unchecked(state.cell(i), p);
            out.a[i] = f[0];
            out.s[i] = f[1];
            out.r[i] = transport_r + f[2];
            out.c[i] = transport_c + f[3];
            out.e[i] = f[4];
        } else {
            out.a[i] = 0.0;
            out.s[i] = 0.0;
            out.r[i] = transport_r;
            out.c[i] = transport_c;
            out.e[i] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::equilibrium;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn grid() -> Grid1D {
        Grid1D::new(10.0, 40).unwrap()
    }

    #[test]
    fn uniform_fields_have_zero_flux() {
        let p = ModelParams::paper();
        for scheme in [FluxScheme::Central, FluxScheme::VolumeFillingUpwind] {
            let f = flux_r(&[0.3; 40], &[0.7; 40], &p, &grid(), scheme);
            assert_eq!(f.len(), 41);
            assert!(f.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn linear_cytokine_gives_chemotactic_flux() {
        let p = ModelParams::paper();
        let g = grid();
        let r1 = equilibrium(&p).r1;
        let slope = 0.05;
        let c: Vec<f64> = g.centers().iter().map(|x| slope * x).collect();
        let expect = -p.xi * p.squeeze.phi1_unchecked(r1) * r1 * slope;
        for scheme in [FluxScheme::Central, FluxScheme::VolumeFillingUpwind] {
            let f = flux_r(&vec![r1; g.n], &c, &p, &g, scheme);
            assert_eq!(f[0], 0.0);
            assert_eq!(f[g.n], 0.0);
            for v in &f[1..g.n] {
                assert_abs_diff_eq!(*v, expect, epsilon = 1e-12);
            }
        }
        // negative bracket = transport toward larger x, i.e. up the gradient
        assert!(expect < 0.0);
    }

    #[test]
    fn upwind_random_motility_matches_phi0_form() {
        // For a smooth R profile the two-point form q dR - R dq approximates
        // Phi0(R) dR to second order.
        let p = ModelParams::paper();
        let g = Grid1D::new(1.0, 400).unwrap();
        let r: Vec<f64> = g
            .centers()
            .iter()
            .map(|x| 0.3 + 0.2 * (3.0 * x).sin())
            .collect();
        let c = vec![0.0; g.n];
        let a = flux_r(&r, &c, &p, &g, FluxScheme::Central);
        let b = flux_r(&r, &c, &p, &g, FluxScheme::VolumeFillingUpwind);
        for i in 1..g.n {
            assert!((a[i] - b[i]).abs() < 1e-4, "{i}: {} vs {}", a[i], b[i]);
        }
    }

    #[test]
    fn uniform_equilibrium_is_stationary() {
        let p = ModelParams::paper();
        let g = grid();
        let st = FieldState::uniform(g.n, equilibrium(&p).as_array());
        let d = rhs(&st, &p, &g, FluxScheme::Central, true);
        for f in d.fields() {
            assert!(f.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn spike_in_cytokine_attracts_leukocytes() {
        let p = ModelParams::paper();
        let g = grid();
        let r1 = equilibrium(&p).r1;
        let mut st = FieldState::uniform(g.n, [0.0, 0.0, r1, 0.0, 0.0]);
        let k = 20;
        st.c[k] = 1.0;
        let d = rhs(&st, &p, &g, FluxScheme::Central, false);
        assert!(d.r[k] > 0.0);
        assert!(d.r[k - 1] < 0.0 && d.r[k + 1] < 0.0);
        assert!(d
            .r
            .iter()
            .enumerate()
            .all(|(i, v)| (i + 1 >= k && i <= k + 1) || *v == 0.0));
    }

    proptest! {
        #[test]
        fn transport_conserves_mass(
            r in proptest::collection::vec(0.0..1.0f64, 32),
            c in proptest::collection::vec(0.0..2.0f64, 32),
            upwind in any::<bool>(),
        ) {
            let p = ModelParams::paper();
            let g = Grid1D::new(5.0, 32).unwrap();
            let mut st = FieldState::zeros(32);
            st.r = r;
            st.c = c;
            let scheme = if upwind { FluxScheme::VolumeFillingUpwind } else { FluxScheme::Central };
            let d = rhs(&st, &p, &g, scheme, false);
            prop_assert!(g.integrate(&d.r).abs() < 1e-12);
            prop_assert!(g.integrate(&d.c).abs() < 1e-12);
        }
    }
}
