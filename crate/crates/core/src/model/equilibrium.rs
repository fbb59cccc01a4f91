use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use crate::error::{Error, Result};

/// Local reaction rates at a state `(A, S, R, C, E)`; transport excluded.
pub fn reaction_terms(state: [f64; 5], p: &ModelParams) -> Result<[f64; 5]> {
    let denom = p.omega_cap + state[2];
    if denom == 0.0 {
        return Err(Error::Singular("myelin damage rate (Omega + R = 0)"));
    }
    Ok(reaction_terms_unchecked(state, p))
}

/// Same as [`reaction_terms`] without the denominator check; used in hot
/// loops where `R >= 0` is already guaranteed.
#[inline]
pub fn reaction_terms_unchecked(state: [f64; 5], p: &ModelParams) -> [f64; 5] {
    let [a, s, r, c, e] = state;
    [
        1.0 + p.beta * a * r - a * s - p.zeta * a,
        p.mu * a * s - s,
        p.eta * a * r - p.phi * r * s - p.theta * r,
        a * r - p.tau * c,
        p.theta_cap * r * r * (1.0 - e) / (p.omega_cap + r) - p.xi_cap * e,
    ]
}

/// Homogeneous steady state with positive leukocyte density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub a1: f64,
    pub s1: f64,
    pub r1: f64,
    pub c1: f64,
    pub e1: f64,
    pub admissible: bool,
    pub violated_conditions: Vec<String>,
}

impl EquilibriumPoint {
    pub fn as_array(&self) -> [f64; 5] {
        [self.a1, self.s1, self.r1, self.c1, self.e1]
    }

    pub fn require_admissible(&self) -> Result<()> {
        if self.admissible {
            Ok(())
        } else {
            Err(Error::Inadmissible(self.violated_conditions.clone()))
        }
    }
}

pub fn equilibrium(p: &ModelParams) -> EquilibriumPoint {
    let mu = p.mu;
    let a1 = 1.0 / mu;
    let s1 = (p.eta - p.theta * mu) / (mu * p.phi);
    let r1 = (-p.theta * mu + p.eta + mu * p.phi * (p.zeta - mu)) / (p.beta * mu * p.phi);
    let c1 = r1 / (mu * p.tau);
    let e1 =
        r1 * r1 * p.theta_cap / (r1 * r1 * p.theta_cap + r1 * p.xi_cap + p.xi_cap * p.omega_cap);

    let mut violated = Vec::new();
    if !(a1 > 0.0) {
        violated.push("A1 > 0".to_string());
    }
    if !(s1 > 0.0) {
        violated.push("S1 > 0".to_string());
    }
    if !(r1 > 0.0) {
        violated.push("R1 > 0".to_string());
    }
    if !(r1 <= 1.0) {
        violated.push("R1 <= 1".to_string());
    }
    if !(c1 > 0.0) {
        violated.push("C1 > 0".to_string());
    }
    if !(e1 > 0.0) {
        violated.push("E1 > 0".to_string());
    }
    EquilibriumPoint {
        a1,
        s1,
        r1,
        c1,
        e1,
        admissible: violated.is_empty(),
        violated_conditions: violated,
    }
}

/// Bounds of the admissible `theta` interval: returns
/// `(theta_bar, theta_bar - beta * phi)`; the equilibrium has `R1 > 0` and
/// `S1 > 0` for `theta` strictly between them (the upper end of
/// `R1 <= 1` aside).
pub fn admissibility_bounds(p: &ModelParams) -> (f64, f64) {
    let theta_bar = p.eta / p.mu + p.phi * (p.zeta - p.mu);
    (theta_bar, theta_bar - p.beta * p.phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn reaction_terms_examples() {
        let p = ModelParams::paper();
        assert_eq!(
            reaction_terms([0.0; 5], &p).unwrap(),
            [1.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            reaction_terms([1.0, 0.0, 0.0, 0.0, 0.0], &p).unwrap(),
            [-1.0, 0.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn singular_denominator_is_reported() {
        let mut p = ModelParams::paper();
        p.omega_cap = 0.5;
        let err = reaction_terms([0.0, 0.0, -0.5, 0.0, 0.0], &p).unwrap_err();
        assert_eq!(err.kind(), "singular");
    }

    #[test]
    fn reference_equilibrium() {
        let eq = equilibrium(&ModelParams::paper());
        assert!(eq.admissible);
        let expect = [0.497512, 0.077512, 0.337562, 0.335883, 0.998023];
        for (got, want) in eq.as_array().iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-5);
        }
        let res = reaction_terms(eq.as_array(), &ModelParams::paper()).unwrap();
        for r in res {
            assert!(r.abs() < 1e-12, "{res:?}");
        }
    }

    #[test]
    fn high_theta_is_inadmissible() {
        let eq = equilibrium(&ModelParams::paper().with_theta(0.6));
        assert!(eq.r1 < 0.0);
        assert!(!eq.admissible);
        assert!(eq.violated_conditions.iter().any(|c| c == "R1 > 0"));
        assert!(eq.require_admissible().is_err());
    }

    #[test]
    fn cytokine_level_tracks_leukocytes() {
        let eq = equilibrium(&ModelParams::paper());
        assert_abs_diff_eq!(eq.c1, eq.r1 / 1.005, epsilon = 1e-15);
    }

    #[test]
    fn reference_bounds() {
        let (hi, lo) = admissibility_bounds(&ModelParams::paper());
        assert_abs_diff_eq!(hi, 0.49, epsilon = 0.005);
        assert_abs_diff_eq!(lo, 0.29, epsilon = 0.005);
        assert_abs_diff_eq!(hi, 0.487512, epsilon = 1e-6);

        let mut p = ModelParams::paper();
        p.beta = 0.0;
        let (hi, lo) = admissibility_bounds(&p);
        assert_eq!(hi, lo);
    }

    fn arb_params() -> impl Strategy<Value = ModelParams> {
        (
            0.05..2.0f64,
            0.1..3.0f64,
            0.1..3.0f64,
            0.1..3.0f64,
            0.1..3.0f64,
            0.01..1.5f64,
            1.0..50.0f64,
            1e-4..0.1f64,
            1e-3..0.5f64,
        )
            .prop_map(
                |(beta, zeta, mu, eta, phi, theta, tc, om, xc)| ModelParams {
                    beta,
                    zeta,
                    mu,
                    eta,
                    phi,
                    theta,
                    theta_cap: tc,
                    omega_cap: om,
                    xi_cap: xc,
                    ..ModelParams::paper()
                },
            )
    }

    /// Places theta inside the admissible window of an arbitrary draw.
    fn arb_admissible() -> impl Strategy<Value = ModelParams> {
        (arb_params(), 0.0..1.0f64).prop_map(|(mut p, frac)| {
            let (hi, lo) = admissibility_bounds(&p);
            let top = hi.min(p.eta / p.mu);
            let bottom = lo.max(0.0);
            p.theta = bottom + frac * (top - bottom);
            p
        })
    }

    proptest! {
        #[test]
        fn admissible_equilibria_are_fixed_points(p in arb_admissible()) {
            let eq = equilibrium(&p);
            prop_assume!(eq.admissible);
            let res = reaction_terms(eq.as_array(), &p).unwrap();
            for r in res {
                prop_assert!(r.abs() < 1e-12, "{:?}", res);
            }
        }

        #[test]
        fn admissible_iff_inside_theta_window(p in arb_params()) {
            let eq = equilibrium(&p);
            let (hi, lo) = admissibility_bounds(&p);
            let inside = p.theta < hi && p.theta > lo && p.theta < p.eta / p.mu;
            if eq.r1 <= 1.0 {
                prop_assert_eq!(eq.admissible, inside);
            }
        }

        #[test]
        fn window_implies_s_positive_when_zeta_below_mu(p in arb_params()) {
            prop_assume!(p.zeta < p.mu);
            let (hi, _) = admissibility_bounds(&p);
            if p.theta < hi {
                prop_assert!(p.theta < p.eta / p.mu);
            }
        }
    }
}
