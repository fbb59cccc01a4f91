use std::f64::consts::PI;

use nalgebra::{Complex, Matrix5, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{equilibrium, EquilibriumPoint, ModelParams};

/// Which cytokine row to put in the Jacobian.
///
/// `Factored` uses `(0, 0, 1, -tau, 0)`: it is the form under which the
/// determinant factorises into the dispersion function `h(k^2)` and the
/// Turing threshold is derived. `Consistent` uses the exact derivative
/// `(R1, 0, A1, -tau, 0)` of `A R - tau C`, which is what the nonlinear
/// solver actually linearises to. The homogeneous spectrum is the same for
/// both since the cytokine row does not feed back into `(A, S, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianForm {
    #[default]
    Factored,
    Consistent,
}

impl JacobianForm {
    pub fn name(self) -> &'static str {
        match self {
            JacobianForm::Factored => "factored",
            JacobianForm::Consistent => "consistent",
        }
    }
}

/// Jacobian and transport matrix at the homogeneous equilibrium, state
/// ordering `(A, S, R, C, E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    pub a_matrix: Matrix5<f64>,
    pub d_matrix: Matrix5<f64>,
    pub form: JacobianForm,
    pub equilibrium: EquilibriumPoint,
}

impl LinearizedSystem {
    /// `A - k^2 D`.
    pub fn at(&self, k2: f64) -> Matrix5<f64> {
        self.a_matrix - self.d_matrix * k2
    }
}

pub fn linearize(p: &ModelParams, eq: &EquilibriumPoint) -> Result<LinearizedSystem> {
    linearize_with(p, eq, JacobianForm::Factored)
}

pub fn linearize_with(
    p: &ModelParams,
    eq: &EquilibriumPoint,
    form: JacobianForm,
) -> Result<LinearizedSystem> {
    eq.require_admissible()?;
    let r1 = eq.r1;
    let mu = p.mu;
    let (th, xc, om) = (p.theta_cap, p.xi_cap, p.omega_cap);
    let damage_denom = r1 * (r1 * th + xc) + xc * om;

    let mut a = Matrix5::zeros();
    a[(0, 0)] = -mu;
    a[(0, 1)] = -1.0 / mu;
    a[(0, 2)] = p.beta / mu;
    a[(1, 0)] = (p.eta - p.theta * mu) / p.phi;
    a[(2, 0)] = r1 * p.eta;
    a[(2, 1)] = -r1 * p.phi;
    match form {
        JacobianForm::Factored => a[(3, 2)] = 1.0,
        JacobianForm::Consistent => {
            a[(3, 0)] = r1;
            a[(3, 2)] = eq.a1;
        }
    }
    a[(3, 3)] = -p.tau;
    a[(4, 2)] = r1 * th * xc * (r1 + 2.0 * om) / ((r1 + om) * damage_denom);
    a[(4, 4)] = -xc - r1 * r1 * th / (r1 + om);

    let sq = p.squeeze;
    let mut d = Matrix5::zeros();
    d[(2, 2)] = sq.phi0(r1)?;
    d[(2, 3)] = -p.xi * sq.phi1(r1)? * r1;
    d[(3, 3)] = p.delta;

    Ok(LinearizedSystem {
        a_matrix: a,
        d_matrix: d,
        form,
        equilibrium: eq.clone(),
    })
}

/// Coefficients of `l^3 + a1 l^2 + a2 l + a3` for the `(A, S, R)` block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouthHurwitz {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub homogeneous_stable: bool,
}

/// Evaluated from the closed-form equilibrium whether or not it is
/// admissible, so that threshold crossings can be probed on both sides.
pub fn routh_hurwitz(p: &ModelParams) -> RouthHurwitz {
    let r1 = equilibrium(p).r1;
    let a1 = p.mu;
    let a2 = -r1 * p.beta * p.eta / p.mu - p.theta / p.phi + p.eta / (p.mu * p.phi);
    let a3 = r1 * p.beta * (p.eta - p.theta * p.mu) / p.mu;
    RouthHurwitz {
        a1,
        a2,
        a3,
        homogeneous_stable: a1 > 0.0 && a3 > 0.0 && a1 * a2 > a3,
    }
}

/// Values of `theta` where `a1 a2 = a3`, as `(theta_minus, theta_plus)`;
/// `None` when the quadratic has no real roots.
pub fn theta_hopf(p: &ModelParams) -> Option<(f64, f64)> {
    let (eta, mu, phi, zeta) = (p.eta, p.mu, p.phi, p.zeta);
    let disc = eta * eta + 2.0 * eta * mu * (phi - 1.0) - 2.0 * zeta * eta * phi
        + (mu - zeta * phi + mu * phi).powi(2);
    if disc < 0.0 {
        return None;
    }
    let centre = eta / mu + 0.5 * (-mu * (1.0 + phi) + eta + zeta * phi);
    let half = 0.5 * disc.sqrt();
    Some((centre - half, centre + half))
}

/// Period `2 pi / sqrt(a2)` of the linear oscillation; `None` if `a2 <= 0`.
pub fn hopf_period(p: &ModelParams) -> Option<f64> {
    let a2 = routh_hurwitz(p).a2;
    (a2 > 0.0).then(|| 2.0 * PI / a2.sqrt())
}

/// `h(k^2) = c2 k^4 + c1 k^2 + c0` whose sign decides whether
/// `det(A - k^2 D)` changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionRelation {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    /// Prefactor `K` in `det(A - k^2 D) = K h(k^2)`.
    pub det_factor: f64,
}

impl DispersionRelation {
    pub fn new(p: &ModelParams) -> Result<Self> {
        let eq = equilibrium(p);
        eq.require_admissible()?;
        let r1 = eq.r1;
        let phi0 = p.squeeze.phi0(r1)?;
        let phi1 = p.squeeze.phi1(r1)?;
        let bp = p.beta * p.phi;
        let (th, xc, om) = (p.theta_cap, p.xi_cap, p.omega_cap);
        Ok(DispersionRelation {
            c2: p.delta * phi0,
            c1: p.delta * r1 * bp - phi1 * r1 * p.xi + phi0 * p.tau,
            c0: p.tau * r1 * bp,
            det_factor: (p.theta * p.mu - p.eta) * (r1 * (r1 * th + xc) + xc * om)
                / (p.mu * p.phi * (r1 + om)),
        })
    }

    pub fn h(&self, k2: f64) -> f64 {
        (self.c2 * k2 + self.c1) * k2 + self.c0
    }

    /// Minimiser of `h` over `k^2 >= 0`.
    pub fn argmin_k2(&self) -> f64 {
        (-self.c1 / (2.0 * self.c2)).max(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.h(self.argmin_k2())
    }

    /// Interval of `k^2` where `h < 0`, if any.
    pub fn negative_band(&self) -> Option<(f64, f64)> {
        let disc = self.c1 * self.c1 - 4.0 * self.c2 * self.c0;
        if disc <= 0.0 || self.c1 >= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        Some((
            (-self.c1 - s) / (2.0 * self.c2),
            (-self.c1 + s) / (2.0 * self.c2),
        ))
    }
}

pub fn dispersion_h(k2: f64, p: &ModelParams) -> Result<f64> {
    if !(k2 >= 0.0) {
        return Err(Error::param(
            "k2",
            format!("squared wavenumber must be >= 0, got {k2}"),
        ));
    }
    Ok(DispersionRelation::new(p)?.h(k2))
}

/// Smallest chemotactic sensitivity for which `h` becomes negative somewhere.
/// `None` when the equilibrium is inadmissible or `Phi1(R1) R1 = 0`.
pub fn turing_threshold_xi(p: &ModelParams) -> Option<f64> {
    let (num, weight) = threshold_parts(p)?;
    (weight > 0.0).then(|| num / weight)
}

/// Numerator and chemotactic weight `Phi1(R1) R1` of the threshold.
fn threshold_parts(p: &ModelParams) -> Option<(f64, f64)> {
    let eq = equilibrium(p);
    if !eq.admissible {
        return None;
    }
    let r1 = eq.r1;
    let phi0 = p.squeeze.phi0(r1).ok()?;
    let phi1 = p.squeeze.phi1(r1).ok()?;
    let bp = p.beta * p.phi;
    let num = 2.0 * (p.delta * phi0 * p.tau * r1 * bp).sqrt() + p.delta * r1 * bp + phi0 * p.tau;
    Some((num, phi1 * r1))
}

/// Homogeneously stable, admissible, and `xi` strictly above the threshold.
pub fn turing_unstable(p: &ModelParams) -> bool {
    match turing_threshold_xi(p) {
        Some(xs) => routh_hurwitz(p).homogeneous_stable && p.xi > xs,
        None => false,
    }
}

/// Spectrum of `A - k^2 D` at one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRate {
    pub k: f64,
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_re: f64,
}

/// Eigenvalues of `A - k^2 D` for every `k`, via a real Schur decomposition.
pub fn growth_rates(
    p: &ModelParams,
    k_list: &[f64],
    form: JacobianForm,
) -> Result<Vec<GrowthRate>> {
    let lin = linearize_with(p, &equilibrium(p), form)?;
    k_list.iter().map(|&k| spectrum(&lin, k)).collect()
}

pub fn spectrum(lin: &LinearizedSystem, k: f64) -> Result<GrowthRate> {
    let m = lin.at(k * k);
    let schur = Schur::try_new(m, 1e-14, 10_000).ok_or(Error::EigenSolver { k })?;
    let mut eigenvalues: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    if eigenvalues
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::EigenSolver { k });
    }
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let max_re = eigenvalues[0].re;
    Ok(GrowthRate {
        k,
        eigenvalues,
        max_re,
    })
}

/// `[k_min, k_max]` spans of consecutive unstable entries (`max_re > 0`).
pub fn unstable_band(rates: &[GrowthRate]) -> Vec<(f64, f64)> {
    let mut bands = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for g in rates {
        if g.max_re > 0.0 {
            open = Some(match open {
                Some((lo, _)) => (lo, g.k),
                None => (g.k, g.k),
            });
        } else if let Some(b) = open.take() {
            bands.push(b);
        }
    }
    bands.extend(open);
    bands
}

/// Wavenumbers `m pi / L` of the Neumann cosine modes `0..=m_max`.
pub fn neumann_wavenumbers(length: f64, m_max: usize) -> Vec<f64> {
    (0..=m_max).map(|m| m as f64 * PI / length).collect()
}

/// Neumann mode with the largest growth rate among `1..=m_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastestMode {
    pub m: usize,
    pub k: f64,
    pub rate: f64,
}

pub fn fastest_neumann_mode(
    p: &ModelParams,
    length: f64,
    m_max: usize,
    form: JacobianForm,
) -> Result<FastestMode> {
    let ks = neumann_wavenumbers(length, m_max);
    let rates = growth_rates(p, &ks[1..], form)?;
    let (i, best) = rates
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.max_re.total_cmp(&b.1.max_re))
        .expect("m_max >= 1");
    Ok(FastestMode {
        m: i + 1,
        k: best.k,
        rate: best.max_re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn reference_lin(form: JacobianForm) -> LinearizedSystem {
        let p = ModelParams::paper();
        linearize_with(&p, &equilibrium(&p), form).unwrap()
    }

    #[test]
    fn jacobian_entries() {
        let lin = reference_lin(JacobianForm::Factored);
        assert_eq!(lin.a_matrix[(0, 0)], -2.01);
        assert_eq!(lin.a_matrix[(3, 3)], -0.5);
        assert_eq!(lin.a_matrix[(3, 2)], 1.0);
        assert_abs_diff_eq!(lin.d_matrix[(2, 3)], -1.74734, epsilon = 1e-4);
        let nonzero = lin.d_matrix.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn inadmissible_equilibrium_is_rejected() {
        let p = ModelParams::paper().with_theta(0.6);
        assert!(matches!(
            linearize(&p, &equilibrium(&p)),
            Err(Error::Inadmissible(_))
        ));
    }

    /// Central differences of the reaction terms reproduce the consistent
    /// Jacobian; the factored one differs only in the cytokine row.
    #[test]
    fn consistent_form_is_the_true_derivative() {
        let p = ModelParams::paper();
        let eq = equilibrium(&p);
        let u = eq.as_array();
        let lin = reference_lin(JacobianForm::Consistent);
        let factored = reference_lin(JacobianForm::Factored);
        let h = 1e-6;
        for j in 0..5 {
            let mut up = u;
            let mut dn = u;
            up[j] += h;
            dn[j] -= h;
            let fu = crate::model::reaction_terms(up, &p).unwrap();
            let fd = crate::model::reaction_terms(dn, &p).unwrap();
            for i in 0..5 {
                let fdiff = (fu[i] - fd[i]) / (2.0 * h);
                assert!(
                    (fdiff - lin.a_matrix[(i, j)]).abs() < 1e-6,
                    "({i},{j}) {fdiff}"
                );
                if i != 3 {
                    assert_eq!(lin.a_matrix[(i, j)], factored.a_matrix[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn routh_hurwitz_reference() {
        let rh = routh_hurwitz(&ModelParams::paper());
        assert_eq!(rh.a1, 2.01);
        assert_abs_diff_eq!(rh.a2, 0.043924, epsilon = 1e-5);
        assert_abs_diff_eq!(rh.a3, 0.0052329, epsilon = 1e-6);
        assert!(rh.homogeneous_stable);
        assert!(rh.a1 * rh.a2 > rh.a3);
    }

    #[test]
    fn hopf_thresholds_reference() {
        let p = ModelParams::paper();
        let (lo, hi) = theta_hopf(&p).unwrap();
        assert_abs_diff_eq!(lo, -0.53, epsilon = 0.005);
        assert_abs_diff_eq!(hi, 0.51, epsilon = 0.005);
        let rh = routh_hurwitz(&p.with_theta(hi));
        assert!((rh.a1 * rh.a2 - rh.a3).abs() < 1e-8 * rh.a3.abs().max(1.0));
    }

    #[test]
    fn period_formula() {
        let p = ModelParams::paper();
        assert_abs_diff_eq!(hopf_period(&p).unwrap(), 29.98, epsilon = 0.05);
        let mut q = p;
        q.theta = 5.0;
        assert!(routh_hurwitz(&q).a2 < 0.0);
        assert!(hopf_period(&q).is_none());
    }

    #[test]
    fn dispersion_reference() {
        let p = ModelParams::paper();
        assert_abs_diff_eq!(dispersion_h(0.0, &p).unwrap(), 0.033756, epsilon = 1e-5);
        let d = DispersionRelation::new(&p).unwrap();
        assert_abs_diff_eq!(d.argmin_k2(), 5.196, epsilon = 0.01);
        assert_abs_diff_eq!(d.min_value(), -3.019, epsilon = 0.005);
        assert!(d.h(1e4) > 0.0);
        assert!(dispersion_h(-1.0, &p).is_err());
    }

    #[test]
    fn turing_threshold_reference() {
        let p = ModelParams::paper();
        assert_abs_diff_eq!(turing_threshold_xi(&p).unwrap(), 2.389, epsilon = 0.01);
        assert!(turing_unstable(&p));
        assert!(!turing_unstable(&p.with_xi(1.0)));
        let xs = turing_threshold_xi(&p).unwrap();
        assert!(!turing_unstable(&p.with_xi(xs)));
        assert!(turing_threshold_xi(&p.with_theta(0.6)).is_none());
    }

    #[test]
    fn homogeneous_spectrum_contains_known_eigenvalues() {
        let p = ModelParams::paper();
        for form in [JacobianForm::Factored, JacobianForm::Consistent] {
            let g = &growth_rates(&p, &[0.0], form).unwrap()[0];
            assert!(g
                .eigenvalues
                .iter()
                .any(|z| (z.re + 0.5).abs() < 1e-10 && z.im.abs() < 1e-12));
            assert!(g.max_re < 0.0);
        }
    }

    #[test]
    fn turing_wavenumber_has_a_positive_eigenvalue() {
        let p = ModelParams::paper();
        let g = &growth_rates(&p, &[5.196f64.sqrt()], JacobianForm::Factored).unwrap()[0];
        assert!(g.max_re > 0.0);
    }

    #[test]
    fn no_instability_without_chemotaxis() {
        let p = ModelParams::paper().with_xi(0.0);
        let ks: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        for form in [JacobianForm::Factored, JacobianForm::Consistent] {
            let rates = growth_rates(&p, &ks, form).unwrap();
            assert!(rates.iter().all(|g| g.max_re < 0.0));
            assert!(unstable_band(&rates).is_empty());
        }
    }

    #[test]
    fn unstable_band_grouping() {
        let mk = |k: f64, r: f64| GrowthRate {
            k,
            eigenvalues: vec![],
            max_re: r,
        };
        let rates = vec![
            mk(0.0, -1.0),
            mk(1.0, 0.5),
            mk(2.0, 0.2),
            mk(3.0, -0.1),
            mk(4.0, 0.1),
        ];
        assert_eq!(unstable_band(&rates), vec![(1.0, 2.0), (4.0, 4.0)]);
    }

    #[test]
    fn fastest_mode_at_reference_domain() {
        let p = ModelParams::paper();
        let l = 7.0 * PI;
        let factored = fastest_neumann_mode(&p, l, 40, JacobianForm::Factored).unwrap();
        let consistent = fastest_neumann_mode(&p, l, 40, JacobianForm::Consistent).unwrap();
        assert!(factored.rate > 0.0 && consistent.rate > 0.0);
        assert!(consistent.m < factored.m);
    }

    fn admissible_draw() -> impl Strategy<Value = ModelParams> {
        (
            0.05..1.0f64,
            0.2..3.0f64,
            0.2..3.0f64,
            0.05..2.0f64,
            0.05..2.0f64,
            0.0..20.0f64,
            0.2..3.0f64,
            0.2..3.0f64,
            0.0..1.0f64,
            1.0..50.0f64,
            1e-4..0.1f64,
            1e-3..0.5f64,
        )
            .prop_map(
                |(beta, zeta, mu, delta, tau, xi, eta, phi, frac, tc, om, xc)| {
                    let mut p = ModelParams {
                        beta,
                        zeta,
                        mu,
                        delta,
                        tau,
                        xi,
                        eta,
                        phi,
                        theta: 0.0,
                        theta_cap: tc,
                        omega_cap: om,
                        xi_cap: xc,
                        ..ModelParams::paper()
                    };
                    // place theta inside the admissible window
                    let (hi, lo) = crate::model::admissibility_bounds(&p);
                    let top = hi.min(eta / mu);
                    let bottom = lo.max(0.0);
                    p.theta = bottom + frac * (top - bottom);
                    p
                },
            )
            .prop_filter("admissible", |p| equilibrium(p).admissible && p.theta > 0.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn determinant_factorises(p in admissible_draw(), k in 0.0..10.0f64) {
            let lin = linearize(&p, &equilibrium(&p)).unwrap();
            let det = lin.at(k * k).determinant();
            let d = DispersionRelation::new(&p).unwrap();
            let factored = d.det_factor * d.h(k * k);
            let scale = det.abs().max(factored.abs()).max(1e-300);
            prop_assert!((det - factored).abs() / scale < 1e-8, "{} vs {}", det, factored);
        }

        #[test]
        fn routh_hurwitz_matches_eigenvalues(p in admissible_draw()) {
            let rh = routh_hurwitz(&p);
            let lin = linearize(&p, &equilibrium(&p)).unwrap();
            let block = lin.a_matrix.fixed_view::<3, 3>(0, 0).into_owned();
            let eig = block.complex_eigenvalues();
            let max_re = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            if max_re.abs() > 1e-9 {
                prop_assert_eq!(rh.homogeneous_stable, max_re < 0.0);
            }
        }

        #[test]
        fn threshold_matches_bisection(p in admissible_draw()) {
            let xs = turing_threshold_xi(&p).unwrap();
            let negative = |xi: f64| DispersionRelation::new(&p.with_xi(xi)).unwrap().min_value() < 0.0;
            let (mut lo, mut hi) = (0.0, 1.0);
            while !negative(hi) {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if negative(mid) { hi = mid } else { lo = mid }
            }
            prop_assert!(((0.5 * (lo + hi)) - xs).abs() / xs < 1e-6);
        }
    }

    #[test]
    fn threshold_decreases_with_chemotactic_weight() {
        let p = ModelParams::paper();
        let (num, weight) = threshold_parts(&p).unwrap();
        let xs = turing_threshold_xi(&p).unwrap();
        assert_abs_diff_eq!(xs, num / weight, epsilon = 1e-14);
        let probe: Vec<f64> = (1..=20)
            .map(|i| num / (weight * (0.5 + 0.05 * i as f64)))
            .collect();
        for w in probe.windows(2) {
            assert!(w[1] < w[0]);
        }
    }
}
