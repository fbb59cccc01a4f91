use serde::{Deserialize, Serialize};

use super::linear::{
    fastest_neumann_mode, growth_rates, hopf_period, routh_hurwitz, theta_hopf,
    turing_threshold_xi, DispersionRelation, FastestMode, JacobianForm,
};
use crate::error::Result;
use crate::model::{admissibility_bounds, equilibrium, EquilibriumPoint, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub k2: f64,
    pub h: f64,
    pub max_re: f64,
}

/// Everything the linear theory says about one parameter set.
///
/// Two routes to Turing instability are reported side by side: the sign of
/// `h(k^2)` and the eigenvalues of `A - k^2 D`. Disagreements between them,
/// and between the factored and consistent Jacobians, are listed in
/// `discrepancies` rather than reconciled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub params: ModelParams,
    pub equilibrium: EquilibriumPoint,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub homogeneous_stable: bool,
    pub theta_bar: f64,
    pub theta_bar_minus_beta_phi: f64,
    pub theta_minus: Option<f64>,
    pub theta_plus: Option<f64>,
    pub hopf_period: Option<f64>,
    pub notes: Vec<String>,
    pub xi_star: Option<f64>,
    pub turing_unstable: bool,
    /// Minimiser of `h` over `k^2 >= 0` and the value there.
    pub k2_star: Option<f64>,
    pub h_min: Option<f64>,
    /// `k^2` interval where `h < 0`.
    pub h_negative_band: Option<(f64, f64)>,
    /// `k^2` intervals where the factored Jacobian has an eigenvalue with
    /// positive real part, on the sampled grid.
    pub eigen_unstable_band: Vec<(f64, f64)>,
    pub dispersion: Vec<DispersionPoint>,
    /// Domain-aware predictions, when a domain length is supplied.
    pub fastest_mode_factored: Option<FastestMode>,
    pub fastest_mode_consistent: Option<FastestMode>,
    pub discrepancies: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub k2_max: f64,
    pub samples: usize,
    pub domain_length: Option<f64>,
    pub max_mode: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            k2_max: 20.0,
            samples: 401,
            domain_length: None,
            max_mode: 64,
        }
    }
}

impl StabilityReport {
    pub fn compute(p: &ModelParams, opts: &ReportOptions) -> Result<Self> {
        p.validate()?;
        let eq = equilibrium(p);
        let rh = routh_hurwitz(p);
        let (theta_bar, theta_low) = admissibility_bounds(p);
        let hopf = theta_hopf(p);
        let mut notes = Vec::new();
        if let Some((_, tp)) = hopf {
            let at_hopf = equilibrium(&p.with_theta(tp));
            if !at_hopf.admissible {
                notes.push(format!(
                    "theta_plus = {tp:.6} lies outside the admissible window; the Hopf point has no admissible equilibrium"
                ));
            }
        }
        if !eq.admissible {
            notes.push(format!(
                "equilibrium not admissible: {}",
                eq.violated_conditions.join(", ")
            ));
        }

        let mut report = StabilityReport {
            params: *p,
            equilibrium: eq.clone(),
            a1: rh.a1,
            a2: rh.a2,
            a3: rh.a3,
            homogeneous_stable: rh.homogeneous_stable,
            theta_bar,
            theta_bar_minus_beta_phi: theta_low,
            theta_minus: hopf.map(|h| h.0),
            theta_plus: hopf.map(|h| h.1),
            hopf_period: hopf_period(p),
            notes,
            xi_star: None,
            turing_unstable: false,
            k2_star: None,
            h_min: None,
            h_negative_band: None,
            eigen_unstable_band: Vec::new(),
            dispersion: Vec::new(),
            fastest_mode_factored: None,
            fastest_mode_consistent: None,
            discrepancies: Vec::new(),
        };
        if !eq.admissible {
            return Ok(report);
        }

        let disp = DispersionRelation::new(p)?;
        let xi_star = turing_threshold_xi(p);
        report.xi_star = xi_star;
        report.turing_unstable = rh.homogeneous_stable && xi_star.is_some_and(|xs| p.xi > xs);
        report.k2_star = Some(disp.argmin_k2());
        report.h_min = Some(disp.min_value());
        report.h_negative_band = disp.negative_band();

        let n = opts.samples.max(2);
        let k2s: Vec<f64> = (0..n)
            .map(|i| opts.k2_max * i as f64 / (n - 1) as f64)
            .collect();
        let ks: Vec<f64> = k2s.iter().map(|k2| k2.sqrt()).collect();
        let rates = growth_rates(p, &ks, JacobianForm::Factored)?;
        report.dispersion = k2s
            .iter()
            .zip(&rates)
            .map(|(&k2, g)| DispersionPoint {
                k2,
                h: disp.h(k2),
                max_re: g.max_re,
            })
            .collect();
        report.eigen_unstable_band = super::linear::unstable_band(&rates)
            .into_iter()
            .map(|(a, b)| (a * a, b * b))
            .collect();

        for pt in &report.dispersion {
            if pt.h < 0.0 && pt.max_re <= 0.0 {
                report.discrepancies.push(format!(
                    "h < 0 but no growing eigenvalue at k^2 = {:.6}",
                    pt.k2
                ));
            }
            if pt.h > 0.0 && pt.max_re > 0.0 && rh.homogeneous_stable {
                report.discrepancies.push(format!(
                    "growing eigenvalue with h > 0 at k^2 = {:.6} (complex pair, not detected by the determinant)",
                    pt.k2
                ));
            }
        }

        if let Some(length) = opts.domain_length {
            let factored = fastest_neumann_mode(p, length, opts.max_mode, JacobianForm::Factored)?;
            let consistent =
                fastest_neumann_mode(p, length, opts.max_mode, JacobianForm::Consistent)?;
            if factored.m != consistent.m {
                report.discrepancies.push(format!(
                    "fastest Neumann mode differs between Jacobian forms: factored m = {} (rate {:.6}), consistent m = {} (rate {:.6})",
                    factored.m, factored.rate, consistent.m, consistent.rate
                ));
            }
            report.fastest_mode_factored = Some(factored);
            report.fastest_mode_consistent = Some(consistent);
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_report() {
        let opts = ReportOptions {
            domain_length: Some(7.0 * std::f64::consts::PI),
            ..Default::default()
        };
        let r = StabilityReport::compute(&ModelParams::paper(), &opts).unwrap();
        assert_abs_diff_eq!(r.theta_bar, 0.4875, epsilon = 1e-4);
        assert_abs_diff_eq!(r.xi_star.unwrap(), 2.389, epsilon = 0.01);
        assert!(r.turing_unstable && r.homogeneous_stable);
        assert!(r.notes.iter().any(|n| n.contains("theta_plus")));
        let (lo, hi) = r.h_negative_band.unwrap();
        assert!(lo < 5.196 && 5.196 < hi);
        assert!(!r.eigen_unstable_band.is_empty());
        assert!(r.discrepancies.iter().any(|d| d.contains("Neumann")));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("xi_star"));
    }

    #[test]
    fn inadmissible_report_is_partial() {
        let r =
            StabilityReport::compute(&ModelParams::paper().with_theta(0.6), &Default::default())
                .unwrap();
        assert!(!r.equilibrium.admissible);
        assert!(r.xi_star.is_none() && r.dispersion.is_empty() && !r.turing_unstable);
    }
}
