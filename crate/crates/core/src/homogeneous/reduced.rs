use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DimensionalParams;

/// Which coefficients to use for the logistic growth of `R`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReducedForm {
    /// `a = p21 d2/p31 - d23 (alpha p31 - d1 d3)/(d2 d13) - d2`, `b = p12 d2/d13`.
    #[default]
    Nominal,
    /// What eliminating `A` and `S` actually gives:
    /// `a = p21 d3/p31 - d23 (alpha p31 - d1 d3)/(d3 d13) - d2`, `b = d23 p12/d13`.
    Corrected,
}

impl ReducedForm {
    pub fn name(self) -> &'static str {
        match self {
            ReducedForm::Nominal => "nominal",
            ReducedForm::Corrected => "corrected",
        }
    }
}

/// Two-field `(R, C)` system obtained by putting `A`, `S` and `E` at their
/// quasi-steady values: `R' = f(R) = a R (1 - (b/a) R)`, `C' = g(R, C)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedSystem {
    pub form: ReducedForm,
    pub a: f64,
    pub b: f64,
    /// Quasi-steady `A = d3 / p31`.
    pub a_qs: f64,
    /// Quasi-steady `S = s0 + s1 R`.
    pub s0: f64,
    pub s1: f64,
    /// Cytokine production per unit `R`, `pC2 d3 / p31`.
    pub c_gain: f64,
    pub dc: f64,
    e_bar: f64,
    b52: f64,
    b62: f64,
    r5: f64,
    r6: f64,
    /// `a > 0`, the regime where positivity and boundedness are known.
    pub well_posed: bool,
}

impl ReducedSystem {
    pub fn f(&self, r: f64) -> f64 {
        self.a * r - self.b * r * r
    }

    pub fn g(&self, r: f64, c: f64) -> f64 {
        self.c_gain * r - self.dc * c
    }

    pub fn s_of_r(&self, r: f64) -> f64 {
        self.s0 + self.s1 * r
    }

    /// Quasi-steady myelin.
    pub fn e_of_r(&self, r: f64) -> f64 {
        let damage = r * r * self.b52 * self.b62;
        self.e_bar * damage / (self.r6 * (self.r5 + r * self.b52) + damage)
    }

    /// Nontrivial fixed point `(a/b, c_gain a / (b dC))`; `None` when `b = 0`.
    pub fn fixed_point(&self) -> Option<(f64, f64)> {
        (self.b != 0.0).then(|| {
            let r = self.a / self.b;
            (r, self.c_gain * r / self.dc)
        })
    }
}

/// Builds the reduced system from dimensional constants. A nonpositive `a`
/// is reported through `well_posed`, not as an error.
pub fn reduced_system(dim: &DimensionalParams, form: ReducedForm) -> Result<ReducedSystem> {
    for (name, v) in [
        ("d3", dim.d3),
        ("p31", dim.p31),
        ("d13", dim.d13),
        ("d2", dim.d2),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    let excess = dim.alpha * dim.p31 - dim.d1 * dim.d3;
    let (a, b) = match form {
        ReducedForm::Nominal => (
            dim.p21 * dim.d2 / dim.p31 - dim.d23 * excess / (dim.d2 * dim.d13) - dim.d2,
            dim.p12 * dim.d2 / dim.d13,
        ),
        ReducedForm::Corrected => (
            dim.p21 * dim.d3 / dim.p31 - dim.d23 * excess / (dim.d3 * dim.d13) - dim.d2,
            dim.d23 * dim.p12 / dim.d13,
        ),
    };
    Ok(ReducedSystem {
        form,
        a,
        b,
        a_qs: dim.d3 / dim.p31,
        s0: excess / (dim.d3 * dim.d13),
        s1: dim.p12 / dim.d13,
        c_gain: dim.pc2 * dim.d3 / dim.p31,
        dc: dim.dc,
        e_bar: dim.e_bar,
        b52: dim.b52,
        b62: dim.b62,
        r5: dim.r5,
        r6: dim.r6,
        well_posed: a > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{equilibrium, nondimensionalize};
    use proptest::prelude::*;

    #[test]
    fn no_feedback_gives_pure_exponential() {
        let dim = DimensionalParams {
            p12: 0.0,
            ..DimensionalParams::paper_reference()
        };
        for form in [ReducedForm::Nominal, ReducedForm::Corrected] {
            let rs = reduced_system(&dim, form).unwrap();
            assert_eq!(rs.b, 0.0);
            assert_eq!(rs.f(0.7), rs.a * 0.7);
            assert!(rs.fixed_point().is_none());
        }
    }

    #[test]
    fn reference_values() {
        let dim = DimensionalParams::paper_reference();
        let nominal = reduced_system(&dim, ReducedForm::Nominal).unwrap();
        let corrected = reduced_system(&dim, ReducedForm::Corrected).unwrap();
        assert!(!nominal.well_posed);
        assert!((nominal.a - (0.42 / 2.01 - 0.01 / 0.42 - 0.42)).abs() < 1e-12);
        assert!(corrected.well_posed);
        assert!((corrected.a - (1.0 / 2.01 - 0.01 - 0.42)).abs() < 1e-12);
    }

    fn check_fixed_point(dim: &DimensionalParams) {
        let p = nondimensionalize(dim).unwrap();
        let eq = equilibrium(&p);
        let sc = dim.scales();
        let full = sc.to_dimensional(eq.as_array());
        let rs = reduced_system(dim, ReducedForm::Corrected).unwrap();
        let (r, c) = rs.fixed_point().unwrap();
        assert!(
            (r - full[2]).abs() <= 1e-9 * full[2].abs().max(1e-12),
            "R {r} vs {}",
            full[2]
        );
        assert!(
            (c - full[3]).abs() <= 1e-9 * full[3].abs().max(1e-12),
            "C {c} vs {}",
            full[3]
        );
        assert!((rs.a_qs - full[0]).abs() <= 1e-9 * full[0]);
        assert!((rs.s_of_r(r) - full[1]).abs() <= 1e-9 * full[1].abs().max(1e-12));
        assert!((rs.e_of_r(r) - full[4]).abs() <= 1e-9 * full[4].abs().max(1e-12));
    }

    #[test]
    fn corrected_fixed_point_is_the_full_equilibrium() {
        check_fixed_point(&DimensionalParams::paper_reference());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn corrected_fixed_point_on_random_constants(
            p12 in 0.05..1.0f64, p21 in 0.5..3.0f64, d2 in 0.05..1.0f64, d3 in 0.3..3.0f64,
            r_m in 0.5..2.0f64, b62 in 1.0..50.0f64,
        ) {
            let dim = DimensionalParams { p12, p21, d2, d3, r_m, b62, ..DimensionalParams::paper_reference() };
            check_fixed_point(&dim);
        }
    }
}
