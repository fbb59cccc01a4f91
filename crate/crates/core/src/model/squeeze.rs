//! Volume-filling squeeze functions on the dimensionless leukocyte density.
//!
//! `phi1` switches chemotactic sensitivity off as `r -> 1` (the packing
//! bound); `phi0 = phi1 - phi1' * r` is the matching density-dependent
//! diffusivity. Both are defined on the rescaled density, so the packing
//! bound is always 1.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Admissible squeeze pairs (Φ₀, Φ₁).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Squeeze {
    /// Φ₁(r) = cos(πr/2) on [0, 1), zero beyond.
    #[default]
    Cosine,
    /// Φ₁(r) = 1 − r² on [0, 1), zero beyond.
    Quadratic,
}

impl Squeeze {
    pub fn name(self) -> &'static str {
        match self {
            Squeeze::Cosine => "cosine",
            Squeeze::Quadratic => "quadratic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "cosine" => Some(Squeeze::Cosine),
            "quadratic" => Some(Squeeze::Quadratic),
            _ => None,
        }
    }

    /// Φ₁ without the domain check. Negative input is treated as 0.
    #[inline]
    pub fn phi1_unchecked(self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let r = r.max(0.0);
        match self {
            Squeeze::Cosine => (FRAC_PI_2 * r).cos(),
            Squeeze::Quadratic => 1.0 - r * r,
        }
    }

    /// Φ₁′, one-sided from the left at r = 1 and zero above it.
    #[inline]
    pub fn dphi1_unchecked(self, r: f64) -> f64 {
        if r > 1.0 {
            return 0.0;
        }
        let r = r.max(0.0);
        match self {
            Squeeze::Cosine => -FRAC_PI_2 * (FRAC_PI_2 * r).sin(),
            Squeeze::Quadratic => -2.0 * r,
        }
    }

    /// Φ₀ without the domain check.
    ///
    /// Above the packing bound Φ₁ vanishes identically, but the diffusivity is
    /// held at its value at r = 1 so that a numerical overshoot of R does not
    /// switch random motility off.
    #[inline]
    pub fn phi0_unchecked(self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        match self {
            Squeeze::Cosine => {
                let x = FRAC_PI_2 * r;
                x.cos() + FRAC_PI_2 * r * x.sin()
            }
            Squeeze::Quadratic => 1.0 + r * r,
        }
    }

    /// Largest value Φ₀ takes on [0, ∞).
    pub fn phi0_max(self) -> f64 {
        self.phi0_unchecked(1.0)
    }

    pub fn phi1(self, r: f64) -> Result<f64> {
        check_domain(r)?;
        Ok(self.phi1_unchecked(r))
    }

    pub fn dphi1(self, r: f64) -> Result<f64> {
        check_domain(r)?;
        Ok(self.dphi1_unchecked(r))
    }

    pub fn phi0(self, r: f64) -> Result<f64> {
        check_domain(r)?;
        Ok(self.phi0_unchecked(r))
    }

    /// Checks the volume-filling properties on a uniform grid of `[0, 1]`:
    /// Φ₁(0) = 1, Φ₁ ∈ (0, 1) inside, Φ₁(1) = 0, Φ₁ nonincreasing and concave,
    /// and Φ₀ = Φ₁ − Φ₁′ r.
    pub fn check_properties(self) -> Result<()> {
        const SAMPLES: usize = 2000;
        let fail = |what: &str| {
            Err(Error::param(
                "squeeze",
                format!("{}: {}", self.name(), what),
            ))
        };

        if (self.phi1_unchecked(0.0) - 1.0).abs() > 1e-14 {
            return fail("phi1(0) != 1");
        }
        if self.phi1_unchecked(1.0) != 0.0 {
            return fail("phi1(1) != 0");
        }
        let h = 1.0 / SAMPLES as f64;
        let mut prev_slope = f64::INFINITY;
        for i in 1..SAMPLES {
            let r = i as f64 * h;
            let v = self.phi1_unchecked(r);
            if !(v > 0.0 && v < 1.0) {
                return fail("phi1 leaves (0, 1) inside the unit interval");
            }
            let slope = self.dphi1_unchecked(r);
            if slope > 0.0 {
                return fail("phi1 is increasing");
            }
            if slope > prev_slope + 1e-12 {
                return fail("phi1 is not concave");
            }
            prev_slope = slope;
            let phi0 = self.phi0_unchecked(r);
            if (phi0 - (v - slope * r)).abs() > 1e-12 {
                return fail("phi0 != phi1 - phi1' r");
            }
        }
        Ok(())
    }
}

fn check_domain(r: f64) -> Result<()> {
    if r < 0.0 || r.is_nan() {
        Err(Error::Domain(r))
    } else {
        Ok(())
    }
}

/// Φ₁ for the default (cosine) squeeze.
pub fn squeeze_phi1(r: f64) -> Result<f64> {
    Squeeze::Cosine.phi1(r)
}

/// Φ₀ for the default (cosine) squeeze.
pub fn squeeze_phi0(r: f64) -> Result<f64> {
    Squeeze::Cosine.phi0(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn cosine_reference_values() {
        assert_eq!(squeeze_phi1(0.0).unwrap(), 1.0);
        assert_eq!(squeeze_phi1(1.0).unwrap(), 0.0);
        assert_eq!(squeeze_phi1(3.5).unwrap(), 0.0);
        assert_abs_diff_eq!(squeeze_phi1(0.337562).unwrap(), 0.86270, epsilon = 1e-4);

        assert_eq!(squeeze_phi0(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(squeeze_phi0(1.0).unwrap(), PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(squeeze_phi0(0.337562).unwrap(), 1.13084, epsilon = 1e-4);
    }

    #[test]
    fn negative_density_is_a_domain_error() {
        assert!(matches!(squeeze_phi1(-1e-3), Err(Error::Domain(_))));
        assert!(matches!(squeeze_phi0(-2.0), Err(Error::Domain(_))));
        assert!(matches!(
            Squeeze::Quadratic.dphi1(-0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn both_pairs_are_admissible() {
        Squeeze::Cosine.check_properties().unwrap();
        Squeeze::Quadratic.check_properties().unwrap();
    }

    #[test]
    fn derivative_matches_centered_differences() {
        let h = 1e-6;
        for squeeze in [Squeeze::Cosine, Squeeze::Quadratic] {
            for i in 1..200 {
                let r = i as f64 / 200.0;
                if r + h >= 1.0 {
                    continue;
                }
                let fd =
                    (squeeze.phi1_unchecked(r + h) - squeeze.phi1_unchecked(r - h)) / (2.0 * h);
                let exact = squeeze.dphi1_unchecked(r);
                assert!(
                    ((fd - exact) / exact).abs() < 1e-6,
                    "r = {r}: {fd} vs {exact}"
                );
                let phi0 = squeeze.phi1_unchecked(r) - fd * r;
                assert!((phi0 - squeeze.phi0_unchecked(r)).abs() / phi0 < 1e-6);
            }
        }
    }

    #[test]
    fn phi1_is_monotone_and_concave_on_a_grid() {
        let n = 1000;
        let vals: Vec<f64> = (0..=n)
            .map(|i| Squeeze::Cosine.phi1_unchecked(i as f64 / n as f64))
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in vals.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-15);
        }
    }

    #[test]
    fn diffusivity_is_held_above_packing_bound() {
        assert_eq!(
            Squeeze::Cosine.phi0_unchecked(1.2),
            Squeeze::Cosine.phi0_unchecked(1.0)
        );
        assert_eq!(Squeeze::Quadratic.phi0_max(), 2.0);
    }
}
