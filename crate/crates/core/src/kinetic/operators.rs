use super::velocity::VelocityGrid;
use crate::error::{Error, Result};
use crate::model::DimensionalParams;

/// Prefactor `lambda / Phi0(R / R_M)` of the random turning operator.
pub fn turning_rate_r(r_local: f64, dim: &DimensionalParams) -> Result<f64> {
    let phi0 = dim.squeeze.phi0(r_local / dim.r_m)?;
    if !(phi0 > 0.0) {
        return Err(Error::Singular(
            "Phi0(R) must be positive in the turning rate",
        ));
    }
    Ok(dim.lambda / phi0)
}

/// Random reorientation: `(lambda / Phi0(R)) (-f + mean f)`.
pub fn turning_l0_r(
    f: &[f64],
    r_local: f64,
    dim: &DimensionalParams,
    vg: &VelocityGrid,
) -> Result<Vec<f64>> {
    let rate = turning_rate_r(r_local, dim)?;
    let mut out = vec![0.0; f.len()];
    relax_into(f, rate, vg, &mut out);
    Ok(out)
}

/// Reorientation towards the cytokine gradient. In one dimension the
/// kernel `gamma Phi1(R) (v.v')(v'.dC) |v|/V` reduces to
/// `gamma Phi1(R) (v / V) dC/dx`, independent of the incoming velocity, so
/// the operator is `lambda gamma Phi1(R) (v / V) dC/dx  int f`.
pub fn turning_l1_r(
    f: &[f64],
    r_local: f64,
    dcdx: f64,
    dim: &DimensionalParams,
    vg: &VelocityGrid,
) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    let bias = chemotactic_bias(r_local, dcdx, dim) * vg.integrate(f);
    bias_into(bias, vg, &mut out);
    out
}

/// Random reorientation of cytokine velocities, `sigma (-f + mean f)`.
pub fn turning_lc(f: &[f64], sigma: f64, vg: &VelocityGrid) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    relax_into(f, sigma, vg, &mut out);
    out
}

/// `lambda gamma Phi1(R / R_M) dC/dx / V`.
#[inline]
pub(crate) fn chemotactic_bias(r_local: f64, dcdx: f64, dim: &DimensionalParams) -> f64 {
    dim.lambda * dim.gamma * dim.squeeze.phi1_unchecked(r_local / dim.r_m) * dcdx / dim.v_cap
}

#[inline]
pub(crate) fn relax_into(f: &[f64], rate: f64, vg: &VelocityGrid, out: &mut [f64]) {
    let mean = vg.integrate(f) / vg.omega;
    for (o, fj) in out.iter_mut().zip(f) {
        *o = rate * (mean - fj);
    }
}

#[inline]
fn bias_into(bias: f64, vg: &VelocityGrid, out: &mut [f64]) {
    for (o, v) in out.iter_mut().zip(&vg.nodes) {
        *o = bias * v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn setup() -> (DimensionalParams, VelocityGrid) {
        let dim = DimensionalParams::paper_reference();
        let vg = VelocityGrid::new(dim.v_cap, 16).unwrap();
        (dim, vg)
    }

    #[test]
    fn uniform_density_is_not_turned() {
        let (dim, vg) = setup();
        let out = turning_l0_r(&[0.3; 16], 0.4, &dim, &vg).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-15));
        assert!(turning_lc(&[0.7; 16], dim.sigma, &vg)
            .iter()
            .all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn spike_is_spread_out() {
        let (dim, vg) = setup();
        let mut f = vec![0.0; 16];
        f[3] = 1.0;
        let out = turning_l0_r(&f, 0.2, &dim, &vg).unwrap();
        assert!(out[3] < 0.0);
        assert!(out.iter().enumerate().all(|(j, v)| j == 3 || *v > 0.0));
        assert!(vg.integrate(&out).abs() < 1e-15);
    }

    #[test]
    fn chemotactic_turning_vanishes_without_gradient_or_room() {
        let (dim, vg) = setup();
        let f: Vec<f64> = (0..16).map(|j| 0.1 + 0.01 * j as f64).collect();
        assert!(turning_l1_r(&f, 0.3, 0.0, &dim, &vg)
            .iter()
            .all(|v| *v == 0.0));
        assert!(turning_l1_r(&f, dim.r_m, 2.0, &dim, &vg)
            .iter()
            .all(|v| *v == 0.0));
        assert!(turning_l1_r(&f, 1.5 * dim.r_m, 2.0, &dim, &vg)
            .iter()
            .all(|v| *v == 0.0));
        let up = turning_l1_r(&f, 0.3, 2.0, &dim, &vg);
        assert!(up[15] > 0.0 && up[0] < 0.0, "bias points up the gradient");
    }

    #[test]
    fn nonpositive_prefactor_is_rejected() {
        let (dim, vg) = setup();
        assert!(turning_l0_r(&[0.1; 16], -0.1, &dim, &vg).is_err());
    }

    #[test]
    fn explicit_relaxation_is_geometric() {
        let (dim, vg) = setup();
        let mut f: Vec<f64> = (0..16).map(|j| 1.0 + ((j * 7) % 5) as f64).collect();
        let mean = vg.integrate(&f) / vg.omega;
        let dev = |f: &[f64]| f.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
        let dt = 0.05;
        let mut last = dev(&f);
        for _ in 0..20 {
            let k = turning_lc(&f, dim.sigma, &vg);
            for (fj, kj) in f.iter_mut().zip(&k) {
                *fj += dt * kj;
            }
            let now = dev(&f);
            assert!((now / last - (1.0 - dim.sigma * dt)).abs() < 1e-10);
            last = now;
        }
    }

    proptest! {
        #[test]
        fn turning_conserves_mass(
            f in prop::collection::vec(0.0..5.0f64, 16),
            r in 0.0..1.2f64,
            dc in -3.0..3.0f64,
        ) {
            let (dim, vg) = setup();
            let scale = f.iter().sum::<f64>().max(1.0);
            let l0 = turning_l0_r(&f, r, &dim, &vg).unwrap();
            let l1 = turning_l1_r(&f, r, dc, &dim, &vg);
            let lc = turning_lc(&f, dim.sigma, &vg);
            prop_assert!(vg.integrate(&l0).abs() < 1e-12 * scale);
            prop_assert!(vg.integrate(&l1).abs() < 1e-12 * scale);
            prop_assert!(vg.integrate(&lc).abs() < 1e-12 * scale);
        }
    }
}
