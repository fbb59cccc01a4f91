// Turing analysis at the reference point: the dispersion function h(k^2),
// the threshold chemotactic sensitivity, and the growth rates of the two
// Jacobian variants on the Neumann modes of a 7 pi domain.
//
//     cargo run --example dispersion_relation

use std::f64::consts::PI;

use plaquesim::stability::{
    fastest_neumann_mode, growth_rates, unstable_band, DispersionRelation, JacobianForm,
    ReportOptions, StabilityReport,
};
use plaquesim::ModelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ModelParams::paper();
    let length = 7.0 * PI;
    let report = StabilityReport::compute(
        &p,
        &ReportOptions {
            domain_length: Some(length),
            ..ReportOptions::default()
        },
    )?;
    let xi_star = report.xi_star.ok_or("no Turing threshold")?;
    println!(
        "xi* = {xi_star:.4}, critical k^2 = {:.4}",
        report.k2_star.unwrap_or(f64::NAN)
    );
    println!(
        "xi = {} is Turing unstable: {}",
        p.xi, report.turing_unstable
    );

    let h = DispersionRelation::new(&p)?;
    if let Some((lo, hi)) = h.negative_band() {
        println!("h(k^2) < 0 for k^2 in ({lo:.3}, {hi:.3})");
    }

    let ks: Vec<f64> = (0..=60).map(|i| 0.05 * i as f64).collect();
    for form in [JacobianForm::Factored, JacobianForm::Consistent] {
        let rates = growth_rates(&p, &ks, form)?;
        let fastest = fastest_neumann_mode(&p, length, 64, form)?;
        println!(
            "{:>10}: unstable k bands {:?}, fastest Neumann mode m = {} (k = {:.3}, rate {:.4})",
            form.name(),
            unstable_band(&rates)
                .iter()
                .map(|(a, b)| format!("{a:.2}..{b:.2}"))
                .collect::<Vec<_>>(),
            fastest.m,
            fastest.k,
            fastest.rate
        );
    }
    for d in &report.discrepancies {
        println!("note: {d}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
