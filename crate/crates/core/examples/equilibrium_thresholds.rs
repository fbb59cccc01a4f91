// Homogeneous equilibrium of the reference parameters, its admissibility
// window in theta and the two Hopf thresholds.
//
//     cargo run --example equilibrium_thresholds

use plaquesim::model::{admissibility_bounds, equilibrium, reaction_terms};
use plaquesim::stability::{routh_hurwitz, theta_hopf};
use plaquesim::ModelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ModelParams::paper();
    let eq = equilibrium(&p);
    let u = eq.as_array();
    println!(
        "U1 = (A, S, R, C, E) = {u:.6?}, admissible: {}",
        eq.admissible
    );

    let residual = reaction_terms(u, &p)?;
    let worst = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    println!("largest reaction residual at U1: {worst:.2e}");
    assert!(worst < 1e-12);

    let (theta_bar, theta_low) = admissibility_bounds(&p);
    println!("admissible for theta in ({theta_low:.4}, {theta_bar:.4})");
    let (minus, plus) = theta_hopf(&p).ok_or("no Hopf thresholds")?;
    println!("Hopf thresholds: theta_- = {minus:.4}, theta_+ = {plus:.4}");

    for theta in [0.30, 0.42, 0.48] {
        let rh = routh_hurwitz(&p.with_theta(theta));
        println!(
            "theta = {theta:.2}: a1 = {:.4}, a2 = {:.4}, a3 = {:.4}, stable without diffusion: {}",
            rh.a1, rh.a2, rh.a3, rh.homogeneous_stable
        );
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
