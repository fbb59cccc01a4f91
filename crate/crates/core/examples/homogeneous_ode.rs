// The reaction system without transport: relaxation to the equilibrium at
// the reference parameters, and a limit cycle just past the Hopf point of a
// parameter set where that point is admissible.
//
//     cargo run --release --example homogeneous_ode

use plaquesim::homogeneous::{ode_simulate, oscillation_period};
use plaquesim::model::equilibrium;
use plaquesim::stability::{hopf_period, theta_hopf};
use plaquesim::ModelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ModelParams::paper();
    let mut u0 = equilibrium(&p).as_array();
    u0[2] *= 1.5;
    let tr = ode_simulate(&p, u0, 100.0, 0.01)?;
    println!(
        "reference: R(0) = {:.4} -> R(100) = {:.6} (R1 = {:.6})",
        u0[2],
        tr.last()[2],
        equilibrium(&p).r1
    );

    let base = ModelParams {
        beta: 2.0,
        zeta: 2.0,
        mu: 1.5,
        eta: 0.5,
        phi: 0.5,
        ..ModelParams::paper()
    };
    let (_, theta_plus) = theta_hopf(&base).ok_or("no Hopf point")?;
    let linear = hopf_period(&base.with_theta(theta_plus)).ok_or("no Hopf period")?;
    let q = base.with_theta(theta_plus + 0.002);
    let mut v0 = equilibrium(&q).as_array();
    v0[0] *= 1.05;
    let tr = ode_simulate(&q, v0, 1500.0, 0.01)?;
    let period = oscillation_period(&tr.times, &tr.component(2), 1000.0).ok_or("no oscillation")?;
    println!(
        "theta_+ = {theta_plus:.4}: cycle period {period:.3}, linear 2 pi / sqrt(a2) = {linear:.3}"
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
