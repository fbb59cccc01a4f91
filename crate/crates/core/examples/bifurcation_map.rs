// Coarse (theta, xi) bifurcation diagram drawn in the terminal, with the
// vertical boundary lines and the Turing curve xi*(theta).
//
//     cargo run --example bifurcation_map

use plaquesim::stability::{bifurcation_diagram, BifurcationClass};
use plaquesim::ModelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ModelParams::paper();
    let (nt, nx) = (31, 21);
    let d = bifurcation_diagram(&p, (0.0, 0.6), (0.0, 20.0), (nt, nx))?;

    println!("xi ^   (. stable, T Turing, H unstable without diffusion, blank inadmissible)");
    for j in (0..nx).rev() {
        let row: String = (0..nt)
            .map(|i| match d.class_at(i, j) {
                BifurcationClass::Stable => '.',
                BifurcationClass::Turing => 'T',
                BifurcationClass::HomogeneousUnstable => 'H',
                BifurcationClass::Inadmissible => ' ',
            })
            .collect();
        println!("{:5.1} |{row}", d.xis[j]);
    }
    println!("      +{}> theta in [0, 0.6]", "-".repeat(nt));

    let b = &d.boundaries;
    println!(
        "theta_bar - beta phi = {:.4}, theta_bar = {:.4}, theta_- = {:?}, theta_+ = {:?}",
        b.theta_bar_minus_beta_phi, b.theta_bar, b.theta_minus, b.theta_plus
    );
    for (theta, xs) in b.xi_star.iter().step_by(5) {
        println!(
            "  xi*({theta:.2}) = {}",
            xs.map_or("-".into(), |x| format!("{x:.3}"))
        );
    }

    let dir = tempfile::tempdir()?;
    d.write_csv(&dir.path().join("bifurcation.csv"))?;
    d.write_boundary_csv(&dir.path().join("boundaries.csv"))?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
