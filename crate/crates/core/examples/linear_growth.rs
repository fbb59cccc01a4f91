// Early, linear phase of a tiny perturbation: the fitted exponential growth
// of the dominant cosine mode of R against the eigenvalues of both Jacobian
// variants at that mode.
//
//     cargo run --release --example linear_growth

use plaquesim::model::equilibrium;
use plaquesim::pde::{fit_linear_growth, simulate, Grid1D, SimOptions};
use plaquesim::stability::{growth_rates, JacobianForm};
use plaquesim::ModelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ModelParams::paper();
    let grid = Grid1D::reference(96)?;
    let opts = SimOptions {
        t_end: 60.0,
        snapshot_every: 0.5,
        seed: 3,
        amplitude: 1e-4,
        ..SimOptions::default()
    }
    .with_fields(&["R"]);
    let record = simulate(&p, &grid, &opts)?;
    let r_eq = equilibrium(&p).r1;
    let fit = fit_linear_growth(
        &record.times,
        record.field("R").ok_or("R missing")?,
        r_eq,
        20.0,
        0.05,
    )?;
    let k = fit.mode as f64 * std::f64::consts::PI / grid.length;
    println!(
        "dominant mode m = {} (k = {k:.3}), fitted rate {:.4} over t in [{:.1}, {:.1}]",
        fit.mode, fit.rate, fit.t_start, fit.t_end
    );
    for form in [JacobianForm::Factored, JacobianForm::Consistent] {
        let g = &growth_rates(&p, &[k], form)?[0];
        println!("  {:>10} Jacobian predicts {:.4}", form.name(), g.max_re);
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
