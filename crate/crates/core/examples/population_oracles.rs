// Exact solutions for the cytokine and myelin populations along a computed
// trajectory, the forward-Euler positivity sweep, and the reduced (R, C)
// system in its nominal and corrected forms.
//
//     cargo run --release --example population_oracles

use std::f64::consts::PI;

use plaquesim::homogeneous::{
    appendix_check, positivity_sweep, reduced_system, PopulationSystem, ReducedForm,
};
use plaquesim::model::{equilibrium, nondimensionalize};
use plaquesim::DimensionalParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dim = DimensionalParams::paper_reference();
    let p = nondimensionalize(&dim)?;
    let v = 7.0 * PI;
    let sys = PopulationSystem::new(&dim, v)?;
    let u = equilibrium(&p).as_array();
    let n0 = [
        0.6 * u[0] * v,
        1.3 * u[1] * v,
        0.5 * u[2] * v,
        0.1 * v,
        0.2 * v,
    ];
    let check = appendix_check(&sys, n0, 20.0, 1e-3)?;
    println!(
        "closed forms vs RK4: n_C {:.1e}, n_E {:.1e} (sampling dt {:.1e})",
        check.nc_max_rel_error, check.ne_max_rel_error, check.dt
    );
    println!(
        "n_C without the decay of its initial value: {:.2e}",
        check.nc_without_decay_max_rel_error
    );

    let sweep = positivity_sweep(&p, 3, &[1.0, 0.1, 0.01], 20.0);
    for (dt, failures) in &sweep.failures {
        println!(
            "Euler dt = {dt}: {failures} of {} starts went negative",
            sweep.initial_conditions
        );
    }
    println!("dt* = {:?}", sweep.dt_star);

    for form in [ReducedForm::Nominal, ReducedForm::Corrected] {
        let red = reduced_system(&dim, form)?;
        println!(
            "{:>9}: a = {:+.4}, b = {:.4}, well posed {}, fixed point {:?}",
            form.name(),
            red.a,
            red.b,
            red.well_posed,
            red.fixed_point()
        );
    }
    println!("full equilibrium R1 = {:.6}, C1 = {:.6}", u[2], u[3]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
