// The velocity-jump building blocks: a discrete velocity grid, the
// relaxation operator that forgets the direction of motion, and the
// chemotactic bias that tilts the new directions up the cytokine gradient.
//
//     cargo run --example turning_operators

use plaquesim::kinetic::{turning_l0_r, turning_l1_r, turning_lc, turning_rate_r, VelocityGrid};
use plaquesim::DimensionalParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dim = DimensionalParams::paper_reference();
    let vg = VelocityGrid::new(dim.v_cap, 8)?;
    println!("nodes {:.3?}", vg.nodes);
    println!(
        "sum w v^2 = {:.5} (continuum 2 V^3 / 3 = {:.5})",
        vg.second_moment(),
        2.0 * dim.v_cap.powi(3) / 3.0
    );

    // all leukocytes moving right
    let mut f = vec![0.0; vg.len()];
    for (j, v) in vg.nodes.iter().enumerate() {
        if *v > 0.0 {
            f[j] = 1.0;
        }
    }
    let density = vg.integrate(&f);
    for r in [0.0, 0.5, 0.9] {
        let l0 = turning_l0_r(&f, r, &dim, &vg)?;
        println!(
            "R = {r:.1}: turning rate {:.4}, mass change {:+.1e}, flux change {:+.4}",
            turning_rate_r(r, &dim)?,
            vg.integrate(&l0),
            vg.first_moment(&l0)
        );
    }

    let uniform = vec![density / vg.omega; vg.len()];
    let bias = turning_l1_r(&uniform, 0.3, 0.5, &dim, &vg);
    println!(
        "gradient 0.5: bias creates flux {:+.4} and no mass ({:+.1e})",
        vg.first_moment(&bias),
        vg.integrate(&bias)
    );
    let packed = turning_l1_r(&uniform, dim.r_m, 0.5, &dim, &vg);
    println!(
        "at the packing bound the bias vanishes: {:?}",
        packed.iter().all(|b| *b == 0.0)
    );

    let vc = VelocityGrid::new(dim.w_cap, 8)?;
    let lc = turning_lc(&f, dim.sigma, &vc);
    println!("cytokine relaxation keeps mass: {:+.1e}", vc.integrate(&lc));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
