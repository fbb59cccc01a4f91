// The discrete-velocity kinetic model approaching its diffusive limit:
// moment errors against the macroscopic reference for shrinking eps, a
// pure-diffusion decay rate, and the drift of a bump up a fixed gradient.
//
//     cargo run --release --example kinetic_limit

use plaquesim::kinetic::{
    chemotactic_drift, diffusive_limit_error, kinetic_simulate, mode_decay, smooth_initial,
    KineticOptions, LimitOptions, MacroClosure,
};
use plaquesim::pde::Grid1D;
use plaquesim::DimensionalParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dim = DimensionalParams::paper_reference();
    let grid = Grid1D::reference(48)?;
    let initial = smooth_initial(&dim, &grid, 11, 0.05)?;

    for closure in [MacroClosure::KineticLimit, MacroClosure::Nominal] {
        let opts = LimitOptions {
            eps_list: vec![0.2, 0.1, 0.05],
            t_probe: 0.5,
            closure,
            ..LimitOptions::default()
        };
        let report = diffusive_limit_error(&dim, &grid, &initial, &opts)?;
        println!("against the {} closure:", closure.name());
        for e in report.entries.iter().filter(|e| e.field == "R") {
            println!(
                "  eps = {:.3}: |R - R_ref| = {:.3e}, order {}",
                e.eps,
                e.l2_error,
                e.observed_order.map_or("-".into(), |o| format!("{o:.2}"))
            );
        }
    }

    let decay = mode_decay(&dim, &grid, 0.05, 2, 2.0, 16)?;
    println!(
        "mode decay: D_R {:.4} (expected {:.4}), D_C {:.4} (expected {:.4})",
        decay.d_r_measured, decay.d_r, decay.d_c_measured, decay.d_c
    );

    let drift = chemotactic_drift(&dim, &grid, 0.05, 0.25, 1.0, 16)?;
    println!(
        "drift {:.4}: second-moment prediction {:.4}, gamma omega V / 4 prediction {:.4}",
        drift.measured, drift.kinetic_prediction, drift.nominal_prediction
    );

    let opts = KineticOptions {
        eps: 0.1,
        ..KineticOptions::default()
    };
    let record = kinetic_simulate(&initial, &dim, &grid, &opts, 0.3, 0.1)?;
    let stats = record.metadata.stats;
    println!(
        "{} kinetic steps, {} negative entries, myelin defect {:.1e}",
        stats.steps, stats.negative_events, stats.max_myelin_defect
    );
    let dir = tempfile::tempdir()?;
    record.write(dir.path(), "kinetic")?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
