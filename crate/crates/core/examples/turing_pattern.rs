// Short pattern-forming run of the reaction-diffusion-chemotaxis system:
// random perturbation of the equilibrium, space-time record with a
// grayscale heatmap of the damaged myelin, and the pattern metrics.
//
//     cargo run --release --example turing_pattern

use plaquesim::pde::{dominant_mode, pattern_metrics, simulate, Grid1D, SimOptions};
use plaquesim::ModelParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ModelParams::paper().with_xi(9.0);
    let grid = Grid1D::reference(64)?;
    let opts = SimOptions {
        t_end: 40.0,
        seed: 7,
        amplitude: 0.05,
        ..SimOptions::default()
    }
    .with_fields(&["R"]);
    let record = simulate(&p, &grid, &opts)?;
    let meta = &record.metadata;
    println!(
        "{} steps, dt in [{:.2e}, {:.2e}], {} clamp events",
        meta.steps, meta.dt_min, meta.dt_max, meta.clamp_events
    );

    let r = record.field("R").ok_or("R not recorded")?;
    for k in (0..record.times.len()).step_by(10) {
        let row = &r[k];
        let (lo, hi) = row
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                (l.min(*v), h.max(*v))
            });
        println!(
            "t = {:5.1}: R in [{lo:.4}, {hi:.4}], dominant mode {}",
            record.times[k],
            dominant_mode(row)
        );
    }

    let metrics = pattern_metrics(&record)?;
    println!(
        "regime {} (oscillation score {:.3}, late drift {:.2e})",
        metrics.regime.name(),
        metrics.oscillation_score,
        metrics.late_drift
    );

    let dir = tempfile::tempdir()?;
    let files = record.write(dir.path(), "pattern")?;
    println!("wrote {} files", files.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
