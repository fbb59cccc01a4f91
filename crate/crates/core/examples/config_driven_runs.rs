// Driving the analyses from configuration text, the way the `plaquesim`
// binary does, and re-running a job from the sidecar it leaves behind.
//
//     cargo run --example config_driven_runs

use plaquesim::cli::{parse_config, parse_config_str, run_subcommand};

const CONFIG: &str = "
preset = paper-pars

[params]
theta = 0.42   # overrides the preset

[grid]
cells = 64

[run]
t_end = 50
k2_max = 10
samples = 101
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut cfg = parse_config_str("inline", CONFIG, None)?;
    cfg.run.out = dir.path().join("first");
    for command in ["stability", "ode"] {
        let outcome = run_subcommand(&cfg, command).map_err(|f| f.error)?;
        println!("{command}: {} files", outcome.files.len());
        if command == "stability" {
            println!("  xi* = {}", outcome.summary["xi_star"]);
        }
    }

    // the sidecar carries the command and every resolved setting
    let mut again = parse_config(&dir.path().join("first/ode.ini"), None)?;
    again.run.out = dir.path().join("second");
    let command = again.command.clone().unwrap_or_default();
    run_subcommand(&again, &command).map_err(|f| f.error)?;
    let a = std::fs::read(dir.path().join("first/ode.csv"))?;
    let b = std::fs::read(dir.path().join("second/ode.csv"))?;
    println!("re-run from the sidecar reproduces ode.csv: {}", a == b);

    match parse_config_str(
        "inline",
        "preset = paper-pars\n[grid]\ncells = 64\ncells = 65\n",
        None,
    ) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => return Err("duplicate key accepted".into()),
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
