use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;
use plaquesim::cli::{parse_config, run_subcommand, RunConfig, RunFailure, COMMANDS, KEYS};
use plaquesim::Error;

/// Stability analysis, pattern simulation and kinetic-limit experiments for
/// the plaque formation model.
#[derive(Parser, Debug)]
#[command(name = "plaquesim", version)]
struct Cli {
    /// Subcommand; may instead come from `command = ...` in the config.
    #[arg(value_parser = PossibleValuesParser::new(COMMANDS))]
    command: Option<String>,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in parameters: paper-pars or paper-dimensional.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    #[arg(long, value_name = "F")]
    theta: Option<f64>,
    #[arg(long, value_name = "F")]
    xi: Option<f64>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Print every configuration key with its default and exit.
    #[arg(long)]
    list_keys: bool,
}

fn configure(cli: &Cli) -> Result<(RunConfig, String), Error> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), preset) => parse_config(path, preset.as_deref())?,
        (None, Some(preset)) => RunConfig::preset(preset)?,
        (None, None) => return Err(Error::Invalid("give --config or --preset".into())),
    };
    if let Some(theta) = cli.theta {
        cfg.params.set_theta(theta);
    }
    if let Some(xi) = cli.xi {
        cfg.params.set_xi(xi)?;
    }
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.run.out = out.clone();
    }
    let command = cli
        .command
        .clone()
        .or_else(|| cfg.command.clone())
        .ok_or_else(|| {
            Error::Invalid(format!(
                "no subcommand; expected one of {}",
                COMMANDS.join(", ")
            ))
        })?;
    Ok((cfg, command))
}

fn report_failure(failure: &RunFailure) -> ExitCode {
    println!(
        "{}",
        serde_json::to_string_pretty(&failure.to_json()).unwrap()
    );
    eprintln!("plaquesim: {}", failure.error);
    ExitCode::from(failure.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_keys {
        for (section, key, default) in KEYS {
            let section = if section.is_empty() { "(top)" } else { section };
            println!("{section:<12} {key:<18} {default}");
        }
        return ExitCode::SUCCESS;
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("plaquesim: cannot size the thread pool: {e}");
        }
    }
    let (cfg, command) = match configure(&cli) {
        Ok(v) => v,
        Err(error) => {
            return report_failure(&RunFailure {
                command: cli.command.clone().unwrap_or_default(),
                error,
                partial_outputs: Vec::new(),
            })
        }
    };
    match run_subcommand(&cfg, &command) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome).unwrap());
            ExitCode::SUCCESS
        }
        Err(failure) => report_failure(&failure),
    }
}
