use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use sps_radial::config::RunConfig;
use sps_radial::study;

/// Ground states, dynamics and convergence sweeps for the radial
/// Schrödinger–Poisson–Slater system.
#[derive(Debug, Parser)]
#[command(name = "sps", version)]
struct Cli {
    /// groundstate, evolve or sweep
    #[arg(long)]
    mode: Option<String>,
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// override a configuration entry; may be repeated
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    prefix: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let mut overrides = cli.set.clone();
    if let Some(mode) = &cli.mode {
        overrides.push(format!("mode={mode}"));
    }
    if let Some(dir) = &cli.out_dir {
        overrides.push(format!("out_dir={}", dir.display()));
    }
    if let Some(prefix) = &cli.prefix {
        overrides.push(format!("prefix={prefix}"));
    }

    let outcome =
        RunConfig::load(cli.config.as_deref(), &overrides).and_then(|cfg| study::run(&cfg));
    match outcome {
        Ok(out) if out.converged => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("sps: solver did not reach the requested tolerance");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("sps: {e}");
            ExitCode::from(study::exit_code(&e) as u8)
        }
    }
}
