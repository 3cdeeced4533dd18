use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use predprey_cli::args::Cli;
use predprey_cli::{run_experiment, ExperimentConfig};

fn run() -> Result<()> {
    let cli = Cli::parse();
    let (kind, opts) = cli.command.split();
    let cfg = ExperimentConfig::load(opts.config.as_deref(), opts.overrides(kind)?)?;
    let out = run_experiment(&cfg)?;
    println!("{} finished; artifacts in {}", kind.name(), out.dir().display());
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
