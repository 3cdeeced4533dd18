//! Command-line surface. Flags override keys of the `--config` file.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentKind;

#[derive(Debug, Parser)]
#[command(name = "predprey", version, about = "Stochastic predator-prey experiments on lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one engine and write the (mean) trajectory.
    Simulate(RunOpts),
    /// Integrate the mean-field equations.
    Meanfield(RunOpts),
    /// Compare a realization-averaged trajectory with the mean field.
    Validate(RunOpts),
    /// Fit the decay of the mean-field error with the system size.
    Convergence(RunOpts),
    /// Time the engines over a size or rate sweep.
    Cost(RunOpts),
    /// Compare engine means with the direct method.
    Accuracy(RunOpts),
    /// Empirical and linear-noise power spectra of predator fluctuations.
    Spectrum(RunOpts),
}

impl Command {
    pub fn split(self) -> (ExperimentKind, RunOpts) {
        match self {
            Self::Simulate(o) => (ExperimentKind::Simulate, o),
            Self::Meanfield(o) => (ExperimentKind::Meanfield, o),
            Self::Validate(o) => (ExperimentKind::Validate, o),
            Self::Convergence(o) => (ExperimentKind::Convergence, o),
            Self::Cost(o) => (ExperimentKind::Cost, o),
            Self::Accuracy(o) => (ExperimentKind::Accuracy, o),
            Self::Spectrum(o) => (ExperimentKind::Spectrum, o),
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct RunOpts {
    /// Key-value config file (flat TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; defaults to the config value, then $PREDPREY_OUT_DIR, then `results`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// direct | classic-mc | tau-leaping | ensemble
    #[arg(long)]
    pub engine: Option<String>,
    /// homogeneous | heterogeneous | benchmark
    #[arg(long)]
    pub preset: Option<String>,
    /// well-mixed | line | grid
    #[arg(long)]
    pub lattice: Option<String>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Components per cell.
    #[arg(long)]
    pub capacity: Option<u32>,
    /// uniform | centered-blob | equilibrium | explicit
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub record_stride: Option<f64>,
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Timing repetitions per cost configuration.
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<u32>>,
    /// agents | counts
    #[arg(long)]
    pub ensemble_mode: Option<String>,
    /// periodic | zero-flux
    #[arg(long)]
    pub boundary: Option<String>,
    /// Any other config key, as KEY=VALUE with a TOML value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl RunOpts {
    /// Config keys set on the command line.
    pub fn overrides(&self, kind: ExperimentKind) -> Result<toml::Table> {
        let mut t = toml::Table::new();
        for item in &self.set {
            let Some((key, value)) = item.split_once('=') else {
                bail!("--set expects KEY=VALUE, got `{item}`");
            };
            t.insert(key.trim().to_string(), parse_value(value.trim()));
        }
        t.insert("kind".into(), kind.name().into());
        let mut put = |key: &str, v: Option<toml::Value>| {
            if let Some(v) = v {
                t.insert(key.to_string(), v);
            }
        };
        let text = |v: &Option<String>| v.clone().map(toml::Value::from);
        put("seed", self.seed.map(|s| toml::Value::Integer(s as i64)));
        put("out_dir", self.out_dir.as_ref().map(|p| p.display().to_string().into()));
        put("engine", text(&self.engine));
        put("preset", text(&self.preset));
        put("lattice", text(&self.lattice));
        put("cells", self.cells.map(|v| (v as i64).into()));
        put("nx", self.nx.map(|v| (v as i64).into()));
        put("ny", self.ny.map(|v| (v as i64).into()));
        put("capacity", self.capacity.map(|v| (v as i64).into()));
        put("initial", text(&self.initial));
        put("t_final", self.t_final.map(Into::into));
        put("tau", self.tau.map(Into::into));
        put("record_stride", self.record_stride.map(Into::into));
        put("realizations", self.realizations.map(|v| (v as i64).into()));
        put("repetitions", self.repetitions.map(|v| (v as i64).into()));
        put("sizes", self.sizes.as_ref().map(|s| s.iter().map(|&n| toml::Value::Integer(n as i64)).collect::<Vec<_>>().into()));
        put("ensemble_mode", text(&self.ensemble_mode));
        put("boundary", text(&self.boundary));
        Ok(t)
    }
}
