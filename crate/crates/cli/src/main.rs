//! `ct`: classify initial data, sweep parameter grids, sample threshold
//! curves, run PDE simulations and trace phase portraits.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand};

use commands::Context;
use config::RunConfig;
use output::{Format, Provenance, Sink};

#[derive(Parser, Debug)]
#[command(name = "ct", version, about = "Critical-threshold analysis for radial Euler dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify one initial state; the exit code encodes the verdict.
    Classify(Common),
    /// Verdict codes over a two-axis grid.
    Sweep(Common),
    /// Sample the threshold curves.
    Curves(Common),
    /// Run the characteristic-ensemble PDE solver.
    Simulate(Common),
    /// Trajectories of the (q, s) phase plane.
    PhasePortrait(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn run(cli: Cli) -> Result<i32> {
    let (common, exec): (&Common, fn(&Context) -> Result<i32>) = match &cli.command {
        Command::Classify(c) => (c, commands::classify::run),
        Command::Sweep(c) => (c, commands::sweep::run),
        Command::Curves(c) => (c, commands::curves::run),
        Command::Simulate(c) => (c, commands::simulate::run),
        Command::PhasePortrait(c) => (c, commands::portrait::run),
    };
    if let Some(k) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let text = std::fs::read_to_string(&common.config)
        .with_context(|| format!("cannot read {}", common.config.display()))?;
    let config = RunConfig::parse(&text).with_context(|| format!("invalid config {}", common.config.display()))?;
    let base = common
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let ctx = Context {
        config,
        base,
        provenance: Provenance::of_config(&text),
        sink: Sink {
            dir: common.out.clone(),
        },
        format: common.format,
    };
    exec(&ctx)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CT_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
