//! Command-line interface.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{ExperimentConfig, Format};
use crate::discriminate::run_discrimination;
use crate::emit::{report_csv, sweep_csv, to_json, write_output};
use crate::error::CliError;
use crate::sweep::run_sweep;
use crate::trajectories::run_trajectories;

#[derive(Debug, Parser)]
#[command(name = "nwv", version, about = "Weak value and null weak value experiments")]
pub struct Cli {
    /// Output file; defaults to the config's `outputs.path`, then stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; defaults to the config's `outputs.format`, then csv for
    /// sweeps and json for reports.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Monte Carlo seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the postselection angle and tabulate WV and NWV.
    Sweep { config: PathBuf },
    /// Discrimination signal between two preparations.
    Discriminate { reference: PathBuf, shifted: PathBuf },
    /// Monte Carlo trajectories against the analytic chain.
    Trajectories { config: PathBuf },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
}

struct Target {
    format: Format,
    path: Option<PathBuf>,
}

impl Cli {
    fn target(&self, cfg: &ExperimentConfig, default: Format) -> Target {
        let outputs = cfg.outputs.as_ref();
        Target {
            format: self.format.or(outputs.and_then(|o| o.format)).unwrap_or(default),
            path: self.out.clone().or_else(|| outputs.and_then(|o| o.path.clone())),
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let cfg = ExperimentConfig::load(path)?;
    // Prefix field paths with the file so two-config commands stay readable.
    cfg.resolve().map_err(|e| match e {
        CliError::Config { path: field, message } => CliError::Config {
            path: format!("{}: {field}", path.display()),
            message,
        },
        other => other,
    })?;
    Ok(cfg)
}

fn report<T: serde::Serialize>(value: &T, target: &Target) -> Result<(), CliError> {
    let text = match target.format {
        Format::Json => to_json(value),
        Format::Csv => report_csv(value),
    };
    write_output(&text, target.path.as_deref())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Sweep { config } => {
            let cfg = load(config)?;
            let mut exp = cfg.resolve()?;
            if let (Some(seed), Some(mc)) = (cli.seed, exp.montecarlo.as_mut()) {
                mc.seed = seed;
            }
            let rows = run_sweep(&exp)?;
            let target = cli.target(&cfg, Format::Csv);
            let text = match target.format {
                Format::Csv => sweep_csv(&rows),
                Format::Json => to_json(&rows),
            };
            write_output(&text, target.path.as_deref())
        }
        Command::Discriminate { reference, shifted } => {
            let c0 = load(reference)?;
            let cd = load(shifted)?;
            let r = run_discrimination(&c0, &cd, cli.seed)?;
            report(&r, &cli.target(&c0, Format::Json))
        }
        Command::Trajectories { config } => {
            let cfg = load(config)?;
            let r = run_trajectories(&cfg.resolve()?, cli.seed)?;
            report(&r, &cli.target(&cfg, Format::Json))
        }
        Command::Validate { config } => {
            load(config)?;
            write_output(&format!("{}: ok\n", config.display()), None)
        }
    }
}

/// Runs the parsed command, inside a dedicated thread pool when `--jobs` is
/// given.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match cli.jobs {
        None => execute(cli),
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.into())
                .build()
                .map_err(|e| CliError::config("--jobs", e.to_string()))?;
            pool.install(|| execute(cli))
        }
    }
}
