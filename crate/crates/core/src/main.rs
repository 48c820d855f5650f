use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use qsprep::Error;
use qsprep::harness::{
    cli_compare, cli_run, cli_sweep, compare_configs, write_rendered, Engine, ExperimentConfig,
    Overrides, Rendered, SweepConfig,
};

#[derive(Parser)]
#[command(version, about = "Amplitude-amplification state preparation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-iteration trace of one configuration
    Run(CommonArgs),
    /// Query totals of several methods on one oracle
    Compare(CommonArgs),
    /// One row per point of an iteration or size sweep
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Override the simulation engine
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// Override the random-oracle seed
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; JSON goes next to it with a .json extension
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock time per run (makes output non-reproducible)
    #[arg(long)]
    timing: bool,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            engine: self.engine,
            seed: self.seed,
            out: self.out.clone(),
            timing: self.timing,
        }
    }

    fn read_config(&self) -> anyhow::Result<Value> {
        let text = std::fs::read_to_string(&self.config)
            .with_context(|| format!("reading {}", self.config.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", self.config.display()))
    }
}

fn emit(rendered: &Rendered, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => write_rendered(rendered, path).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{}", rendered.csv);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(e.downcast_ref::<Error>(), Some(Error::Config(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run(args) => {
            let overrides = args.overrides();
            let mut config = ExperimentConfig::from_value(args.read_config()?)?;
            config.apply(&overrides)?;
            let rendered = cli_run(&config, overrides.timing)?;
            emit(&rendered, config.output.as_ref())
        }
        Command::Compare(args) => {
            let overrides = args.overrides();
            let mut configs = compare_configs(args.read_config()?)?;
            for c in &mut configs {
                c.apply(&overrides)?;
            }
            let rendered = cli_compare(&configs, overrides.timing)?;
            let out = overrides.out.as_ref().or(configs[0].output.as_ref());
            emit(&rendered, out)
        }
        Command::Sweep(args) => {
            let overrides = args.overrides();
            let mut sweep = SweepConfig::from_value(args.read_config()?)?;
            if let Some(seed) = overrides.seed {
                sweep.seeds = Some(vec![seed]);
            }
            let overrides = Overrides { seed: None, ..overrides };
            sweep.base.apply(&overrides)?;
            let rendered = cli_sweep(&sweep, overrides.timing)?;
            emit(&rendered, sweep.base.output.as_ref())
        }
    }
}
