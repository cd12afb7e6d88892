use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tailgate::config::{ExperimentConfig, Suite};
use tailgate::error::{Error, Result};
use tailgate::runner::{self, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "tailgate", version, about = "Tail-comparison experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Parser)]
struct RunArgs {
    /// Experiment config file (JSON); defaults apply for absent fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config and the TAILGATE_SEED env var
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trial count
    #[arg(long)]
    trials: Option<i64>,
    /// Worker threads (1 = reference behavior; results are identical)
    #[arg(long)]
    workers: Option<i64>,
    /// Report destination; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the inequality check battery on a family
    Check(RunArgs),
    /// Minimal tail-comparison constant: one family or the frozen corpus
    #[command(name = "min-c")]
    MinC(RunArgs),
    /// Exact converse counterexample
    Counterexample(RunArgs),
    /// Stratified Riemann-sum experiments
    Riemann(RunArgs),
    /// Regular-cover verification against the test-function battery
    CoverVerify(RunArgs),
    /// Re-execute a completed report and byte-compare
    Replay {
        /// Path to a previously written JSON report
        report: PathBuf,
        /// Optional worker-count override for the rerun
        #[arg(long)]
        workers: Option<i64>,
    },
}

fn load_config(args: &RunArgs, suite: Suite) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::ConfigInvalid(format!("config: {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig { suite, ..ExperimentConfig::default() },
    };
    config.suite = suite;
    // seed precedence: --seed flag, then TAILGATE_SEED, then config
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    } else if let Ok(env_seed) = std::env::var("TAILGATE_SEED") {
        config.master_seed = env_seed
            .parse()
            .map_err(|_| Error::ConfigInvalid(format!("TAILGATE_SEED: not a u64: {env_seed}")))?;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    Ok(config)
}

fn emit(report: &RunReport, args: &RunArgs) -> Result<()> {
    let rendered = match args.format {
        OutputFormat::Json => report.to_json()?,
        OutputFormat::Csv => report.to_csv(),
    };
    match &args.out {
        Some(path) => fs::write(path, rendered.as_bytes())?,
        None => println!("{rendered}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool> {
    let (suite, args) = match cli.command {
        Command::Check(a) => (Suite::Check, a),
        Command::MinC(a) => (Suite::MinC, a),
        Command::Counterexample(a) => (Suite::Counterexample, a),
        Command::Riemann(a) => (Suite::Riemann, a),
        Command::CoverVerify(a) => (Suite::CoverVerify, a),
        Command::Replay { report, workers } => {
            let text = fs::read_to_string(&report)?;
            let rerun = runner::replay(&text, workers)?;
            eprintln!("replay identical: {} records", rerun.records.len());
            return Ok(rerun.all_pass());
        }
    };
    let config = load_config(&args, suite)?;
    let report = runner::run(&config)?;
    emit(&report, &args)?;
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
