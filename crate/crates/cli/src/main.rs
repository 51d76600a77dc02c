//! `listmean` command-line front end.
//!
//! Exit codes: 0 on success, 2 when `estimate` returns an empty list, 1 on any error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use listmean::harness::{self, io, DataSpec};

#[derive(Parser)]
#[command(name = "listmean", version, about = "List-decodable Gaussian mean estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic α-pure dataset.
    Generate {
        /// JSON with `alpha`, `n`, `d`, optional `true_mean` and `adversary`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the estimator on a dataset file.
    Estimate {
        dataset: PathBuf,
        /// Pipeline config JSON; desk defaults when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Candidate list JSON; the run summary goes to `<stem>.result.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo checks of a center configuration.
    Verify {
        /// JSON `{"centers": [[...], ...], "beta"?: f64}`.
        centers: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick one candidate using trusted samples.
    Tournament {
        /// Candidate list (estimate output or a JSON array of vectors).
        list: PathBuf,
        /// Trusted samples (dataset file or JSON array of vectors).
        trusted: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a config × seed matrix and write one CSV row per trial.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    harness::configure_threads()?;
    match cli.command {
        Command::Generate { config, alpha, n, d, seed, out } => {
            let mut spec: DataSpec = match &config {
                Some(p) => io::read_json(p)?,
                None => DataSpec {
                    alpha: alpha.context("--alpha is required without --config")?,
                    n: n.context("--n is required without --config")?,
                    d: d.context("--d is required without --config")?,
                    true_mean: None,
                    adversary: Default::default(),
                },
            };
            spec.alpha = alpha.unwrap_or(spec.alpha);
            spec.n = n.unwrap_or(spec.n);
            spec.d = d.unwrap_or(spec.d);
            let data = spec.generate(seed)?;
            io::write_dataset(&out, &data)?;
            println!("wrote {} points in R^{} to {}", data.len(), data.dim(), out.display());
        }
        Command::Estimate { dataset, config, seed, out } => {
            let result = harness::run_estimate(&dataset, config.as_deref(), seed, &out)?;
            println!("{}", serde_json::to_string(&result)?);
            if result.list_size == 0 {
                eprintln!("estimate: empty candidate list");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Verify { centers, samples, seed, out } => {
            let report = harness::run_verify(&centers, samples, seed, &out)?;
            println!("{}", serde_json::to_string(&report)?);
        }
        Command::Tournament { list, trusted, eps, delta, seed, out } => {
            let outcome = harness::run_tournament(&list, &trusted, eps, delta, seed, &out)?;
            println!("winner {} {:?}", outcome.index, outcome.winner);
        }
        Command::Bench { config, out } => {
            let rows = harness::bench(&config, &out)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
