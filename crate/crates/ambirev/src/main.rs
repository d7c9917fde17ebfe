//! Thin experiment CLI over the `ambirev` library.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 config error,
//! 3 solver non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ambirev::error::Error;
use ambirev::experiment::{
    run_compare, run_contest, run_fig6, run_fig7, run_ranking, run_seeking, run_verify,
    ExperimentConfig, ExperimentKind, Outcome,
};

#[derive(Parser)]
#[command(name = "ambirev", version, about = "Worst-case auction revenue experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML config file; omitted fields fall back to defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV and metadata files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Joint grid size per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// RNG seed for randomized solver starts.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Worst-case revenues of the four auctions with ranking certificates.
    Rank(SweepArgs),
    /// Second-price / all-pay worst-case ratio across marginal families.
    Fig6(SweepArgs),
    /// First- vs second-price worst case over the ambiguity/affiliation grid.
    Fig7(SweepArgs),
    /// Simple-contest worst case over the loser-fraction sweep.
    Contest(SweepArgs),
    /// Best-case revenues for the ambiguity-seeking seller.
    Seeking(SweepArgs),
    /// Pairwise crossing/revenue certificates for two auctions.
    Compare {
        #[arg(long, short = 'x')]
        x: String,
        #[arg(long, short = 'y')]
        y: String,
        /// Marginal CDF family.
        #[arg(long, default_value = "power(1.0)")]
        marginal: String,
        /// Grid size.
        #[arg(long, default_value_t = 400)]
        grid: usize,
        /// Use the band reference with this affiliation parameter instead
        /// of the IID reference.
        #[arg(long)]
        zeta: Option<f64>,
        /// Write the JSON record here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the brute-force oracle suites.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Randomized instances per property suite.
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
}

fn load_config(kind: ExperimentKind, args: &SweepArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(kind, path)?,
        None => ExperimentConfig::default_for(kind),
    };
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(grid) = args.grid {
        cfg.n_joint = grid;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn finish(cfg: &ExperimentConfig, outcome: Outcome) -> ExitCode {
    match outcome.table.write(&cfg.out) {
        Ok((csv, meta)) => {
            println!("wrote {} and {}", csv.display(), meta.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    for line in &outcome.assertion_failures {
        eprintln!("assertion failure: {line}");
    }
    for line in &outcome.nonconverged {
        eprintln!("non-converged: {line}");
    }
    if !outcome.assertion_failures.is_empty() {
        ExitCode::from(1)
    } else if !outcome.nonconverged.is_empty() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_sweep(
    kind: ExperimentKind,
    args: &SweepArgs,
    runner: impl Fn(&ExperimentConfig) -> Result<Outcome, Error>,
) -> ExitCode {
    let cfg = match load_config(kind, args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    match runner(&cfg) {
        Ok(outcome) => finish(&cfg, outcome),
        Err(Error::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Error::Solver(msg)) => {
            eprintln!("solver error: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Rank(args) => run_sweep(ExperimentKind::Rank, &args, run_ranking),
        Command::Fig6(args) => run_sweep(ExperimentKind::Fig6, &args, run_fig6),
        Command::Fig7(args) => run_sweep(ExperimentKind::Fig7, &args, run_fig7),
        Command::Contest(args) => run_sweep(ExperimentKind::Contest, &args, run_contest),
        Command::Seeking(args) => run_sweep(ExperimentKind::Seeking, &args, run_seeking),
        Command::Compare {
            x,
            y,
            marginal,
            grid,
            zeta,
            out,
        } => match run_compare(&x, &y, &marginal, grid, zeta) {
            Ok(record) => {
                let text = serde_json::to_string_pretty(&record).expect("serializable record");
                match out {
                    Some(path) => {
                        if let Err(e) = std::fs::write(&path, text + "\n") {
                            eprintln!("error: {e}");
                            return ExitCode::from(2);
                        }
                        println!("wrote {}", path.display());
                    }
                    None => println!("{text}"),
                }
                ExitCode::SUCCESS
            }
            Err(Error::Config(msg)) => {
                eprintln!("config error: {msg}");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Verify { seed, instances } => {
            let lines = run_verify(seed, instances);
            let mut failed = false;
            for line in &lines {
                if line.passed {
                    println!("PASS {}", line.name);
                } else {
                    failed = true;
                    println!(
                        "FAIL {}: {}",
                        line.name,
                        line.detail.as_deref().unwrap_or("unknown")
                    );
                }
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
