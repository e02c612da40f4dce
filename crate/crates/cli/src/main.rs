use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zeno_cli::analysis::to_json;
use zeno_cli::commands::{self, parse_list, seed_from_env, AnalyticArgs};
use zeno_cli::curve_io::write_text;
use zeno_cli::reproduce::{self, Options, DEFAULT_SEED, DEFAULT_SHOTS};
use zeno_cli::{CliError, CliResult};

/// Quantum Zeno subspace simulator and analysis pipeline.
///
/// Set ZENO_SEED to override the seed of `simulate` and `reproduce`.
#[derive(Parser)]
#[command(name = "zeno", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte-Carlo ensemble described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's "out").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the closed-form decay on a list of times.
    Analytic {
        #[arg(long)]
        n: u32,
        /// Effective dephasing time, ms.
        #[arg(long)]
        t2eff: f64,
        /// Comma-separated total evolution times, ms.
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        offset: f64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit decay curves; N = 0 curves get a Gaussian.
    Fit {
        /// Glob pattern of curve files.
        #[arg(long = "in")]
        input: String,
        /// Projection count for every file (default: each file's `n` line).
        #[arg(long)]
        n: Option<u32>,
        /// Initial guess for T2eff, ms.
        #[arg(long)]
        t2eff: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the projection-count scaling law to a fit table.
    Scaling {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind one figure.
    Reproduce {
        /// One of fig2c, fig3b, fig3c, fig4b, fig5.
        figure: String,
        #[arg(long)]
        out: PathBuf,
        /// Shots per tau point.
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn list_written(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let written = commands::simulate(&config, out.as_deref(), seed_from_env()?)?;
            list_written(&written);
        }
        Command::Analytic {
            n,
            t2eff,
            tau,
            amplitude,
            offset,
            out,
        } => {
            let args = AnalyticArgs {
                n,
                t2eff,
                tau: parse_list(&tau)?,
                amplitude,
                offset,
            };
            emit(&commands::analytic(&args)?, out.as_ref())?;
        }
        Command::Fit { input, n, t2eff, out } => {
            let table = commands::fit(&input, n, t2eff)?;
            emit(&to_json(&table), out.as_ref())?;
            for row in table.rows.iter().filter(|r| !r.converged) {
                eprintln!("warning: {}: {}", row.source, row.error.as_deref().unwrap_or("not converged"));
            }
            if table.all_failed() {
                return Err(CliError::Analysis("no fit converged".into()));
            }
        }
        Command::Scaling { input, out } => {
            emit(&to_json(&commands::scaling(&input)?), out.as_ref())?;
        }
        Command::Reproduce { figure, out, shots } => {
            let seed = seed_from_env()?.unwrap_or(DEFAULT_SEED);
            let written = reproduce::reproduce(&figure, Options { seed, shots }, &out)?;
            list_written(&written);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zeno: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
