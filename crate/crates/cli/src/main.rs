//! `frameforge`: classify sequences, build duals, certify perturbations.

mod commands;
mod report;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use frameforge::TolerancePolicy;

use crate::report::{CliError, Report};

#[derive(Parser, Debug)]
#[command(
    name = "frameforge",
    version,
    about = "Frame, Riesz and pseudo-Riesz classification of vector sequences"
)]
struct Cli {
    /// Tolerance overrides, e.g. `rank_rtol=1e-9,abs_floor=1e-13`.
    #[arg(long, global = true, value_name = "KEY=VALUE,...")]
    tol: Option<String>,

    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a sequence file.
    Classify {
        path: PathBuf,
        /// Numbers of vectors in the truncation scan, e.g. `8,16,32`.
        #[arg(long, value_delimiter = ',', value_name = "N,...")]
        scan_dims: Option<Vec<usize>>,
        /// Exit with status 1 unless the sequence has this class.
        #[arg(long = "assert", value_name = "CLASS")]
        assert_classes: Vec<String>,
    },
    /// Construct a dual or pseudo-codual, or check a given pair.
    Dual {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<DualKind>,
        /// Check this sequence as the partner instead of constructing one.
        #[arg(long, value_name = "PATH")]
        verify_with: Option<PathBuf>,
        /// Write the constructed partner to this file.
        #[arg(long, value_name = "PATH", conflicts_with = "verify_with")]
        output: Option<PathBuf>,
        /// Exit with status 1 unless every relation is a pseudo-dual and every partner check passes.
        #[arg(long = "assert")]
        assert: bool,
    },
    /// Certify that a perturbation preserves the reference's class.
    Perturb {
        reference: PathBuf,
        perturbed: PathBuf,
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        /// Exit with status 1 unless the hypothesis holds and the guarantees are observed.
        #[arg(long = "assert")]
        assert: bool,
    },
    /// List, show or export gallery entries.
    Gallery {
        name: Option<String>,
        #[arg(long)]
        list: bool,
        /// Write the entry's sequence files and expectations to this directory.
        #[arg(long, value_name = "DIR")]
        emit: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DualKind {
    Canonical,
    Pseudo,
    Codual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    Kato,
    Pw,
    BariPrb,
    BariGamma,
}

fn run(cli: Cli, argv: Vec<String>) -> Result<Report, CliError> {
    let tol = match &cli.tol {
        Some(s) => s.parse::<TolerancePolicy>()?,
        None => TolerancePolicy::default(),
    };
    let seed = commands::seed()?;
    let body = match cli.command {
        Command::Classify {
            path,
            scan_dims,
            assert_classes,
        } => commands::classify(&path, scan_dims.as_deref(), &assert_classes, &tol)?,
        Command::Dual {
            path,
            kind,
            verify_with,
            output,
            assert,
        } => commands::dual(
            &path,
            kind,
            verify_with.as_deref(),
            output.as_deref(),
            assert,
            &tol,
        )?,
        Command::Perturb {
            reference,
            perturbed,
            theorem,
            lambda,
            mu,
            assert,
        } => commands::perturb(
            &reference, &perturbed, theorem, lambda, mu, assert, seed, &tol,
        )?,
        Command::Gallery { name, list, emit } => {
            commands::gallery(name.as_deref(), list, emit.as_deref())?
        }
    };
    Ok(Report::new(argv, tol, seed, body))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli, argv) {
        Ok(report) => {
            let text = if json {
                report.to_json() + "\n"
            } else {
                report.text.clone()
            };
            match io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::from(report.exit_code),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
