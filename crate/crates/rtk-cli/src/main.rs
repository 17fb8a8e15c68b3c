//! `rtk` — tensor Riccati toolkit command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use rtk_cli::commands::{self, ArteFlags};
use rtk_cli::documents::{ProblemDocument, TensorDocument};
use rtk_cli::error::CliError;

#[derive(Parser)]
#[command(
    name = "rtk",
    version,
    about = "Even-order paired tensor algebra: Riccati/Lyapunov/Sylvester solvers and multilinear control analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a tensor equation described by a problem file.
    Solve {
        #[command(subcommand)]
        what: SolveCommand,
    },
    /// System-level analyses: H-infinity norm, bounded real lemma,
    /// perturbation experiments.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
    /// U-eigenvalues and the stability verdict of a tensor.
    Spectrum {
        /// Tensor document, or a problem document whose `a` field is used.
        #[arg(long)]
        input: PathBuf,
    },
    /// Built-in demonstration problems.
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
    },
}

#[derive(Subcommand)]
enum SolveCommand {
    /// Algebraic Riccati tensor equation.
    Arte {
        #[arg(long)]
        input: PathBuf,
        /// newton or schur.
        #[arg(long)]
        method: Option<String>,
        /// Outer residual tolerance of the Newton iteration.
        #[arg(long)]
        eps: Option<f64>,
        /// Inner linear solver: auto, direct, bicg-tensor or bicg-vec.
        #[arg(long)]
        inner: Option<String>,
        /// Relative residual tolerance of the inner solver.
        #[arg(long)]
        inner_tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Report file; the residual history lands next to it as CSV.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Lyapunov tensor equation `A^H*E + E*A + Q = O`.
    Lyap {
        #[arg(long)]
        input: PathBuf,
        /// auto, direct, bicg-tensor or bicg-vec.
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sylvester tensor equation `A*E + E*B = K`.
    Sylv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// H-infinity norm of a system by Hamiltonian bisection.
    Hinf {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        rel_tol: f64,
    },
    /// The three equivalent bounded-real conditions at a given gamma.
    Brl {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        gamma: f64,
    },
    /// Randomized perturbation experiments and condition-number bounds.
    Perturb {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated values, or BASExCOUNT for `{j*BASE}`.
        #[arg(long)]
        deltas: String,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        /// Defaults to the RTK_SEED environment variable, then 1.
        #[arg(long)]
        seed: Option<u64>,
        /// Draw real perturbations of A (tighter bounds).
        #[arg(long)]
        real_da: bool,
        /// Sample-level CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// The built-in rank-one 3x3x2x2 Riccati problem, end to end.
    Example1 {
        /// Assert the reference values and exit nonzero on mismatch.
        #[arg(long)]
        check: bool,
    },
}

fn read_problem(path: &Path) -> Result<ProblemDocument, CliError> {
    let text = std::fs::read_to_string(path)?;
    ProblemDocument::parse_str(&text)
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    match output {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(())
}

fn default_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| std::env::var("RTK_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(1)
}

fn sibling_csv(output: &Path) -> PathBuf {
    let mut name = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    name.push_str(".residuals.csv");
    output.with_file_name(name)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { what } => match what {
            SolveCommand::Arte {
                input,
                method,
                eps,
                inner,
                inner_tol,
                max_iter,
                output,
            } => {
                let doc = read_problem(&input)?;
                let flags = ArteFlags {
                    method,
                    eps,
                    inner,
                    inner_tol,
                    max_iter,
                };
                let report = commands::solve_arte(&doc, &flags)?;
                if let Some(path) = &output {
                    let csv = commands::residual_history_csv(&report.residual_history);
                    std::fs::write(sibling_csv(path), csv)?;
                }
                emit(&report, output.as_deref())
            }
            SolveCommand::Lyap {
                input,
                method,
                output,
            } => {
                let doc = read_problem(&input)?;
                let report = commands::solve_lyapunov(&doc, &method)?;
                emit(&report, output.as_deref())
            }
            SolveCommand::Sylv {
                input,
                method,
                output,
            } => {
                let doc = read_problem(&input)?;
                let report = commands::solve_sylvester(&doc, &method)?;
                emit(&report, output.as_deref())
            }
        },
        Command::Analyze { what } => match what {
            AnalyzeCommand::Hinf { input, rel_tol } => {
                let doc = read_problem(&input)?;
                let report = commands::analyze_hinf(&doc.system()?, rel_tol)?;
                emit(&report, None)
            }
            AnalyzeCommand::Brl { input, gamma } => {
                let doc = read_problem(&input)?;
                let report = commands::analyze_brl(&doc.system()?, gamma)?;
                emit(&report, None)
            }
            AnalyzeCommand::Perturb {
                input,
                deltas,
                trials,
                seed,
                real_da,
                csv,
            } => {
                let doc = read_problem(&input)?;
                let deltas = commands::parse_deltas(&deltas)?;
                let seed = default_seed(seed);
                let (summary, report) =
                    commands::analyze_perturb(&doc, deltas, trials, seed, real_da)?;
                if let Some(path) = csv {
                    std::fs::write(path, commands::perturb_csv(&report))?;
                }
                emit(&summary, None)
            }
        },
        Command::Spectrum { input } => {
            let text = std::fs::read_to_string(&input)?;
            // accept a bare tensor document or fall back to a problem's A
            let tensor = match serde_json::from_str::<TensorDocument>(&text) {
                Ok(doc) => doc.to_tensor("input")?,
                Err(_) => {
                    let doc = ProblemDocument::parse_str(&text)?;
                    doc.a
                        .as_ref()
                        .ok_or_else(|| CliError::validation("problem has no `a` tensor"))?
                        .to_tensor("a")?
                }
            };
            let report = commands::spectrum(&tensor)?;
            emit(&report, None)
        }
        Command::Demo { which } => match which {
            DemoCommand::Example1 { check } => {
                let seed = default_seed(None);
                let report = commands::demo_example1(check, seed)?;
                emit(&report, None)?;
                if let Some(lines) = &report.checks {
                    for line in lines {
                        let verdict = if line.passed { "PASS" } else { "FAIL" };
                        eprintln!("{verdict} {}: {}", line.name, line.detail);
                    }
                    if lines.iter().any(|l| !l.passed) {
                        return Err(CliError::acceptance("demo reference checks failed"));
                    }
                }
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
