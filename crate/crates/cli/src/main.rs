use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oplab_core::runner::{self, exit_code_for, render, render_text, Format, RunConfig, EXIT_FAILURES, EXIT_OK};

#[derive(Parser, Debug)]
#[command(name = "oplab", version, about = "Executable checks of operator inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named suite and emit its report.
    Run {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Function selector `id:k=v,...`; repeat to select several.
        #[arg(long = "function")]
        functions: Vec<String>,
        /// Matrix JSON fixture (`{"A": {...}, "B": {...}}` or a bare matrix).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json", value_parser = ["json", "csv", "text"])]
        format: String,
    },
    /// Re-run a JSON report and compare bodies.
    Replay { report: PathBuf },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            suite,
            dim,
            trials,
            seed,
            tol,
            functions,
            input,
            out,
            format,
        } => {
            let format: Format = format.parse().expect("restricted by clap");
            let config = RunConfig {
                suite,
                dim,
                trials,
                seed,
                tol,
                functions,
                input,
                out,
                format,
            };
            match runner::run(&config) {
                Ok(report) => {
                    if config.out.is_some() {
                        print!("{}", render_text(&report));
                    } else {
                        match render(&report, format) {
                            Ok(s) => print!("{s}"),
                            Err(e) => {
                                eprintln!("error: {e}");
                                return code(exit_code_for(&e));
                            }
                        }
                    }
                    code(report.exit_code())
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    code(exit_code_for(&e))
                }
            }
        }
        Command::Replay { report } => match runner::replay(&report) {
            Ok(outcome) => {
                if outcome.matches {
                    println!("replay matches: {}", report.display());
                    code(EXIT_OK)
                } else {
                    println!("replay differs: {}", report.display());
                    code(EXIT_FAILURES)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                code(exit_code_for(&e))
            }
        },
    }
}
