use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use unruh_qfi::{emit_csv, exit, figure_preset, run_sweep, verify, SweepArgs, SweepSpec};

#[derive(Parser)]
#[command(
    name = "unruh-qfi",
    version,
    about = "Entanglement and Fisher information of accelerated noisy qubit pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity over a parameter grid and write CSV
    Sweep(SweepArgs),
    /// Regenerate the data behind one figure panel
    Figure {
        /// Panel name, e.g. fig1a
        preset: String,
        /// Output file (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every closed form against its numerical oracle
    Verify {
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Points per axis
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            } as u8);
        }
    };
    ExitCode::from(run(cli.command) as u8)
}

fn run(command: Command) -> i32 {
    match command {
        Command::Sweep(args) => {
            let config = match &args.config {
                Some(path) => match std::fs::read_to_string(path) {
                    Ok(text) => Some(text),
                    Err(e) => {
                        eprintln!("error: cannot read {}: {e}", path.display());
                        return exit::IO;
                    }
                },
                None => None,
            };
            match args.to_spec(config.as_deref()) {
                Ok(spec) => write_table(&spec, args.out.as_deref()),
                Err(e) => {
                    eprintln!("error: {e}");
                    exit::USAGE
                }
            }
        }
        Command::Figure { preset, out } => match figure_preset(&preset) {
            Ok(spec) => write_table(&spec, out.as_deref()),
            Err(e) => {
                eprintln!("error: {e}");
                exit::USAGE
            }
        },
        Command::Verify { tol, grid } => {
            if !(tol > 0.0) || grid < 5 {
                eprintln!("error: verify needs --tol > 0 and --grid >= 5");
                return exit::USAGE;
            }
            let report = verify(tol, grid);
            println!("{report}");
            if report.passed() {
                exit::SUCCESS
            } else {
                exit::VERIFICATION
            }
        }
    }
}

fn write_table(spec: &SweepSpec, out: Option<&Path>) -> i32 {
    let table = run_sweep(spec);
    if table.empty_cells > 0 {
        eprintln!(
            "warning: {} empty cells (singular points or failed evaluations)",
            table.empty_cells
        );
    }
    let stamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let result = match out {
        Some(path) => File::create(path).and_then(|f| emit_csv(&table, f, Some(&stamp))),
        None => emit_csv(&table, io::stdout().lock(), Some(&stamp)),
    };
    match result {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            exit::IO
        }
    }
}
