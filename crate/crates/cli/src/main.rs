use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flb_tool::format::Table;
use flb_tool::{figures, quantities, sweep, verify, CliError};

#[derive(Parser)]
#[command(
    name = "flb",
    version,
    about = "Finite-blocklength bounds and expansions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// D, V, skewness, lattice span and the constant terms for each request in a file.
    Quantities { file: PathBuf },
    /// Bounds over an (n, ε) grid described by a TOML file.
    Sweep { spec: PathBuf },
    /// Data behind one figure.
    Figure {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report rates in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Run the acceptance criteria.
    Verify {
        /// Extended grids and the 2-D quadrature check.
        #[arg(long)]
        full: bool,
    },
}

fn emit(table: &Table, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => table.write(BufWriter::new(File::create(p)?)),
        None => table.write(io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Quantities { file } => emit(&quantities::cmd_quantities(&file)?, None),
        Command::Sweep { spec } => {
            let (table, out) = sweep::cmd_sweep(&spec)?;
            emit(&table, out.as_deref())
        }
        Command::Figure { name, out, bits } => {
            emit(&figures::cmd_figure(&name, bits)?, out.as_deref())
        }
        Command::Verify { full } => {
            let reports = verify::run(full);
            let mut stdout = io::stdout().lock();
            for r in &reports {
                writeln!(stdout, "{}", r.line())?;
            }
            let failed: Vec<String> = reports
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.id.to_string())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "criteria {}",
                    failed.join(", ")
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
