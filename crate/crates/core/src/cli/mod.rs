//! Command-line front end: JSON job configs, dispatch, and CSV/JSON emission.
//!
//! ```text
//! sonine-kit <command> --config <path> [--out <path>] [--format csv|json]
//! ```
//!
//! Exit status is 0 when the job meets its tolerances, 2 when it does not,
//! and 1 on any error.

mod config;
mod output;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_config, Command, Format, JobConfig, KernelConfig, TOLERANCES};
pub use output::{to_json, write_csv, write_outcome};
pub use run::{classical_error, classical_solution, fitted_order, run, Cell, Outcome, Table};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "sonine-kit", version, about = "Sonine kernel pairs and first-kind Volterra solves")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON job description.
    #[arg(long)]
    config: PathBuf,
    /// Data file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn execute(args: Args) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let mut config = parse_config(&text)?;
    match config.command {
        Some(c) if c != args.command => {
            return Err(Error::Config {
                field: "command".into(),
                message: format!("config says `{c}` but `{}` was requested", args.command),
            })
        }
        _ => config.command = Some(args.command),
    }
    if let Some(f) = args.format {
        config.format = f;
    }
    if let Some(p) = args.out {
        config.out = Some(p);
    }
    let outcome = run(&config)?;
    match &config.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            write_outcome(&outcome, config.format, std::io::BufWriter::new(file))?;
            println!("{}", outcome.summary());
        }
        None => {
            write_outcome(&outcome, config.format, std::io::stdout().lock())?;
            eprintln!("{}", outcome.summary());
        }
    }
    Ok(outcome)
}

/// Parses `args` (including the program name), runs the job, and returns the
/// process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(args) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
