//! Runs a job description through the same pipeline as the binary and
//! prints the table as CSV.
//!
//! cargo run --release --example cli_job

use sonine_kit::cli::{parse_config, run, write_csv};

fn main() -> sonine_kit::Result<()> {
    let config = parse_config(
        r#"{
            "command": "converge",
            "kernel": {"kind": "classical", "alpha": 0.5, "b": 1},
            "mesh": {"r": 3},
            "rhs": {"coefficients": [0, 1]}
        }"#,
    )?;
    let outcome = run(&config)?;
    write_csv(&outcome, std::io::stdout().lock())?;
    eprintln!("{}", outcome.summary());
    Ok(())
}
