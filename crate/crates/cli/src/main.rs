//! `qspectra <command> [--config FILE] [--set key=value]... --out CSV [--svg FILE] [--seed N]`
//!
//! Exit status: 0 on success, 2 for an invalid configuration, 3 when a
//! computation fails, 4 for file errors. Failures print one
//! `error kind=... code=... message="..."` line on stderr.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Command, RunConfig};
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "qspectra", version, about = "Cooper pair box and Andreev junction spectra")]
struct Cli {
    /// Computation to run.
    #[arg(value_enum)]
    command: Command,

    /// `key = value` file; `#` starts a comment.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one parameter, e.g. `--set ej_over_ec=20` or `--set sweep.steps=11`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,

    /// Optional SVG line plot.
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Seed for randomised sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn execute(cli: Cli) -> CliResult<()> {
    let cfg = RunConfig::resolve(
        cli.command,
        cli.config.as_deref(),
        &cli.set,
        cli.seed,
        cli.out,
        cli.svg,
    )?;
    let table = commands::run(&cfg)?;
    output::write_file(&cfg.out, &output::csv_text(&cfg.echo(), &table))?;
    if let Some(svg) = &cfg.svg {
        output::write_file(svg, &output::render_svg(&table.plot))?;
    }
    for line in &table.summary {
        println!("{line}");
    }
    match table.failure {
        Some(msg) => Err(CliError::Check(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let err = CliError::Validation(first.trim_start_matches("error: ").to_string());
            eprintln!("{e}");
            eprintln!("{}", err.machine_line());
            return ExitCode::from(2);
        }
        Err(e) => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
