//! `gcenter` command-line front end.
//!
//! Exit codes: 0 success, 1 computation failure (or a failed reproduction
//! check), 2 usage or configuration error.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;
use gcenter_core::Result;

use args::{Cli, Command};
use commands::Context;
use config::RunConfig;

/// Environment variable naming the directory for relative output paths.
pub const OUT_DIR_ENV: &str = "GCENTER_OUT_DIR";

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(cli) {
        Ok((stdout, failed)) => {
            let _ = out.write_all(stdout.as_bytes());
            if failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: Cli) -> Result<(String, bool)> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::empty(),
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or(cfg.output_dir.clone());
    let ctx = Context { solver: cfg.solver, out_dir, json: cli.json };
    let name = cli.command.name();
    let outcome = match cli.command {
        Command::Solve(a) => commands::solve(&a.merged(cfg.solve), &ctx)?,
        Command::Fit(a) => commands::fit(&a.merged(cfg.fit), &ctx)?,
        Command::Isotope(a) => commands::isotope(&a.merged(cfg.isotope), &ctx)?,
        Command::AverageTensor(a) => commands::average_tensor(&a.merged(cfg.average_tensor), &ctx)?,
        Command::Rates(a) => commands::rates(&a.merged(cfg.rates), &ctx)?,
        Command::Spectrum(a) => commands::spectrum(&a.merged(cfg.spectrum), &ctx)?,
        Command::Odmr(a) => commands::odmr(&a.merged(cfg.odmr), &ctx)?,
        Command::PaperRepro(a) => commands::paper_repro(&a.merged(cfg.paper_repro), &ctx)?,
    };
    output::write_all(&outcome.files)?;
    let stdout = if cli.json { output::envelope(name, outcome.json) } else { outcome.text };
    Ok((stdout, outcome.failed))
}
