//! Command-line driver: parses a [`RunConfig`], runs the requested check
//! on a sized worker pool and writes the report.
//!
//! Exit codes: 0 confirmed, 1 violation found, 2 inconclusive or stopped
//! early, 3 usage or domain error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use gumball::report::Report;

pub mod commands;
pub mod config;
pub mod output;

pub use config::{Command, Format, RunConfig};

pub const EXIT_USAGE: i32 = 3;

/// Runs the check and returns the report, without writing it anywhere.
pub fn execute(config: &RunConfig) -> gumball::Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| gumball::Error::Domain(format!("worker pool: {e}")))?;
    let started = Instant::now();
    let mut report = pool.install(|| commands::execute(&config.command, &config.tol))?;
    report.timing_ms = started.elapsed().as_millis() as u64;
    Ok(report)
}

/// Runs the check, writes the rendered report and returns the exit code.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let report = match execute(config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let rendered = output::render(&report, config.format);
    let written = match &config.output {
        Some(path) => fs::write(path, rendered),
        None => stdout.write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: writing report: {e}");
        return EXIT_USAGE;
    }
    report.verdict.exit_code()
}

/// Parses `args` (program name first) and runs.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config, stdout, stderr),
        Err(e) => {
            let rendered = e.render().to_string();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            }
        }
    }
}
