//! Command-line front end: parameter sweeps and self-checks written as CSV or JSON.

pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::{Parser, Subcommand};
use povmlab::Error;

use commands::{Format, Output};

/// Exit status for malformed input.
pub const EXIT_USAGE: i32 = 64;
/// Exit status when `--verify` finds a failing check.
pub const EXIT_VERIFY: i32 = 2;
/// Exit status for internal and IO failures.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "povmlab", version, about = "Operational quantum measurement toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-photon counting statistics of a Mach-Zehnder interferometer over a phase sweep.
    MziScan(commands::MziScanArgs),
    /// Interference visibility against path confidence for a Kerr which-path probe.
    KerrTradeoff(commands::KerrArgs),
    /// Coexistence of two qubit effects and their joint observable.
    Spin(commands::SpinArgs),
    /// Phase effects on a spin space with covariance residuals.
    SpinPhase(commands::SpinPhaseArgs),
    /// Measurement-model checks on a cyclic grid.
    Models(commands::ModelsArgs),
}

impl Command {
    fn output(&self) -> &Output {
        match self {
            Command::MziScan(a) => &a.output,
            Command::KerrTradeoff(a) => &a.output,
            Command::Spin(a) => &a.output,
            Command::SpinPhase(a) => &a.output,
            Command::Models(a) => &a.output,
        }
    }
}

/// Errors caused by the caller's parameters rather than by the library.
fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::BlochNormTooLarge(_)
            | Error::MalformedInterval { .. }
            | Error::TruncationLeakage { .. }
            | Error::NotNormalizedProfile(_)
            | Error::OverlappingSupports(_)
            | Error::MalformedCircuit(_)
    )
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::MziScan(a) => commands::mzi_scan(a),
        Command::KerrTradeoff(a) => commands::kerr_tradeoff(a),
        Command::Spin(a) => commands::spin_report(a),
        Command::SpinPhase(a) => commands::spin_phase_report(a),
        Command::Models(a) => commands::models_report(a),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return if is_usage_error(&e) { EXIT_USAGE } else { EXIT_FAILURE };
        }
    };
    let out = cli.command.output();
    let written = match &out.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            emit(&report, out.format, &mut w)?;
            w.flush()
        }),
        None => emit(&report, out.format, stdout),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_FAILURE;
    }
    if out.verify && !report.all_pass() {
        for c in report.checks.iter().filter(|c| !c.pass) {
            let _ = writeln!(stderr, "check failed: {} = {:e}", c.name, c.value);
        }
        return EXIT_VERIFY;
    }
    0
}

fn emit(report: &report::Report, format: Format, w: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => report.write_csv(w),
        Format::Json => report.write_json(w),
    }
}
