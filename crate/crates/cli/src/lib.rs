//! Command-line runner: parses flags and config files into a [`RunConfig`], runs
//! experiments from the registry, and writes reports and CSV files.

pub mod args;
pub mod emit;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use nodal_heat::bounds::{self, ExperimentReport, RunConfig, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs one experiment, or all of them for `suite`. Returns the reports in order.
pub fn run_config(cfg: &RunConfig) -> Result<Vec<ExperimentReport>, String> {
    let selected: Vec<Box<dyn bounds::Experiment>> = if cfg.experiment == "suite" {
        bounds::registry()
    } else {
        match bounds::find(&cfg.experiment) {
            Some(e) => vec![e],
            None => return Err(unknown_name(&cfg.experiment)),
        }
    };
    let mut reports = Vec::new();
    for e in selected {
        let started = Instant::now();
        let report = e.run(cfg).map_err(|err| format!("{}: {err}", e.name()))?;
        eprintln!("{:<18} {:<12} {:>8.1} s", e.name(), report.verdict().as_str(), started.elapsed().as_secs_f64());
        reports.push(report);
    }
    Ok(reports)
}

fn unknown_name(name: &str) -> String {
    format!("unknown experiment `{name}`; valid names: {}, suite", bounds::names().join(", "))
}

/// Exit status for a set of reports.
pub fn exit_code(reports: &[ExperimentReport]) -> i32 {
    if reports.iter().any(|r| r.verdict() == Verdict::Fail) {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from_args(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match cli.into_config() {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    if cfg.experiment != "suite" && bounds::find(&cfg.experiment).is_none() {
        eprintln!("error: {}", unknown_name(&cfg.experiment));
        return EXIT_USAGE;
    }
    let reports = match run_config(&cfg) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit::write_all(&reports, &cfg) {
        eprintln!("error: cannot write to {}: {e}", cfg.out.display());
        return EXIT_USAGE;
    }
    let mut out = std::io::stdout().lock();
    for r in &reports {
        let _ = writeln!(out, "{}: {}", r.name, r.verdict().as_str());
    }
    exit_code(&reports)
}
