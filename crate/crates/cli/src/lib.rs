//! Command-line driver: `carleman-qr <solve|bench|list> [test] [flags]`.
//!
//! Exit codes: 0 success, 1 a benchmark missed its target, 2 usage error,
//! 3 solver failure or malformed input.

pub mod config;
pub mod problem_file;

use std::fs;
use std::io::Write;

use carleman_core::benchmark::{run_spec, Line, Summary};
use carleman_core::problem::catalog_with_epsilon;
use carleman_core::qr_solver::assemble_initial;
use carleman_core::{io, run_all, BenchReport, BenchmarkId};

pub use config::{Args, Command, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] carleman_core::Error),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(_) | CliError::Solver(_) => 3,
        }
    }
}

/// Runs a validated configuration and returns the exit code.
pub fn run(config: &RunConfig, out: &mut impl Write) -> Result<i32, CliError> {
    match config.command {
        Some(Command::List) => {
            for id in BenchmarkId::ALL {
                let _ = writeln!(out, "{:<4} {}", id.as_str(), id.description());
            }
            Ok(0)
        }
        Some(Command::Bench) => bench(config, out),
        Some(Command::Solve) => solve(config, out),
        None => Err(CliError::Usage("missing command".into())),
    }
}

fn parse_ids(test: Option<&str>) -> Result<Vec<BenchmarkId>, CliError> {
    match test {
        None | Some("all") => Ok(BenchmarkId::ALL.to_vec()),
        Some(t) => t.parse().map(|id| vec![id]).map_err(|e: carleman_core::Error| CliError::Usage(e.to_string())),
    }
}

fn prepare_out_dir(config: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&config.out).map_err(|e| carleman_core::Error::Io { path: config.out.clone(), source: e })?;
    io::write_json(&config.out.join("config.json"), config)?;
    Ok(())
}

fn bench(config: &RunConfig, out: &mut impl Write) -> Result<i32, CliError> {
    let ids = parse_ids(config.test.as_deref())?;
    prepare_out_dir(config)?;
    let reports = run_all(&ids, &config.bench_config(), config.jobs)?;
    for r in &reports {
        io::write_bench_artifacts(&config.out, r)?;
    }
    let summary = Summary::from_reports(&reports);
    io::write_summary(&config.out.join("summary.json"), &summary)?;
    print_table(&reports, out);
    Ok(if summary.passed { 0 } else { 1 })
}

fn print_table(reports: &[BenchReport], out: &mut impl Write) {
    let _ = writeln!(out, "{:<6} {:>12} {:>10} {:>6} {:>10}  status", "test", "rel_linf", "target", "iters", "converged");
    for r in reports {
        let err = r.rel_linf_error.map_or("-".to_string(), |e| format!("{e:.4e}"));
        let target = r.target.map_or("-".to_string(), |t| format!("{:.3e}", t.rel_linf_error));
        let status = match (&r.failure, r.passed) {
            (Some(f), _) => format!("FAILED: {f}"),
            (None, true) => "ok".to_string(),
            (None, false) => "MISSED".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<6} {:>12} {:>10} {:>6} {:>10}  {}",
            r.test,
            err,
            target,
            r.iteration.iterations(),
            r.iteration.converged,
            status
        );
    }
}

fn sanitize(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "problem".into()
    } else {
        s
    }
}

fn solve(config: &RunConfig, out: &mut impl Write) -> Result<i32, CliError> {
    let (mut spec, line) = match (&config.problem, config.test.as_deref()) {
        (Some(path), _) => (problem_file::load_problem(path, config.epsilon)?, Line::Vertical(0.0)),
        (None, Some(t)) if t != "all" => {
            let id: BenchmarkId = t.parse().map_err(|e: carleman_core::Error| CliError::Usage(e.to_string()))?;
            (catalog_with_epsilon(id, config.epsilon)?, Line::for_id(id))
        }
        _ => return Err(CliError::Usage("solve needs a test id or --problem FILE".into())),
    };
    spec.label = sanitize(&spec.label);
    prepare_out_dir(config)?;
    let bc = config.bench_config();
    if config.dump_system {
        let sys = assemble_initial(&spec, &bc.grid()?, &bc.solver)?;
        io::dump_system(&config.out, &format!("{}_initial", spec.label), &sys)?;
    }
    let report = run_spec(&spec, None, line, &bc)?;
    io::write_bench_artifacts(&config.out, &report)?;
    if let Some(f) = &report.failure {
        return Err(CliError::Solver(format!("{}: {f}", report.test)));
    }
    print_table(std::slice::from_ref(&report), out);
    Ok(0)
}

/// Parses `argv`, runs, and returns the process exit code; errors go to
/// `err`.
pub fn main_with(argv: impl IntoIterator<Item = String>, out: &mut impl Write, err: &mut impl Write) -> i32 {
    use clap::Parser;
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return e.exit_code();
        }
    };
    let result = RunConfig::from_args(args).and_then(|c| run(&c, out));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
