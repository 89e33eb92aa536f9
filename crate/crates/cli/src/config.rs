use std::fs;
use std::path::{Path, PathBuf};

use carleman_core::iteration::IterationParams;
use carleman_core::problem::DEFAULT_EPSILON;
use carleman_core::{BenchConfig, CarlemanParams, Grid2D, LinearMethod, Rect, SolverParams};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Bench,
    List,
}

/// Effective configuration of one invocation. Written to `config.json` in
/// the output directory; feeding that file back with `--config` repeats the
/// run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    /// Catalog id, or `all` for `bench`.
    pub test: Option<String>,
    pub problem: Option<PathBuf>,
    pub n: usize,
    pub lambda: f64,
    pub beta: f64,
    pub x0: [f64; 2],
    pub eta: f64,
    pub epsilon: f64,
    pub kappa0: f64,
    pub max_iter: usize,
    pub ls_tol: f64,
    pub method: LinearMethod,
    pub jobs: usize,
    pub out: PathBuf,
    pub dump_system: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sp = SolverParams::default();
        let ip = IterationParams::default();
        RunConfig {
            command: None,
            test: None,
            problem: None,
            n: 80,
            lambda: sp.carleman.lambda,
            beta: sp.carleman.beta,
            x0: sp.carleman.x0,
            eta: sp.eta,
            epsilon: DEFAULT_EPSILON,
            kappa0: ip.kappa0,
            max_iter: ip.max_iter,
            ls_tol: sp.ls_tol,
            method: sp.method,
            jobs: 1,
            out: PathBuf::from("out"),
            dump_system: false,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "carleman-qr",
    version,
    about = "Carleman-weighted quasi-reversibility solver for elliptic Cauchy problems",
    allow_negative_numbers = true,
    after_help = "Exit codes: 0 success, 1 benchmark target missed, 2 usage error, 3 solver or input error."
)]
pub struct Args {
    /// solve, bench or list
    pub command: Option<Command>,
    /// Catalog id (ql1, ql2, hj1..hj6), or `all` for bench
    pub test: Option<String>,
    /// JSON problem file for `solve`
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Grid nodes per axis
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Pole of the Carleman weight, as `x,y`
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub x0: Option<[f64; 2]>,
    /// Regularization weight
    #[arg(long)]
    pub eta: Option<f64>,
    /// Viscosity for the Hamilton-Jacobi tests
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Stopping threshold on the L2 increment
    #[arg(long)]
    pub kappa0: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Relative tolerance of the least-squares solve
    #[arg(long)]
    pub ls_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Parallel benchmark runs
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON configuration file; flags take precedence over its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write the initial-guess system in MatrixMarket form
    #[arg(long)]
    pub dump_system: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Direct,
    Iterative,
}

impl From<MethodArg> for LinearMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => LinearMethod::Auto,
            MethodArg::Direct => LinearMethod::Direct,
            MethodArg::Iterative => LinearMethod::Iterative,
        }
    }
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `x,y`, got `{s}`"));
    }
    let x = parts[0].trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", parts[0]))?;
    let y = parts[1].trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", parts[1]))?;
    Ok([x, y])
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Defaults, then the `--config` file, then explicit flags.
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let mut c = match &args.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = args.$field { c.$field = v.into(); })*
            };
        }
        take!(n, lambda, beta, x0, eta, epsilon, kappa0, max_iter, ls_tol, method, jobs, out);
        if args.command.is_some() {
            c.command = args.command;
        }
        if args.test.is_some() {
            c.test = args.test;
        }
        if args.problem.is_some() {
            c.problem = args.problem;
        }
        c.dump_system |= args.dump_system;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.command.is_none() {
            return usage("missing command (solve, bench or list)".into());
        }
        if self.n < 7 {
            return usage(format!("--n must be at least 7, got {}", self.n));
        }
        for (name, v) in [("lambda", self.lambda), ("beta", self.beta), ("eta", self.eta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return usage(format!("--{name} must be a finite value >= 0, got {v}"));
            }
        }
        for (name, v) in [("epsilon", self.epsilon), ("kappa0", self.kappa0)] {
            if !(v > 0.0 && v.is_finite()) {
                return usage(format!("--{name} must be positive, got {v}"));
            }
        }
        if !(self.ls_tol > 0.0 && self.ls_tol < 1.0) {
            return usage(format!("--ls-tol must lie in (0, 1), got {}", self.ls_tol));
        }
        if self.max_iter == 0 {
            return usage("--max-iter must be at least 1".into());
        }
        if self.jobs == 0 {
            return usage("--jobs must be at least 1".into());
        }
        let grid = self.grid().map_err(|e| CliError::Usage(e.to_string()))?;
        self.solver_params()
            .validate(&grid)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> carleman_core::Result<Grid2D> {
        Grid2D::square(self.n, Rect::default())
    }

    pub fn solver_params(&self) -> SolverParams {
        SolverParams {
            carleman: CarlemanParams { x0: self.x0, beta: self.beta, lambda: self.lambda },
            eta: self.eta,
            ls_tol: self.ls_tol,
            method: self.method,
            ..SolverParams::default()
        }
    }

    pub fn bench_config(&self) -> BenchConfig {
        BenchConfig {
            n: self.n,
            epsilon: self.epsilon,
            solver: self.solver_params(),
            iteration: IterationParams {
                kappa0: self.kappa0,
                max_iter: self.max_iter,
                ..IterationParams::default()
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> Result<RunConfig, CliError> {
        let args = Args::try_parse_from(std::iter::once("carleman-qr").chain(argv.iter().copied()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        RunConfig::from_args(args)
    }

    #[test]
    fn defaults() {
        let c = parse(&["bench", "ql1"]).unwrap();
        assert_eq!(c.command, Some(Command::Bench));
        assert_eq!(c.test.as_deref(), Some("ql1"));
        assert_eq!(c.n, 80);
        assert_eq!((c.lambda, c.beta, c.x0), (4.0, 10.0, [-4.0, 0.0]));
        assert_eq!((c.eta, c.epsilon, c.kappa0), (1e-4, 1e-3, 1e-6));
        assert_eq!(c.jobs, 1);
    }

    #[test]
    fn flag_overrides() {
        let c = parse(&["bench", "hj3", "--lambda", "8"]).unwrap();
        assert_eq!(c.lambda, 8.0);
        assert_eq!(c.beta, 10.0);
        let c = parse(&["solve", "ql2", "--x0", "-3,0.5", "--method", "iterative"]).unwrap();
        assert_eq!(c.x0, [-3.0, 0.5]);
        assert_eq!(c.method, LinearMethod::Iterative);
    }

    #[test]
    fn out_of_range_values() {
        assert!(matches!(parse(&["bench", "ql1", "--eta", "-1"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["bench", "ql1", "--n", "5"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["bench", "ql1", "--x0", "-1.5,0"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["bench", "ql1", "--ls-tol", "2"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["bench", "ql1", "--bogus", "2"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&[]), Err(CliError::Usage(_))));
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"command": "bench", "test": "hj1", "lambda": 6.0, "n": 41}"#).unwrap();
        let p = path.to_str().unwrap();
        let c = parse(&["--config", p]).unwrap();
        assert_eq!((c.lambda, c.n, c.test.as_deref()), (6.0, 41, Some("hj1")));
        let c = parse(&["--config", p, "--lambda", "2"]).unwrap();
        assert_eq!((c.lambda, c.n), (2.0, 41));
        fs::write(&path, r#"{"lamda": 6.0}"#).unwrap();
        assert!(matches!(parse(&["bench", "--config", p]), Err(CliError::Usage(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = parse(&["bench", "all", "--n", "41", "--x0", "-5,1", "--eta", "0.001"]).unwrap();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
