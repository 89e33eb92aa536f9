//! Reproduction runs for the catalog: error metrics, cross-sections,
//! per-test targets and the summary table.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::grid::{Field, Grid2D, Rect};
use crate::iteration::{self, IterationParams, IterationReport};
use crate::problem::{catalog_with_epsilon, BenchmarkId, ProblemSpec, DEFAULT_EPSILON};
use crate::qr_solver::SolverParams;
use crate::Result;

/// Pointwise relative error threshold used for the HJ3 node fraction.
pub const POINTWISE_THRESHOLD: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    /// Nodes per axis on `(-1, 1)²`.
    pub n: usize,
    /// Viscosity for the Hamilton-Jacobi tests.
    pub epsilon: f64,
    pub solver: SolverParams,
    pub iteration: IterationParams,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 80,
            epsilon: DEFAULT_EPSILON,
            solver: SolverParams::default(),
            iteration: IterationParams::default(),
        }
    }
}

impl BenchConfig {
    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::square(self.n, Rect::default())
    }
}

/// Pass criteria of one catalog test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub rel_linf_error: f64,
    /// The stopping rule must fire within this many increments.
    pub max_iterations: Option<usize>,
    /// Minimum fraction of nodes with pointwise relative error at most
    /// [`POINTWISE_THRESHOLD`].
    pub min_fraction_below: Option<f64>,
}

impl Target {
    pub fn for_id(id: BenchmarkId) -> Self {
        let (rel, iters, frac) = match id {
            BenchmarkId::Ql1 => (1e-3, Some(6), None),
            BenchmarkId::Ql2 => (1e-3, Some(8), None),
            BenchmarkId::Hj1 => (0.107, None, None),
            BenchmarkId::Hj2 => (0.072, None, None),
            BenchmarkId::Hj3 => (0.213, None, Some(0.9)),
            BenchmarkId::Hj4 => (0.02, None, None),
            BenchmarkId::Hj5 => (0.02, None, None),
            BenchmarkId::Hj6 => (0.096, None, None),
        };
        Target { rel_linf_error: rel, max_iterations: iters, min_fraction_below: frac }
    }

    /// Error published for the test, for reference in reports.
    pub fn reference_error(id: BenchmarkId) -> f64 {
        match id {
            BenchmarkId::Ql1 => 1.23e-5,
            BenchmarkId::Ql2 => 4.19e-5,
            BenchmarkId::Hj1 => 0.0533,
            BenchmarkId::Hj2 => 0.036,
            BenchmarkId::Hj3 => 0.1065,
            BenchmarkId::Hj4 => 0.0095,
            BenchmarkId::Hj5 => 0.0098,
            BenchmarkId::Hj6 => 0.048,
        }
    }
}

/// A line `x = offset` (vertical) or `y = offset` (horizontal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Line {
    Vertical(f64),
    Horizontal(f64),
}

impl Line {
    pub fn for_id(id: BenchmarkId) -> Self {
        match id {
            BenchmarkId::Hj2 => Line::Vertical(0.5),
            _ => Line::Vertical(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub line: Line,
    /// Coordinate of the grid line actually sampled.
    pub snapped: f64,
    /// `(t, u_true, u_comp)` ordered by `t`.
    pub samples: Vec<[f64; 3]>,
}

/// Samples `truth` and `u` along the grid line nearest to `line`.
pub fn cross_section(u: &Field, truth: &Field, line: Line) -> CrossSection {
    let grid = *u.grid();
    let (snapped, samples) = match line {
        Line::Vertical(x) => {
            let i = grid.nearest_i(x);
            let s = (0..grid.ny()).map(|j| [grid.y(j), truth.at(i, j), u.at(i, j)]).collect();
            (grid.x(i), s)
        }
        Line::Horizontal(y) => {
            let j = grid.nearest_j(y);
            let s = (0..grid.nx()).map(|i| [grid.x(i), truth.at(i, j), u.at(i, j)]).collect();
            (grid.y(j), s)
        }
    };
    CrossSection { line, snapped, samples }
}

/// `|u* - u| / ‖u*‖_{L∞}` at every node.
pub fn relative_error_field(u: &Field, truth: &Field) -> Result<Field> {
    let scale = truth.max_abs();
    let values = u.values().iter().zip(truth.values()).map(|(a, b)| (a - b).abs() / scale).collect();
    Field::new(*u.grid(), values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    /// Catalog id or the label of a user problem.
    pub test: String,
    pub config: BenchConfig,
    pub target: Option<Target>,
    pub iteration: IterationReport,
    pub solution: Option<Field>,
    pub truth: Option<Field>,
    pub error_field: Option<Field>,
    pub rel_linf_error: Option<f64>,
    pub fraction_below: Option<f64>,
    pub cross_section: Option<CrossSection>,
    pub checks: Vec<Check>,
    pub failure: Option<String>,
    pub passed: bool,
}

/// Full pipeline on one catalog test. Configuration errors are returned;
/// solver failures produce a failed report.
pub fn run_benchmark(id: BenchmarkId, config: &BenchConfig) -> Result<BenchReport> {
    let spec = catalog_with_epsilon(id, config.epsilon)?;
    run_spec(&spec, Some(Target::for_id(id)), Line::for_id(id), config)
}

/// Full pipeline on any problem. Error metrics need an exact solution;
/// without a target the report passes whenever the solve succeeds.
pub fn run_spec(
    spec: &ProblemSpec,
    target: Option<Target>,
    line: Line,
    config: &BenchConfig,
) -> Result<BenchReport> {
    let grid = config.grid()?;
    spec.validate(&grid)?;
    config.solver.validate(&grid)?;
    config.iteration.validate()?;
    let mut report = BenchReport {
        test: spec.label.clone(),
        config: *config,
        target,
        iteration: IterationReport {
            records: Vec::new(),
            converged: false,
            stagnated: false,
            theta_hat: None,
        },
        solution: None,
        truth: None,
        error_field: None,
        rel_linf_error: None,
        fraction_below: None,
        cross_section: None,
        checks: Vec::new(),
        failure: None,
        passed: false,
    };
    let (u, iter_report) = match iteration::run(spec, &grid, &config.solver, &config.iteration) {
        Ok(r) => r,
        Err(aborted) => {
            report.failure = Some(aborted.to_string());
            report.iteration = aborted.partial;
            return Ok(report);
        }
    };
    report.iteration = iter_report;
    let Some(f) = spec.true_solution() else {
        report.passed = true;
        report.solution = Some(u);
        return Ok(report);
    };
    let truth = Field::from_fn(grid, |p| f(p))?;
    let err = relative_error_field(&u, &truth)?;
    let rel = err.max_abs();
    let below = err.values().iter().filter(|v| **v <= POINTWISE_THRESHOLD).count();
    let fraction = below as f64 / err.values().len() as f64;

    let mut checks = Vec::new();
    if let Some(target) = target {
        checks.push(Check {
            name: "rel_linf_error".into(),
            value: rel,
            limit: target.rel_linf_error,
            passed: rel <= target.rel_linf_error,
        });
        if let Some(max) = target.max_iterations {
            let used = report.iteration.iterations();
            checks.push(Check {
                name: "iterations".into(),
                value: used as f64,
                limit: max as f64,
                passed: report.iteration.converged && used <= max,
            });
        }
        if let Some(min) = target.min_fraction_below {
            checks.push(Check {
                name: "fraction_below_3pct".into(),
                value: fraction,
                limit: min,
                passed: fraction >= min,
            });
        }
    }
    report.passed = checks.iter().all(|c| c.passed);
    report.checks = checks;
    report.cross_section = Some(cross_section(&u, &truth, line));
    report.rel_linf_error = Some(rel);
    report.fraction_below = Some(fraction);
    report.error_field = Some(err);
    report.truth = Some(truth);
    report.solution = Some(u);
    Ok(report)
}

#[cfg(test)]
fn exact_field(spec: &ProblemSpec, grid: &Grid2D) -> Result<Field> {
    let f = spec.true_solution().expect("catalog problems carry their exact solution");
    Field::from_fn(*grid, |p| f(p))
}

/// Runs `ids` on up to `jobs` threads; reports come back in `ids` order.
pub fn run_all(ids: &[BenchmarkId], config: &BenchConfig, jobs: usize) -> Result<Vec<BenchReport>> {
    let jobs = jobs.clamp(1, ids.len().max(1));
    if jobs == 1 {
        return ids.iter().map(|&id| run_benchmark(id, config)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<BenchReport>>>> = Mutex::new((0..ids.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= ids.len() {
                    break;
                }
                let r = run_benchmark(ids[k], config);
                slots.lock().expect("no panics while holding the lock")[k] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub test: String,
    pub rel_linf_error: Option<f64>,
    pub reference_error: Option<f64>,
    pub target: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub theta_hat: Option<f64>,
    pub checks: Vec<Check>,
    pub failure: Option<String>,
    pub passed: bool,
}

/// One row per test; contains no timings so identical runs serialize
/// identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub passed: bool,
}

impl Summary {
    pub fn from_reports(reports: &[BenchReport]) -> Self {
        let rows: Vec<SummaryRow> = reports
            .iter()
            .map(|r| SummaryRow {
                test: r.test.clone(),
                rel_linf_error: r.rel_linf_error,
                reference_error: r.test.parse().ok().map(Target::reference_error),
                target: r.target.map(|t| t.rel_linf_error),
                iterations: r.iteration.iterations(),
                converged: r.iteration.converged,
                theta_hat: r.iteration.theta_hat,
                checks: r.checks.clone(),
                failure: r.failure.clone(),
                passed: r.passed,
            })
            .collect();
        let passed = !rows.is_empty() && rows.iter().all(|r| r.passed);
        Summary { rows, passed }
    }
}
