//! The outer loop: solve for `u₀`, then repeatedly linearize around `u_n`,
//! solve for the increment and update, until the increment is small.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::grid::{div_a_grad, gradient, norm_l2, norm_weighted, Field, Grid2D};
use crate::problem::ProblemSpec;
use crate::qr_solver::{assemble_initial, assemble_linearized, solve_ls, SolverParams};
use crate::{Error, Result};

/// Relative change below which consecutive increments count as stalled.
pub const STAGNATION_TOL: f64 = 1e-3;
/// Number of consecutive increments inspected by the stagnation rule.
pub const STAGNATION_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterationParams {
    /// Stop once `‖u_{n+1} - u_n‖_{L²} ≤ kappa0`.
    pub kappa0: f64,
    pub max_iter: usize,
    /// Record `‖u_n - u*‖` in the Carleman-weighted norm when `u*` is known.
    pub record_weighted_norms: bool,
}

impl Default for IterationParams {
    fn default() -> Self {
        IterationParams { kappa0: 1e-6, max_iter: 50, record_weighted_norms: true }
    }
}

impl IterationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa0 > 0.0 && self.kappa0.is_finite()) {
            return Err(Error::Parameter(format!("kappa0 must be positive, got {}", self.kappa0)));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Iterate index; `0` is the initial guess.
    pub n: usize,
    /// `‖u_n - u_{n-1}‖_{L²}`, absent for `n = 0`.
    pub increment_l2: Option<f64>,
    /// L² norm of `-div(A∇u_n) + F` away from kinks.
    pub residual_l2: f64,
    pub error_weighted: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub stagnated: bool,
    pub theta_hat: Option<f64>,
}

impl IterationReport {
    fn new() -> Self {
        IterationReport { records: Vec::new(), converged: false, stagnated: false, theta_hat: None }
    }

    /// Number of increments computed.
    pub fn iterations(&self) -> usize {
        self.records.iter().filter(|r| r.increment_l2.is_some()).count()
    }

    pub fn increments(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.increment_l2).collect()
    }

    pub fn weighted_errors(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.error_weighted).collect()
    }
}

/// A run that stopped on an error, with everything recorded before it.
#[derive(Debug)]
pub struct Aborted {
    pub error: Error,
    pub partial: IterationReport,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} iterations)", self.error, self.partial.iterations())
    }
}

impl std::error::Error for Aborted {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<Aborted> for Error {
    fn from(a: Aborted) -> Self {
        a.error
    }
}

pub type RunResult = std::result::Result<(Field, IterationReport), Aborted>;

/// Full run: initial guess from the data, then the linearization loop.
pub fn run(spec: &ProblemSpec, grid: &Grid2D, sp: &SolverParams, ip: &IterationParams) -> RunResult {
    let start = Instant::now();
    let abort = |error| Aborted { error, partial: IterationReport::new() };
    ip.validate().map_err(abort)?;
    let u0 = assemble_initial(spec, grid, sp).and_then(|sys| solve_ls(&sys, sp)).map_err(abort)?;
    iterate(spec, u0, sp, ip, start)
}

/// The linearization loop started from a given `u₀`.
pub fn run_from(spec: &ProblemSpec, u0: Field, sp: &SolverParams, ip: &IterationParams) -> RunResult {
    let abort = |error| Aborted { error, partial: IterationReport::new() };
    ip.validate().map_err(abort)?;
    iterate(spec, u0, sp, ip, Instant::now())
}

fn iterate(
    spec: &ProblemSpec,
    u0: Field,
    sp: &SolverParams,
    ip: &IterationParams,
    start: Instant,
) -> RunResult {
    let mut report = IterationReport::new();
    let exact = match spec.true_solution() {
        Some(f) if ip.record_weighted_norms => match Field::from_fn(*u0.grid(), |p| f(p)) {
            Ok(u) => Some(u),
            Err(error) => return Err(Aborted { error, partial: report }),
        },
        _ => None,
    };
    let record = |n, increment, u: &Field, start: Instant| -> Result<IterationRecord> {
        let error_weighted = match &exact {
            Some(e) => Some(norm_weighted(&(u - e), &sp.carleman)?),
            None => None,
        };
        Ok(IterationRecord {
            n,
            increment_l2: increment,
            residual_l2: residual_l2(spec, u)?,
            error_weighted,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    };
    match record(0, None, &u0, start) {
        Ok(r) => report.records.push(r),
        Err(error) => return Err(Aborted { error, partial: report }),
    }

    let mut u = u0;
    for n in 1..=ip.max_iter {
        let start = Instant::now();
        let step = assemble_linearized(&u, spec, sp)
            .and_then(|sys| solve_ls(&sys, sp))
            .and_then(|h| {
                let next = &u + &h;
                if next.values().iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { what: "iterate", index: n });
                }
                let inc = norm_l2(&h);
                let rec = record(n, Some(inc), &next, start)?;
                Ok((next, inc, rec))
            });
        let (next, inc, rec) = match step {
            Ok(s) => s,
            Err(error) => {
                report.theta_hat = theta_of(&report);
                return Err(Aborted { error, partial: report });
            }
        };
        u = next;
        report.records.push(rec);
        if inc <= ip.kappa0 {
            report.converged = true;
            break;
        }
        if stagnating(&report.increments()) {
            report.stagnated = true;
            break;
        }
    }
    report.theta_hat = theta_of(&report);
    Ok((u, report))
}

fn theta_of(report: &IterationReport) -> Option<f64> {
    fit_theta(&report.weighted_errors()).ok()
}

fn stagnating(increments: &[f64]) -> bool {
    if increments.len() < STAGNATION_WINDOW {
        return false;
    }
    let tail = &increments[increments.len() - STAGNATION_WINDOW..];
    tail.windows(2).all(|w| (w[1] - w[0]).abs() < STAGNATION_TOL * w[0].abs())
}

/// `θ̂ = exp(slope)` of the least-squares line through `(n, ln e_n)`.
pub fn fit_theta(errors: &[f64]) -> Result<f64> {
    if errors.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: errors.len() });
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Parameter(format!("errors must be positive to fit a rate, got {e}")));
    }
    let m = errors.len() as f64;
    let xbar = (m - 1.0) / 2.0;
    let ybar = errors.iter().map(|e| e.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (n, e) in errors.iter().enumerate() {
        let dx = n as f64 - xbar;
        sxy += dx * (e.ln() - ybar);
        sxx += dx * dx;
    }
    Ok((sxy / sxx).exp())
}

/// `‖-div(A∇u) + F(x, u, ∇u)‖_{L²}` over interior nodes at least `3δ` from
/// every kink curve.
pub fn residual_l2(spec: &ProblemSpec, u: &Field) -> Result<f64> {
    let grid = *u.grid();
    let div = div_a_grad(u, &spec.diffusion)?;
    let du = gradient(u);
    let cutoff = 3.0 * grid.delta();
    let mut s = 0.0;
    for (i, j) in grid.interior_nodes() {
        let x = grid.point(i, j);
        if spec.kink_distance(x) < cutoff {
            continue;
        }
        let k = grid.index(i, j);
        let r = -div.values()[k] + spec.eval_f(x, u.values()[k], du.values()[k])?;
        s += r * r;
    }
    Ok((s * grid.cell_area()).sqrt())
}
