//! Assembly and solution of the weighted least-squares problems behind the
//! initial guess and each linearized step.
//!
//! Unknowns are the free nodes left after eliminating the Cauchy data (see
//! [`eliminate_cauchy`]). A system is a sparse matrix `A`, a right-hand side
//! `b` and positive row weights `w`; its minimizer solves
//! `min Σ_r (w_r (A x - b)_r)²`.

mod assembly;
mod banded;
mod cgls;
mod sparse;
mod unknowns;

pub use assembly::{assemble_initial, assemble_linearized};
pub use banded::{BandedCholesky, BandedSpd};
pub use cgls::{cgls, CglsOutcome};
pub use sparse::CsrMatrix;
pub use unknowns::{eliminate_cauchy, eliminate_cauchy_with, NodeExpr, UnknownMap};

use serde::{Deserialize, Serialize};

use crate::carleman::{carleman_factor, CarlemanParams, FactorPower};
use crate::grid::{div_a_grad, gradient, Field, Grid2D};
use crate::problem::Diffusion;
use crate::{Error, Result};
use cgls::dot;

/// Grids up to this many nodes per axis use the direct solver under
/// [`LinearMethod::Auto`].
pub const DIRECT_LIMIT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearMethod {
    #[default]
    Auto,
    /// Banded Cholesky on the normal equations.
    Direct,
    /// Conjugate gradients on the normal equations.
    Iterative,
}

impl std::str::FromStr for LinearMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(LinearMethod::Auto),
            "direct" => Ok(LinearMethod::Direct),
            "iterative" => Ok(LinearMethod::Iterative),
            _ => Err(Error::Parameter(format!("unknown linear method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    #[serde(flatten)]
    pub carleman: CarlemanParams,
    pub eta: f64,
    pub ls_tol: f64,
    pub ls_max_iter: usize,
    pub method: LinearMethod,
    /// Power of the Carleman factor in the initial-guess functional.
    pub initial_power: FactorPower,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            carleman: CarlemanParams::default(),
            eta: 1e-4,
            ls_tol: 1e-10,
            ls_max_iter: 10_000,
            method: LinearMethod::Auto,
            initial_power: FactorPower::Single,
        }
    }
}

impl SolverParams {
    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::Parameter(format!("eta must be >= 0, got {}", self.eta)));
        }
        if !(self.ls_tol > 0.0 && self.ls_tol < 1.0) {
            return Err(Error::Parameter(format!("ls_tol must lie in (0, 1), got {}", self.ls_tol)));
        }
        if self.ls_max_iter == 0 {
            return Err(Error::Parameter("ls_max_iter must be >= 1".into()));
        }
        self.carleman.validate(grid)
    }

    fn resolved_method(&self, grid: &Grid2D) -> LinearMethod {
        match self.method {
            LinearMethod::Auto if grid.nx().max(grid.ny()) <= DIRECT_LIMIT => LinearMethod::Direct,
            LinearMethod::Auto => LinearMethod::Iterative,
            m => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Equation,
    Regularization,
}

/// An assembled system; immutable once built.
#[derive(Debug, Clone)]
pub struct WeightedLeastSquares {
    pub(crate) matrix: CsrMatrix,
    pub(crate) rhs: Vec<f64>,
    pub(crate) weights: Vec<f64>,
    pub(crate) kinds: Vec<RowKind>,
    pub(crate) map: UnknownMap,
}

impl WeightedLeastSquares {
    /// Builds a system from explicit parts; every weight must be positive.
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>, weights: Vec<f64>, map: UnknownMap) -> Result<Self> {
        if rhs.len() != matrix.nrows() {
            return Err(Error::LengthMismatch { expected: matrix.nrows(), got: rhs.len() });
        }
        if weights.len() != matrix.nrows() {
            return Err(Error::LengthMismatch { expected: matrix.nrows(), got: weights.len() });
        }
        if matrix.ncols() != map.free_count() {
            return Err(Error::LengthMismatch { expected: map.free_count(), got: matrix.ncols() });
        }
        if let Some(r) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Parameter(format!("row weight {} at row {r} is not positive", weights[r])));
        }
        let kinds = vec![RowKind::Equation; rhs.len()];
        Ok(WeightedLeastSquares { matrix, rhs, weights, kinds, map })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row_kinds(&self) -> &[RowKind] {
        &self.kinds
    }

    pub fn unknown_map(&self) -> &UnknownMap {
        &self.map
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// `Σ (w (A x - b))²`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.nrows()];
        self.matrix.weighted_mul(&self.weights, x, &mut ax);
        ax.iter()
            .zip(&self.rhs)
            .zip(&self.weights)
            .map(|((a, b), w)| (a - w * b).powi(2))
            .sum()
    }

    /// `‖AᵀW²(Ax - b)‖ / ‖AᵀW²b‖`, or the absolute value when `b` has no
    /// component in the range of `Aᵀ`.
    pub fn normal_residual(&self, x: &[f64]) -> f64 {
        let mut r = vec![0.0; self.nrows()];
        self.matrix.weighted_mul(&self.weights, x, &mut r);
        for ((ri, bi), wi) in r.iter_mut().zip(&self.rhs).zip(&self.weights) {
            *ri -= wi * bi;
        }
        let mut g = vec![0.0; self.ncols()];
        self.matrix.weighted_tmul(&self.weights, &r, &mut g);
        let wb: Vec<f64> = self.rhs.iter().zip(&self.weights).map(|(b, w)| b * w).collect();
        let mut c = vec![0.0; self.ncols()];
        self.matrix.weighted_tmul(&self.weights, &wb, &mut c);
        let scale = dot(&c, &c).sqrt();
        let res = dot(&g, &g).sqrt();
        if scale > 0.0 {
            res / scale
        } else {
            res
        }
    }
}

/// Free-unknown minimizer with solver diagnostics.
#[derive(Debug, Clone)]
pub struct LsSolution {
    pub free: Vec<f64>,
    pub method: LinearMethod,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Minimizer of `sys` over the free unknowns.
pub fn solve_free(sys: &WeightedLeastSquares, sp: &SolverParams) -> Result<LsSolution> {
    let grid = *sys.map.grid();
    sp.validate(&grid)?;
    let n = sys.ncols();
    let wb: Vec<f64> = sys.rhs.iter().zip(&sys.weights).map(|(b, w)| b * w).collect();
    match sp.resolved_method(&grid) {
        LinearMethod::Iterative => {
            let out = cgls(&sys.matrix, &sys.weights, &sys.rhs, sp.ls_tol, sp.ls_max_iter);
            if !out.converged {
                return Err(Error::LinearSolver {
                    reason: format!("conjugate gradients stopped after {} iterations", out.iterations),
                    residual: out.relative_residual,
                });
            }
            Ok(LsSolution {
                free: out.x,
                method: LinearMethod::Iterative,
                iterations: out.iterations,
                relative_residual: out.relative_residual,
            })
        }
        _ => {
            let normal = BandedSpd::normal_matrix(&sys.matrix, &sys.weights);
            let mut c = vec![0.0; n];
            sys.matrix.weighted_tmul(&sys.weights, &wb, &mut c);
            let scale = dot(&c, &c).sqrt();
            let chol = normal.clone().factorize().map_err(|row| Error::LinearSolver {
                reason: format!("normal matrix is not positive definite (pivot {row})"),
                residual: 1.0,
            })?;
            let mut x = c.clone();
            chol.solve_in_place(&mut x);
            // one step of iterative refinement
            let mut mx = vec![0.0; n];
            normal.mul(&x, &mut mx);
            let mut r: Vec<f64> = c.iter().zip(&mx).map(|(a, b)| a - b).collect();
            chol.solve_in_place(&mut r);
            for (xi, ri) in x.iter_mut().zip(&r) {
                *xi += ri;
            }
            normal.mul(&x, &mut mx);
            let res = c.iter().zip(&mx).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let rel = if scale > 0.0 { res / scale } else { res };
            if !rel.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::LinearSolver { reason: "non-finite solution".into(), residual: rel });
            }
            Ok(LsSolution { free: x, method: LinearMethod::Direct, iterations: 2, relative_residual: rel })
        }
    }
}

/// Minimizer of `sys` as a full grid field, eliminated nodes included.
pub fn solve_ls(sys: &WeightedLeastSquares, sp: &SolverParams) -> Result<Field> {
    let sol = solve_free(sys, sp)?;
    sys.map.reconstruct(&sol.free)
}

/// Ratio `∫e^{2λμ}|div(A∇φ)|² / (λ∫e^{2λμ}|∇φ|² + λ³∫e^{2λμ}φ²)` on the grid
/// of `phi`. The numerator runs over interior nodes, the denominator over
/// all nodes.
pub fn carleman_ratio(phi: &Field, a: &Diffusion, cp: &CarlemanParams) -> Result<f64> {
    let grid = *phi.grid();
    cp.validate(&grid)?;
    let div = div_a_grad(phi, a)?;
    let grad = gradient(phi);
    let (mut num, mut first, mut zeroth) = (0.0, 0.0, 0.0);
    for (i, j) in grid.nodes() {
        let k = grid.index(i, j);
        let w = carleman_factor(grid.point(i, j), cp, FactorPower::Double)?;
        if grid.is_interior(i, j) {
            num += w * div.values()[k].powi(2);
        }
        let g = grad.values()[k];
        first += w * (g[0] * g[0] + g[1] * g[1]);
        zeroth += w * phi.values()[k].powi(2);
    }
    let lambda = cp.lambda;
    let den = lambda * first + lambda.powi(3) * zeroth;
    if !(den > 0.0) {
        return Err(Error::Parameter("ratio needs lambda > 0 and a nonzero field".into()));
    }
    Ok(num / den)
}
