use super::unknowns::{eliminate_cauchy, eliminate_cauchy_with, UnknownMap};
use super::{RowKind, SolverParams, WeightedLeastSquares};
use crate::carleman::{carleman_factor, FactorPower};
use crate::grid::{
    apply, div_a_grad, div_a_grad_stencil, gradient, gradient_stencil, second_derivative_stencils, Field,
    Grid2D,
};
use crate::problem::ProblemSpec;
use crate::qr_solver::sparse::CsrMatrix;
use crate::Result;

struct RowAssembler {
    map: UnknownMap,
    matrix: CsrMatrix,
    rhs: Vec<f64>,
    weights: Vec<f64>,
    kinds: Vec<RowKind>,
    scratch: Vec<(usize, f64)>,
    merged: Vec<(usize, f64)>,
}

impl RowAssembler {
    fn new(map: UnknownMap) -> Self {
        let ncols = map.free_count();
        RowAssembler {
            map,
            matrix: CsrMatrix::new(ncols),
            rhs: Vec::new(),
            weights: Vec::new(),
            kinds: Vec::new(),
            scratch: Vec::new(),
            merged: Vec::new(),
        }
    }

    /// Adds the row `Σ c·u[node] = rhs` after substituting the node
    /// expressions. Rows without free unknowns are dropped.
    fn push(&mut self, stencil: &[(usize, f64)], rhs: f64, weight: f64, kind: RowKind) {
        self.scratch.clear();
        let mut constant = 0.0;
        for &(node, c) in stencil {
            let e = self.map.expr(node);
            constant += c * e.constant;
            self.scratch.extend(e.terms.iter().map(|&(col, v)| (col, c * v)));
        }
        self.scratch.sort_unstable_by_key(|&(col, _)| col);
        self.merged.clear();
        for &(col, v) in &self.scratch {
            match self.merged.last_mut() {
                Some(last) if last.0 == col => last.1 += v,
                _ => self.merged.push((col, v)),
            }
        }
        self.merged.retain(|&(_, v)| v != 0.0);
        if self.merged.is_empty() {
            return;
        }
        self.matrix.push_row(&self.merged);
        self.rhs.push(rhs - constant);
        self.weights.push(weight);
        self.kinds.push(kind);
    }

    /// `√η` rows for every discrete H² component of `base + φ`.
    fn push_regularization(&mut self, grid: &Grid2D, base: Option<&Field>, eta: f64) {
        if eta <= 0.0 {
            return;
        }
        let w = (eta * grid.cell_area()).sqrt();
        let rhs = |st: &[(usize, f64)]| base.map_or(0.0, |b| -apply(st, b.values()));
        for (i, j) in grid.nodes() {
            let value = [(grid.index(i, j), 1.0)];
            self.push(&value, rhs(&value), w, RowKind::Regularization);
            let (sx, sy) = gradient_stencil(grid, i, j);
            self.push(&sx, rhs(&sx), w, RowKind::Regularization);
            self.push(&sy, rhs(&sy), w, RowKind::Regularization);
            if grid.is_interior(i, j) {
                for st in second_derivative_stencils(grid, i, j) {
                    self.push(&st, rhs(&st), w, RowKind::Regularization);
                }
            }
        }
    }

    fn finish(self) -> WeightedLeastSquares {
        WeightedLeastSquares {
            matrix: self.matrix,
            rhs: self.rhs,
            weights: self.weights,
            kinds: self.kinds,
            map: self.map,
        }
    }
}

/// System whose minimizer is the increment `h` around `u_n`: one weighted
/// equation row per interior node for
/// `-div(A∇h) + F_s h + ∇_pF·∇h = div(A∇u_n) - F(x, u_n, ∇u_n)`
/// plus `√η` rows for the H² components of `u_n + h`.
pub fn assemble_linearized(
    u_n: &Field,
    spec: &ProblemSpec,
    sp: &SolverParams,
) -> Result<WeightedLeastSquares> {
    let grid = *u_n.grid();
    spec.validate(&grid)?;
    sp.validate(&grid)?;
    let mut asm = RowAssembler::new(eliminate_cauchy(&grid)?);
    let du = gradient(u_n);
    let div = div_a_grad(u_n, &spec.diffusion)?;
    let area = grid.cell_area();
    let mut stencil = Vec::with_capacity(16);
    for (i, j) in grid.interior_nodes() {
        let k = grid.index(i, j);
        let x = grid.point(i, j);
        let (s, p) = (u_n.values()[k], du.values()[k]);
        let f = spec.eval_f(x, s, p)?;
        let (ds, dp) = spec.eval_partials(x, s, p)?;
        stencil.clear();
        stencil.extend(
            div_a_grad_stencil(&grid, i, j, &spec.diffusion)
                .into_iter()
                .map(|(n, c)| (n, -c)),
        );
        stencil.push((k, ds));
        let (sx, sy) = gradient_stencil(&grid, i, j);
        stencil.extend(sx.into_iter().map(|(n, c)| (n, dp[0] * c)));
        stencil.extend(sy.into_iter().map(|(n, c)| (n, dp[1] * c)));
        let w = (carleman_factor(x, &sp.carleman, FactorPower::Double)? * area).sqrt();
        asm.push(&stencil, div.values()[k] - f, w, RowKind::Equation);
    }
    asm.push_regularization(&grid, Some(u_n), sp.eta);
    Ok(asm.finish())
}

/// System for the initial guess: `u₀` carries the Cauchy data, equation
/// rows are the weighted `div(A∇u₀)`, plus `√η` rows for H² components.
pub fn assemble_initial(
    spec: &ProblemSpec,
    grid: &Grid2D,
    sp: &SolverParams,
) -> Result<WeightedLeastSquares> {
    spec.validate(grid)?;
    sp.validate(grid)?;
    let mut asm = RowAssembler::new(eliminate_cauchy_with(grid, &spec.data)?);
    let area = grid.cell_area();
    for (i, j) in grid.interior_nodes() {
        let x = grid.point(i, j);
        let st = div_a_grad_stencil(grid, i, j, &spec.diffusion);
        let w = (carleman_factor(x, &sp.carleman, sp.initial_power)? * area).sqrt();
        asm.push(&st, 0.0, w, RowKind::Equation);
    }
    asm.push_regularization(grid, None, sp.eta);
    Ok(asm.finish())
}
