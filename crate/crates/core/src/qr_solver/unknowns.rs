//! Hard elimination of the Cauchy conditions.
//!
//! Boundary nodes carry the Dirichlet value. Each node of the first
//! interior ring is tied to its neighbour on the second ring through the
//! one-sided Neumann stencil `(3u_b - 4u₁ + u₂) / (2δ) = g`, i.e.
//! `u₁ = (3u_b + u₂ - 2δg) / 4`. Ring corners average the relations of
//! their two sides. Every remaining node is a free unknown.

use crate::grid::{Field, Grid2D, Side};
use crate::problem::CauchyData;
use crate::{Error, Result};

/// A node value as an affine expression of the free unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeExpr {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl NodeExpr {
    fn constant(c: f64) -> Self {
        NodeExpr { constant: c, terms: Vec::new() }
    }

    fn free(col: usize) -> Self {
        NodeExpr { constant: 0.0, terms: vec![(col, 1.0)] }
    }

    fn affine(&self, scale: f64, shift: f64) -> Self {
        NodeExpr {
            constant: self.constant * scale + shift,
            terms: self.terms.iter().map(|&(c, v)| (c, v * scale)).collect(),
        }
    }

    fn average(a: &NodeExpr, b: &NodeExpr) -> Self {
        let mut terms: Vec<(usize, f64)> = a.terms.iter().map(|&(c, v)| (c, 0.5 * v)).collect();
        for &(c, v) in &b.terms {
            match terms.iter_mut().find(|(k, _)| *k == c) {
                Some(t) => t.1 += 0.5 * v,
                None => terms.push((c, 0.5 * v)),
            }
        }
        NodeExpr { constant: 0.5 * (a.constant + b.constant), terms }
    }

    pub fn eval(&self, free: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(c, v)| v * free[c]).sum::<f64>()
    }
}

/// Bijection between free unknowns and grid nodes, plus the affine
/// expressions of every eliminated node.
#[derive(Debug, Clone)]
pub struct UnknownMap {
    grid: Grid2D,
    exprs: Vec<NodeExpr>,
    free_nodes: Vec<usize>,
}

impl UnknownMap {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn free_count(&self) -> usize {
        self.free_nodes.len()
    }

    /// Grid index of every free unknown, in column order.
    pub fn free_nodes(&self) -> &[usize] {
        &self.free_nodes
    }

    pub fn expr(&self, node: usize) -> &NodeExpr {
        &self.exprs[node]
    }

    /// Full field from the free unknowns.
    pub fn reconstruct(&self, free: &[f64]) -> Result<Field> {
        if free.len() != self.free_count() {
            return Err(Error::LengthMismatch { expected: self.free_count(), got: free.len() });
        }
        Field::new(self.grid, self.exprs.iter().map(|e| e.eval(free)).collect())
    }

    /// Values of `u` at the free nodes.
    pub fn restrict(&self, u: &Field) -> Vec<f64> {
        self.free_nodes.iter().map(|&k| u.values()[k]).collect()
    }
}

/// Elimination with zero Cauchy data: the space of increments.
pub fn eliminate_cauchy(grid: &Grid2D) -> Result<UnknownMap> {
    eliminate_cauchy_with(grid, &CauchyData::homogeneous())
}

/// Elimination with the given Dirichlet and Neumann data.
pub fn eliminate_cauchy_with(grid: &Grid2D, data: &CauchyData) -> Result<UnknownMap> {
    let (nx, ny) = (grid.nx(), grid.ny());
    if nx < 7 || ny < 7 {
        return Err(Error::InvalidGrid(format!(
            "Cauchy elimination needs at least 7 nodes per axis, got {nx}x{ny}"
        )));
    }
    let mut exprs: Vec<Option<NodeExpr>> = vec![None; grid.len()];
    let mut free_nodes = Vec::with_capacity((nx - 4) * (ny - 4));
    for j in 2..ny - 2 {
        for i in 2..nx - 2 {
            let k = grid.index(i, j);
            exprs[k] = Some(NodeExpr::free(free_nodes.len()));
            free_nodes.push(k);
        }
    }
    for (i, j) in grid.boundary_nodes() {
        exprs[grid.index(i, j)] = Some(NodeExpr::constant((data.dirichlet)(grid.point(i, j))));
    }

    // u₁ from the boundary node b, the second-ring expression u₂ and side
    let relation = |b: (usize, usize), u2: &NodeExpr, side: Side| {
        let h = match side {
            Side::Left | Side::Right => grid.dx(),
            Side::Bottom | Side::Top => grid.dy(),
        };
        let x = grid.point(b.0, b.1);
        let f = (data.dirichlet)(x);
        let g = (data.neumann)(x, side);
        u2.affine(0.25, 0.75 * f - 0.5 * h * g)
    };
    let get = |exprs: &[Option<NodeExpr>], i: usize, j: usize| {
        exprs[grid.index(i, j)].clone().expect("inner node assigned before ring")
    };

    for j in 2..ny - 2 {
        let left = relation((0, j), &get(&exprs, 2, j), Side::Left);
        let right = relation((nx - 1, j), &get(&exprs, nx - 3, j), Side::Right);
        exprs[grid.index(1, j)] = Some(left);
        exprs[grid.index(nx - 2, j)] = Some(right);
    }
    for i in 2..nx - 2 {
        let bottom = relation((i, 0), &get(&exprs, i, 2), Side::Bottom);
        let top = relation((i, ny - 1), &get(&exprs, i, ny - 3), Side::Top);
        exprs[grid.index(i, 1)] = Some(bottom);
        exprs[grid.index(i, ny - 2)] = Some(top);
    }
    // ring corners: (ring i, ring j, boundary i, boundary j, inner i, inner j)
    let corners = [
        (1, 1, 0, 0, 2, 2, Side::Left, Side::Bottom),
        (nx - 2, 1, nx - 1, 0, nx - 3, 2, Side::Right, Side::Bottom),
        (1, ny - 2, 0, ny - 1, 2, ny - 3, Side::Left, Side::Top),
        (nx - 2, ny - 2, nx - 1, ny - 1, nx - 3, ny - 3, Side::Right, Side::Top),
    ];
    for (ci, cj, bi, bj, ii, ij, xside, yside) in corners {
        let across_x = relation((bi, cj), &get(&exprs, ii, cj), xside);
        let across_y = relation((ci, bj), &get(&exprs, ci, ij), yside);
        exprs[grid.index(ci, cj)] = Some(NodeExpr::average(&across_x, &across_y));
    }

    let exprs = exprs
        .into_iter()
        .map(|e| e.expect("every node classified"))
        .collect();
    Ok(UnknownMap { grid: *grid, exprs, free_nodes })
}
