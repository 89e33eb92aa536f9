//! Uniform tensor grids on a rectangle, fields living on them, and the
//! finite-difference operators and discrete norms used by the solver.
//!
//! Nodes are stored row-major: node `(i, j)` (column `i` along x, row `j`
//! along y, both zero-based) has index `j * nx + i` and coordinates
//! `(x_min + i·dx, y_min + j·dy)`.

mod field;
mod norms;
mod stencil;

pub use field::{Field, VectorField};
pub use norms::{norm_h2_discrete, norm_l2, norm_weighted};
pub use stencil::{
    div_a_grad, div_a_grad_stencil, gradient, gradient_stencil, normal_derivative,
    second_derivative_stencils, BoundaryValue, Stencil,
};
pub(crate) use stencil::apply;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Point = [f64; 2];
pub type Vec2 = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect { x_min, x_max, y_min, y_max }
    }

    /// The square `(-1, 1)²`.
    pub const fn unit_square() -> Self {
        Rect::new(-1.0, 1.0, -1.0, 1.0)
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
}

impl Default for Rect {
    fn default() -> Self {
        Rect::unit_square()
    }
}

/// A side of the rectangle, identified by its outward normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn normal(self) -> Vec2 {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Boundary(Side),
    /// Corner node; the first side is the vertical one (left/right), the
    /// second the horizontal one (bottom/top).
    Corner(Side, Side),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    bounds: Rect,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, bounds: Rect) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per axis, got {nx}x{ny}"
            )));
        }
        let finite = [bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || bounds.x_max <= bounds.x_min || bounds.y_max <= bounds.y_min {
            return Err(Error::InvalidGrid(format!("degenerate bounds {bounds:?}")));
        }
        Ok(Grid2D { nx, ny, bounds })
    }

    /// `n × n` nodes on `bounds`.
    pub fn square(n: usize, bounds: Rect) -> Result<Self> {
        Grid2D::new(n, n, bounds)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    pub fn dx(&self) -> f64 {
        (self.bounds.x_max - self.bounds.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.bounds.y_max - self.bounds.y_min) / (self.ny - 1) as f64
    }

    /// Grid spacing along x; equal to `dy` on square grids.
    pub fn delta(&self) -> f64 {
        self.dx()
    }

    /// Area element of the node-sum quadrature.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interior_count(&self) -> usize {
        (self.nx - 2) * (self.ny - 2)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.nx, index / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.bounds.x_min + i as f64 * self.dx()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.bounds.y_min + j as f64 * self.dy()
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point {
        [self.x(i), self.y(j)]
    }

    pub fn point_at(&self, index: usize) -> Point {
        let (i, j) = self.coords(index);
        self.point(i, j)
    }

    pub fn classify(&self, i: usize, j: usize) -> NodeKind {
        let xs = if i == 0 {
            Some(Side::Left)
        } else if i == self.nx - 1 {
            Some(Side::Right)
        } else {
            None
        };
        let ys = if j == 0 {
            Some(Side::Bottom)
        } else if j == self.ny - 1 {
            Some(Side::Top)
        } else {
            None
        };
        match (xs, ys) {
            (None, None) => NodeKind::Interior,
            (Some(s), None) | (None, Some(s)) => NodeKind::Boundary(s),
            (Some(a), Some(b)) => NodeKind::Corner(a, b),
        }
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < self.nx && j + 1 < self.ny
    }

    /// Iterator over `(i, j)` of interior nodes in row-major order.
    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.ny - 1).flat_map(move |j| (1..self.nx - 1).map(move |i| (i, j)))
    }

    /// Iterator over `(i, j)` of every node in row-major order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (i, j)))
    }

    /// Node indices on the boundary (corners included), row-major.
    pub fn boundary_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes().filter(move |&(i, j)| !self.is_interior(i, j))
    }

    /// Nearest column index to `x`, clamped to the grid.
    pub fn nearest_i(&self, x: f64) -> usize {
        let t = ((x - self.bounds.x_min) / self.dx()).round();
        t.clamp(0.0, (self.nx - 1) as f64) as usize
    }

    /// Nearest row index to `y`, clamped to the grid.
    pub fn nearest_j(&self, y: f64) -> usize {
        let t = ((y - self.bounds.y_min) / self.dy()).round();
        t.clamp(0.0, (self.ny - 1) as f64) as usize
    }
}
