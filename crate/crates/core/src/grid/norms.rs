//! Discrete norms. All integrals use the node-sum quadrature
//! `Σ (·) dx dy` over every node of the grid unless noted.

use super::stencil::{apply, second_derivative_stencils};
use super::{gradient, Field};
use crate::carleman::{carleman_factor, CarlemanParams, FactorPower};
use crate::Result;

pub fn norm_l2(u: &Field) -> f64 {
    let s: f64 = u.values().iter().map(|v| v * v).sum();
    (s * u.grid().cell_area()).sqrt()
}

/// `[∫ e^{2λμ_β}(u² + |∇u|²)]^{1/2}`.
pub fn norm_weighted(u: &Field, cp: &CarlemanParams) -> Result<f64> {
    let grid = *u.grid();
    let du = gradient(u);
    let mut s = 0.0;
    for (k, (&v, g)) in u.values().iter().zip(du.values()).enumerate() {
        let w = carleman_factor(grid.point_at(k), cp, FactorPower::Double)?;
        s += w * (v * v + g[0] * g[0] + g[1] * g[1]);
    }
    Ok((s * grid.cell_area()).sqrt())
}

/// Discrete H² norm: value and gradient at every node, `u_xx`, `u_yy`,
/// `u_xy` at interior nodes.
pub fn norm_h2_discrete(u: &Field) -> f64 {
    let grid = *u.grid();
    let du = gradient(u);
    let mut s: f64 = u
        .values()
        .iter()
        .zip(du.values())
        .map(|(v, g)| v * v + g[0] * g[0] + g[1] * g[1])
        .sum();
    for (i, j) in grid.interior_nodes() {
        for st in second_derivative_stencils(&grid, i, j) {
            let d = apply(&st, u.values());
            s += d * d;
        }
    }
    (s * grid.cell_area()).sqrt()
}
