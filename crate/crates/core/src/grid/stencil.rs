//! Second-order finite-difference stencils.
//!
//! Every operator is expressed as a list of `(node index, coefficient)`
//! pairs so that the same stencil drives both operator application on a
//! [`Field`] and least-squares row assembly.

use super::{Field, Grid2D, NodeKind, Side, VectorField};
use crate::problem::Diffusion;
use crate::Result;

pub type Stencil = Vec<(usize, f64)>;

#[inline]
pub(crate) fn apply(stencil: &[(usize, f64)], values: &[f64]) -> f64 {
    stencil.iter().map(|&(k, c)| c * values[k]).sum()
}

/// Stencil of `div(A ∇u)` at the interior node `(i, j)`.
///
/// Constant `A` gives `a₁₁u_xx + 2a₁₂u_xy + a₂₂u_yy` with the 5-point
/// second differences and the 4-corner cross difference. Variable `A` uses
/// the flux form with coefficients averaged to the half-nodes.
pub fn div_a_grad_stencil(grid: &Grid2D, i: usize, j: usize, a: &Diffusion) -> Stencil {
    debug_assert!(grid.is_interior(i, j));
    let (dx, dy) = (grid.dx(), grid.dy());
    let at = |di: isize, dj: isize| {
        grid.index((i as isize + di) as usize, (j as isize + dj) as usize)
    };
    let mut st = Stencil::with_capacity(9);
    match a {
        Diffusion::Constant(m) => {
            let cx = m[0][0] / (dx * dx);
            let cy = m[1][1] / (dy * dy);
            st.extend([
                (at(0, 0), -2.0 * cx - 2.0 * cy),
                (at(1, 0), cx),
                (at(-1, 0), cx),
                (at(0, 1), cy),
                (at(0, -1), cy),
            ]);
            if m[0][1] != 0.0 {
                let cxy = 2.0 * m[0][1] / (4.0 * dx * dy);
                st.extend([
                    (at(1, 1), cxy),
                    (at(-1, -1), cxy),
                    (at(-1, 1), -cxy),
                    (at(1, -1), -cxy),
                ]);
            }
        }
        Diffusion::Variable(f) => {
            let node = |di: isize, dj: isize| {
                f(grid.point((i as isize + di) as usize, (j as isize + dj) as usize))
            };
            let (c, e, w, n, s) = (node(0, 0), node(1, 0), node(-1, 0), node(0, 1), node(0, -1));
            let ae = 0.5 * (c[0][0] + e[0][0]) / (dx * dx);
            let aw = 0.5 * (c[0][0] + w[0][0]) / (dx * dx);
            let an = 0.5 * (c[1][1] + n[1][1]) / (dy * dy);
            let as_ = 0.5 * (c[1][1] + s[1][1]) / (dy * dy);
            st.extend([
                (at(0, 0), -(ae + aw + an + as_)),
                (at(1, 0), ae),
                (at(-1, 0), aw),
                (at(0, 1), an),
                (at(0, -1), as_),
            ]);
            // d/dx(a12 d/dy u) + d/dy(a21 d/dx u), central in both directions
            let q = 1.0 / (4.0 * dx * dy);
            let (be, bw, bn, bs) = (e[0][1] * q, w[0][1] * q, n[1][0] * q, s[1][0] * q);
            if [be, bw, bn, bs].iter().any(|&v| v != 0.0) {
                st.extend([
                    (at(1, 1), be + bn),
                    (at(1, -1), -be - bs),
                    (at(-1, 1), -bw - bn),
                    (at(-1, -1), bw + bs),
                ]);
            }
        }
    }
    st
}

/// Stencils of `(∂x u, ∂y u)` at any node: central differences inside,
/// 3-point one-sided differences on the boundary.
pub fn gradient_stencil(grid: &Grid2D, i: usize, j: usize) -> (Stencil, Stencil) {
    let sx = axis_derivative(grid.nx(), i, grid.dx(), |k| grid.index(k, j));
    let sy = axis_derivative(grid.ny(), j, grid.dy(), |k| grid.index(i, k));
    (sx, sy)
}

fn axis_derivative(n: usize, k: usize, h: f64, idx: impl Fn(usize) -> usize) -> Stencil {
    let c = 1.0 / (2.0 * h);
    if k == 0 {
        vec![(idx(0), -3.0 * c), (idx(1), 4.0 * c), (idx(2), -c)]
    } else if k == n - 1 {
        vec![(idx(n - 1), 3.0 * c), (idx(n - 2), -4.0 * c), (idx(n - 3), c)]
    } else {
        vec![(idx(k + 1), c), (idx(k - 1), -c)]
    }
}

/// `[u_xx, u_yy, u_xy]` stencils at an interior node.
pub fn second_derivative_stencils(grid: &Grid2D, i: usize, j: usize) -> [Stencil; 3] {
    debug_assert!(grid.is_interior(i, j));
    let (dx, dy) = (grid.dx(), grid.dy());
    let at = |di: isize, dj: isize| {
        grid.index((i as isize + di) as usize, (j as isize + dj) as usize)
    };
    let cx = 1.0 / (dx * dx);
    let cy = 1.0 / (dy * dy);
    let cxy = 1.0 / (4.0 * dx * dy);
    [
        vec![(at(-1, 0), cx), (at(0, 0), -2.0 * cx), (at(1, 0), cx)],
        vec![(at(0, -1), cy), (at(0, 0), -2.0 * cy), (at(0, 1), cy)],
        vec![(at(1, 1), cxy), (at(-1, -1), cxy), (at(-1, 1), -cxy), (at(1, -1), -cxy)],
    ]
}

/// `div(A ∇u)` at interior nodes, zero on the boundary.
pub fn div_a_grad(u: &Field, a: &Diffusion) -> Result<Field> {
    let grid = *u.grid();
    a.check(&grid)?;
    let mut out = vec![0.0; grid.len()];
    for (i, j) in grid.interior_nodes() {
        let st = div_a_grad_stencil(&grid, i, j, a);
        out[grid.index(i, j)] = apply(&st, u.values());
    }
    Field::new(grid, out)
}

pub fn gradient(u: &Field) -> VectorField {
    let grid = *u.grid();
    let values = grid
        .nodes()
        .map(|(i, j)| {
            let (sx, sy) = gradient_stencil(&grid, i, j);
            [apply(&sx, u.values()), apply(&sy, u.values())]
        })
        .collect();
    VectorField::new(grid, values).expect("finite field has finite differences")
}

/// Outward normal derivative at one boundary node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValue {
    pub index: usize,
    pub kind: NodeKind,
    pub value: f64,
}

/// One-sided stencil of the outward normal derivative across `side` at the
/// boundary node `(i, j)`: `(3u_b - 4u_1 + u_2) / (2δ)` along the inward
/// normal.
pub(crate) fn side_normal_stencil(grid: &Grid2D, i: usize, j: usize, side: Side) -> Stencil {
    let (h, inward): (f64, [isize; 2]) = match side {
        Side::Left => (grid.dx(), [1, 0]),
        Side::Right => (grid.dx(), [-1, 0]),
        Side::Bottom => (grid.dy(), [0, 1]),
        Side::Top => (grid.dy(), [0, -1]),
    };
    let step = |k: isize| {
        grid.index(
            (i as isize + k * inward[0]) as usize,
            (j as isize + k * inward[1]) as usize,
        )
    };
    let c = 1.0 / (2.0 * h);
    vec![(step(0), 3.0 * c), (step(1), -4.0 * c), (step(2), c)]
}

/// Outward normal derivative at every boundary node (row-major order).
/// Corners average the two adjacent side normals.
pub fn normal_derivative(u: &Field) -> Vec<BoundaryValue> {
    let grid = *u.grid();
    grid.boundary_nodes()
        .map(|(i, j)| {
            let kind = grid.classify(i, j);
            let value = match kind {
                NodeKind::Boundary(s) => apply(&side_normal_stencil(&grid, i, j, s), u.values()),
                NodeKind::Corner(a, b) => {
                    0.5 * (apply(&side_normal_stencil(&grid, i, j, a), u.values())
                        + apply(&side_normal_stencil(&grid, i, j, b), u.values()))
                }
                NodeKind::Interior => unreachable!("boundary iterator yielded interior node"),
            };
            BoundaryValue { index: grid.index(i, j), kind, value }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Mat2;
    use crate::{Error, Rect};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::sync::Arc;

    const A_PAPER: Mat2 = [[2.0, 1.0], [1.0, 2.0]];

    fn grid(n: usize) -> Grid2D {
        Grid2D::square(n, Rect::unit_square()).unwrap()
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = grid(6);
        let u = Field::constant(g, 3.5);
        for v in gradient(&u).values() {
            assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_exact_on_affine() {
        let g = Grid2D::new(7, 9, Rect::new(-1.0, 2.0, 0.0, 1.0)).unwrap();
        let u = Field::from_fn(g, |p| 2.0 * p[0] - 3.0 * p[1] + 0.25).unwrap();
        for v in gradient(&u).values() {
            assert_abs_diff_eq!(v[0], 2.0, epsilon = 1e-11);
            assert_abs_diff_eq!(v[1], -3.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn central_difference_exact_on_quadratic() {
        // delta = 0.5
        let g = grid(5);
        let u = Field::from_fn(g, |p| p[0] * p[0]).unwrap();
        let du = gradient(&u);
        for (i, j) in g.interior_nodes() {
            assert_abs_diff_eq!(du.at(i, j)[0], 2.0 * g.x(i), epsilon = 1e-12);
        }
        // one-sided 3-point stencils are exact on quadratics too
        assert_abs_diff_eq!(du.at(0, 2)[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(du.at(4, 2)[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn div_a_grad_of_quadratic() {
        let g = grid(9);
        let a = Diffusion::Constant(A_PAPER);
        let u = Field::from_fn(g, |p| -p[0] * p[0] + 2.0 * p[1] * p[1]).unwrap();
        let out = div_a_grad(&u, &a).unwrap();
        for (i, j) in g.nodes() {
            let expected = if g.is_interior(i, j) { 4.0 } else { 0.0 };
            assert_abs_diff_eq!(out.at(i, j), expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn div_a_grad_mixed_term() {
        let g = grid(8);
        let a = Diffusion::Constant(A_PAPER);
        let u = Field::from_fn(g, |p| p[0] * p[1]).unwrap();
        let out = div_a_grad(&u, &a).unwrap();
        for (i, j) in g.interior_nodes() {
            assert_abs_diff_eq!(out.at(i, j), 2.0, epsilon = 1e-10);
        }
        let c = div_a_grad(&Field::constant(g, -1.0), &a).unwrap();
        assert!(c.values().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn div_a_grad_rejects_indefinite() {
        let g = grid(5);
        let a = Diffusion::Constant([[1.0, 2.0], [2.0, 1.0]]);
        assert!(matches!(div_a_grad(&Field::zeros(g), &a), Err(Error::Coefficient { .. })));
    }

    #[test]
    fn variable_flux_form_matches_constant() {
        let g = grid(11);
        let u = Field::from_fn(g, |p| (p[0] * 1.3).sin() * (p[1] * 0.7).cos() + p[0] * p[1])
            .unwrap();
        let constant = div_a_grad(&u, &Diffusion::Constant(A_PAPER)).unwrap();
        let variable = div_a_grad(&u, &Diffusion::Variable(Arc::new(|_| A_PAPER))).unwrap();
        for (a, b) in constant.values().iter().zip(variable.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn variable_coefficient_second_order() {
        // d/dx((1+x²) u_x) + d/dy((2+y) u_y) with u = sin(x)cos(y)
        let a = Diffusion::Variable(Arc::new(|p: [f64; 2]| {
            [[1.0 + p[0] * p[0], 0.0], [0.0, 2.0 + p[1]]]
        }));
        let exact = |p: [f64; 2]| {
            let (x, y) = (p[0], p[1]);
            let ux = x.cos() * y.cos();
            let uxx = -x.sin() * y.cos();
            let uy = -x.sin() * y.sin();
            let uyy = -x.sin() * y.cos();
            2.0 * x * ux + (1.0 + x * x) * uxx + uy + (2.0 + y) * uyy
        };
        let err = |n: usize| {
            let g = grid(n);
            let u = Field::from_fn(g, |p| p[0].sin() * p[1].cos()).unwrap();
            let d = div_a_grad(&u, &a).unwrap();
            g.interior_nodes()
                .map(|(i, j)| (d.at(i, j) - exact(g.point(i, j))).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(21), err(41));
        assert!((e1 / e2).log2() > 1.8, "order {}", (e1 / e2).log2());
    }

    #[test]
    fn normal_derivative_of_x() {
        let g = grid(7);
        let u = Field::from_fn(g, |p| p[0]).unwrap();
        for bv in normal_derivative(&u) {
            match bv.kind {
                NodeKind::Boundary(Side::Right) => assert_abs_diff_eq!(bv.value, 1.0, epsilon = 1e-12),
                NodeKind::Boundary(Side::Left) => assert_abs_diff_eq!(bv.value, -1.0, epsilon = 1e-12),
                NodeKind::Boundary(_) => assert_abs_diff_eq!(bv.value, 0.0, epsilon = 1e-12),
                // average of the two side normals
                NodeKind::Corner(Side::Right, _) => assert_abs_diff_eq!(bv.value, 0.5, epsilon = 1e-12),
                NodeKind::Corner(_, _) => assert_abs_diff_eq!(bv.value, -0.5, epsilon = 1e-12),
                NodeKind::Interior => unreachable!(),
            }
        }
        let c = normal_derivative(&Field::constant(g, 2.0));
        assert_eq!(c.len(), 24);
        assert!(c.iter().all(|bv| bv.value.abs() < 1e-12));
    }

    #[test]
    fn interior_operator_matrix_is_symmetric() {
        let g = grid(9);
        let a = Diffusion::Constant(A_PAPER);
        let interior: Vec<usize> = g.interior_nodes().map(|(i, j)| g.index(i, j)).collect();
        let pos = |k: usize| interior.iter().position(|&m| m == k);
        let m = interior.len();
        let mut dense = vec![0.0; m * m];
        for (r, (i, j)) in g.interior_nodes().enumerate() {
            for (k, c) in div_a_grad_stencil(&g, i, j, &a) {
                if let Some(col) = pos(k) {
                    dense[r * m + col] += c;
                }
            }
        }
        for r in 0..m {
            for c in 0..m {
                assert_abs_diff_eq!(dense[r * m + c], dense[c * m + r], epsilon = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn div_a_grad_is_linear(
            seed_u in proptest::collection::vec(-1.0f64..1.0, 36),
            seed_v in proptest::collection::vec(-1.0f64..1.0, 36),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
        ) {
            let g = grid(6);
            let a = Diffusion::Constant(A_PAPER);
            let u = Field::new(g, seed_u).unwrap();
            let v = Field::new(g, seed_v).unwrap();
            let combo = &u.scaled(alpha) + &v.scaled(beta);
            let lhs = div_a_grad(&combo, &a).unwrap();
            let du = div_a_grad(&u, &a).unwrap();
            let dv = div_a_grad(&v, &a).unwrap();
            for k in 0..g.len() {
                let rhs = alpha * du.values()[k] + beta * dv.values()[k];
                prop_assert!((lhs.values()[k] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()) * 100.0);
            }
        }

        #[test]
        fn quadratics_are_exact(c in proptest::collection::vec(-2.0f64..2.0, 6)) {
            let g = grid(7);
            let a = Diffusion::Constant(A_PAPER);
            let u = Field::from_fn(g, |p| {
                c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * p[0] * p[0] + c[4] * p[0] * p[1] + c[5] * p[1] * p[1]
            }).unwrap();
            let exact = 2.0 * 2.0 * c[3] + 2.0 * 1.0 * c[4] + 2.0 * 2.0 * c[5];
            let d = div_a_grad(&u, &a).unwrap();
            for (i, j) in g.interior_nodes() {
                prop_assert!((d.at(i, j) - exact).abs() < 1e-9);
            }
        }
    }
}
