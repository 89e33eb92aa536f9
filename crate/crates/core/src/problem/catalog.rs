//! The eight benchmark problems on `(-1, 1)²`: two quasilinear equations
//! with `A = [[2, 1], [1, 2]]` and six Hamilton-Jacobi equations solved
//! through vanishing viscosity. Each comes with its manufactured solution;
//! Dirichlet and Neumann data are the exact traces.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::smooth::{d_abs, d_min, d_norm, norm, sign};
use super::{make_viscous, CauchyData, Diffusion, ExactSolution, Nonlinearity, ProblemSpec};
use crate::grid::Point;
use crate::{Error, Result};

/// Viscosity used for the Hamilton-Jacobi benchmarks.
pub const DEFAULT_EPSILON: f64 = 1e-3;

const A_QUASILINEAR: [[f64; 2]; 2] = [[2.0, 1.0], [1.0, 2.0]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkId {
    Ql1,
    Ql2,
    Hj1,
    Hj2,
    Hj3,
    Hj4,
    Hj5,
    Hj6,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 8] = [
        BenchmarkId::Ql1,
        BenchmarkId::Ql2,
        BenchmarkId::Hj1,
        BenchmarkId::Hj2,
        BenchmarkId::Hj3,
        BenchmarkId::Hj4,
        BenchmarkId::Hj5,
        BenchmarkId::Hj6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkId::Ql1 => "ql1",
            BenchmarkId::Ql2 => "ql2",
            BenchmarkId::Hj1 => "hj1",
            BenchmarkId::Hj2 => "hj2",
            BenchmarkId::Hj3 => "hj3",
            BenchmarkId::Hj4 => "hj4",
            BenchmarkId::Hj5 => "hj5",
            BenchmarkId::Hj6 => "hj6",
        }
    }

    pub fn is_hamilton_jacobi(self) -> bool {
        !matches!(self, BenchmarkId::Ql1 | BenchmarkId::Ql2)
    }

    pub fn description(self) -> &'static str {
        match self {
            BenchmarkId::Ql1 => "quasilinear, F = s + |p| - (...), u* = -x^2 + 2y^2",
            BenchmarkId::Ql2 => "quasilinear, F = |p| - (...), u* = sin(pi(x+y)/2) + e^x",
            BenchmarkId::Hj1 => "HJ, F = s + |p| + |x| - 1, u* = -|x|",
            BenchmarkId::Hj2 => "HJ eikonal, F = |p|^2 - (1 + (1 + sign(x+y))^2), u* = -|x+y| - y",
            BenchmarkId::Hj3 => "HJ nonconvex, F = 20s + |p1| - |p2| - (...), u* = -|x+0.5| + e^cos(2pi(x^2+y^2))",
            BenchmarkId::Hj4 => "HJ nonmonotone nonconvex, F = -40s + ||p| - 10| + (...), u* = |x+y-0.5| + sin(x^2/2 + y^2)",
            BenchmarkId::Hj5 => "HJ G-equation, F = 5s + |p| - x p1 + (...), u* = -|x-0.5| - |y|",
            BenchmarkId::Hj6 => "HJ, F = 20s + min(|p|, ||p| - 10| + 6) - (...), u* = -|x| + sin(pi(x^2+y^2))",
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// Catalog entry with the Hamilton-Jacobi tests at [`DEFAULT_EPSILON`].
pub fn catalog(id: BenchmarkId) -> ProblemSpec {
    catalog_with_epsilon(id, DEFAULT_EPSILON).expect("default viscosity is positive")
}

/// Catalog entry; `epsilon` only affects the Hamilton-Jacobi tests.
pub fn catalog_with_epsilon(id: BenchmarkId, epsilon: f64) -> Result<ProblemSpec> {
    let (nonlinearity, exact, kinks) = parts(id);
    let data = CauchyData::from_exact(&exact);
    let spec = if id.is_hamilton_jacobi() {
        make_viscous(id.as_str(), nonlinearity, data, epsilon)?
    } else {
        ProblemSpec::new(id.as_str(), Diffusion::Constant(A_QUASILINEAR), nonlinearity, data)
    };
    let spec = spec.with_exact(exact);
    Ok(match kinks {
        Some(k) => spec.with_kinks(k),
        None => spec,
    })
}

/// The first-order Hamiltonian of a Hamilton-Jacobi test, or the
/// nonlinearity of a quasilinear one, without any diffusion.
pub fn hamiltonian(id: BenchmarkId) -> Nonlinearity {
    parts(id).0
}

type Parts = (Nonlinearity, ExactSolution, Option<super::ScalarFn>);

fn exact(
    value: impl Fn(Point) -> f64 + Send + Sync + 'static,
    gradient: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static,
    hessian: impl Fn(Point) -> [[f64; 2]; 2] + Send + Sync + 'static,
) -> ExactSolution {
    ExactSolution {
        value: Arc::new(value),
        gradient: Arc::new(gradient),
        hessian: Arc::new(hessian),
    }
}

fn nonlinearity(
    value: impl Fn(Point, f64, [f64; 2]) -> f64 + Send + Sync + 'static,
    d_s: impl Fn(Point, f64, [f64; 2]) -> f64 + Send + Sync + 'static,
    d_p: impl Fn(Point, f64, [f64; 2]) -> [f64; 2] + Send + Sync + 'static,
) -> Nonlinearity {
    Nonlinearity::new(Arc::new(value), Arc::new(d_s), Arc::new(d_p))
}

fn parts(id: BenchmarkId) -> Parts {
    match id {
        BenchmarkId::Ql1 => ql1(),
        BenchmarkId::Ql2 => ql2(),
        BenchmarkId::Hj1 => hj1(),
        BenchmarkId::Hj2 => hj2(),
        BenchmarkId::Hj3 => hj3(),
        BenchmarkId::Hj4 => hj4(),
        BenchmarkId::Hj5 => hj5(),
        BenchmarkId::Hj6 => hj6(),
    }
}

fn ql1() -> Parts {
    let u = exact(
        |[x, y]| -x * x + 2.0 * y * y,
        |[x, y]| [-2.0 * x, 4.0 * y],
        |_| [[-2.0, 0.0], [0.0, 4.0]],
    );
    let f = nonlinearity(
        |[x, y], s, p| s + norm(p) - (-x * x + 2.0 * y * y + (4.0 * x * x + 16.0 * y * y).sqrt() - 4.0),
        |_, _, _| 1.0,
        |_, _, p| d_norm(p),
    );
    (f, u, None)
}

fn ql2() -> Parts {
    let u = exact(
        |[x, y]| (0.5 * PI * (x + y)).sin() + x.exp(),
        |[x, y]| {
            let c = 0.5 * PI * (0.5 * PI * (x + y)).cos();
            [c + x.exp(), c]
        },
        |[x, y]| {
            let s = -0.25 * PI * PI * (0.5 * PI * (x + y)).sin();
            [[s + x.exp(), s], [s, s]]
        },
    );
    let f = nonlinearity(
        |[x, y], _, p| {
            let c = (0.5 * PI * (x + y)).cos();
            let sn = (0.5 * PI * (x + y)).sin();
            let ex = x.exp();
            let grad_norm = ((0.5 * PI * c + ex).powi(2) + 0.25 * PI * PI * c * c).sqrt();
            norm(p) - (grad_norm + 1.5 * PI * PI * sn - 2.0 * ex)
        },
        |_, _, _| 0.0,
        |_, _, p| d_norm(p),
    );
    (f, u, None)
}

fn hj1() -> Parts {
    let u = exact(|[x, _]| -x.abs(), |[x, _]| [-sign(x), 0.0], |_| [[0.0; 2]; 2]);
    let f = nonlinearity(
        |[x, _], s, p| s + norm(p) + x.abs() - 1.0,
        |_, _, _| 1.0,
        |_, _, p| d_norm(p),
    );
    (f, u, Some(Arc::new(|[x, _]: Point| x.abs())))
}

fn hj2() -> Parts {
    let u = exact(
        |[x, y]| -(x + y).abs() - y,
        |[x, y]| {
            let s = sign(x + y);
            [-s, -s - 1.0]
        },
        |_| [[0.0; 2]; 2],
    );
    let f = nonlinearity(
        |[x, y], _, p| p[0] * p[0] + p[1] * p[1] - (1.0 + (1.0 + sign(x + y)).powi(2)),
        |_, _, _| 0.0,
        |_, _, p| [2.0 * p[0], 2.0 * p[1]],
    );
    (f, u, Some(Arc::new(|[x, y]: Point| (x + y).abs() / SQRT_2)))
}

/// `e^{cos(2π r²)}` with its gradient and Hessian.
fn hj3_bump([x, y]: Point) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let r2 = x * x + y * y;
    let (s, c) = (2.0 * PI * r2).sin_cos();
    let e = c.exp();
    let grad = [-4.0 * PI * x * s * e, -4.0 * PI * y * s * e];
    let k = 16.0 * PI * PI * (s * s - c) * e;
    let base = -4.0 * PI * s * e;
    let hess = [[base + k * x * x, k * x * y], [k * x * y, base + k * y * y]];
    (e, grad, hess)
}

fn hj3() -> Parts {
    let u = exact(
        |x| -(x[0] + 0.5).abs() + hj3_bump(x).0,
        |x| {
            let g = hj3_bump(x).1;
            [-sign(x[0] + 0.5) + g[0], g[1]]
        },
        |x| hj3_bump(x).2,
    );
    // the bracket is written exactly as the manufactured source term
    let f = nonlinearity(
        |x, s, p| {
            let (e, g, _) = hj3_bump(x);
            let ustar = -(x[0] + 0.5).abs() + e;
            20.0 * s + p[0].abs() - p[1].abs()
                - (20.0 * ustar + (sign(x[0] + 0.5) - g[0]).abs() - g[1].abs())
        },
        |_, _, _| 20.0,
        |_, _, p| [d_abs(p[0]), -d_abs(p[1])],
    );
    (f, u, Some(Arc::new(|[x, _]: Point| (x + 0.5).abs())))
}

fn hj4_grad([x, y]: Point) -> [f64; 2] {
    let s = sign(x + y - 0.5);
    let c = (0.5 * x * x + y * y).cos();
    [s + x * c, s + 2.0 * y * c]
}

fn hj4() -> Parts {
    let u = exact(
        |[x, y]| (x + y - 0.5).abs() + (0.5 * x * x + y * y).sin(),
        hj4_grad,
        |[x, y]| {
            let (sn, c) = (0.5 * x * x + y * y).sin_cos();
            [[c - x * x * sn, -2.0 * x * y * sn], [-2.0 * x * y * sn, 2.0 * c - 4.0 * y * y * sn]]
        },
    );
    let f = nonlinearity(
        |x, s, p| {
            let ustar = (x[0] + x[1] - 0.5).abs() + (0.5 * x[0] * x[0] + x[1] * x[1]).sin();
            -40.0 * s + (norm(p) - 10.0).abs() + 40.0 * ustar - (norm(hj4_grad(x)) - 10.0).abs()
        },
        |_, _, _| -40.0,
        |_, _, p| {
            let k = d_abs(norm(p) - 10.0);
            let g = d_norm(p);
            [k * g[0], k * g[1]]
        },
    );
    (f, u, Some(Arc::new(|[x, y]: Point| (x + y - 0.5).abs() / SQRT_2)))
}

fn hj5() -> Parts {
    let u = exact(
        |[x, y]| -(x - 0.5).abs() - y.abs(),
        |[x, y]| [-sign(x - 0.5), -sign(y)],
        |_| [[0.0; 2]; 2],
    );
    let f = nonlinearity(
        |[x, y], s, p| {
            5.0 * s + norm(p) - x * p[0]
                + (5.0 * ((x - 0.5).abs() + y.abs()) - x * sign(x - 0.5) - SQRT_2)
        },
        |_, _, _| 5.0,
        |[x, _], _, p| {
            let g = d_norm(p);
            [g[0] - x, g[1]]
        },
    );
    (f, u, Some(Arc::new(|[x, y]: Point| (x - 0.5).abs().min(y.abs()))))
}

fn hj6_grad([x, y]: Point) -> [f64; 2] {
    let c = (PI * (x * x + y * y)).cos();
    [-sign(x) + 2.0 * PI * x * c, 2.0 * PI * y * c]
}

fn hj6_min(a: f64) -> f64 {
    a.min((a - 10.0).abs() + 6.0)
}

fn hj6() -> Parts {
    let u = exact(
        |[x, y]| -x.abs() + (PI * (x * x + y * y)).sin(),
        hj6_grad,
        |[x, y]| {
            let (sn, c) = (PI * (x * x + y * y)).sin_cos();
            let k = -4.0 * PI * PI * sn;
            [[2.0 * PI * c + k * x * x, k * x * y], [k * x * y, 2.0 * PI * c + k * y * y]]
        },
    );
    let f = nonlinearity(
        |x, s, p| {
            let ustar = -x[0].abs() + (PI * (x[0] * x[0] + x[1] * x[1])).sin();
            20.0 * s + hj6_min(norm(p)) - (20.0 * ustar + hj6_min(norm(hj6_grad(x))))
        },
        |_, _, _| 20.0,
        |_, _, p| {
            let a = norm(p);
            let (wa, wb) = d_min(a, (a - 10.0).abs() + 6.0);
            let k = wa + wb * d_abs(a - 10.0);
            let g = d_norm(p);
            [k * g[0], k * g[1]]
        },
    );
    (f, u, Some(Arc::new(|[x, _]: Point| x.abs())))
}
