//! Problem definitions: the diffusion matrix `A`, the nonlinearity
//! `F(x, s, p)` with its partial derivatives, Cauchy data, and an optional
//! analytic solution.

mod catalog;
pub mod smooth;

pub use catalog::{catalog, catalog_with_epsilon, hamiltonian, BenchmarkId, DEFAULT_EPSILON};

use std::fmt;
use std::sync::Arc;

use crate::grid::{Grid2D, Point, Side, Vec2};
use crate::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];
pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> Vec2 + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(Point) -> Mat2 + Send + Sync>;
pub type NeumannFn = Arc<dyn Fn(Point, Side) -> f64 + Send + Sync>;
/// A function of `(x, s, p)`.
pub type ScalarMap = Arc<dyn Fn(Point, f64, Vec2) -> f64 + Send + Sync>;
pub type VectorMap = Arc<dyn Fn(Point, f64, Vec2) -> Vec2 + Send + Sync>;

/// Symmetric positive definite diffusion matrix field.
#[derive(Clone)]
pub enum Diffusion {
    Constant(Mat2),
    Variable(MatrixFn),
}

impl Diffusion {
    pub fn scaled_identity(eps: f64) -> Self {
        Diffusion::Constant([[eps, 0.0], [0.0, eps]])
    }

    pub fn at(&self, x: Point) -> Mat2 {
        match self {
            Diffusion::Constant(m) => *m,
            Diffusion::Variable(f) => f(x),
        }
    }

    /// Verifies symmetry and positive definiteness at every node.
    pub fn check(&self, grid: &Grid2D) -> Result<()> {
        match self {
            Diffusion::Constant(m) => check_spd(*m, [grid.x(0), grid.y(0)]),
            Diffusion::Variable(f) => grid
                .nodes()
                .try_for_each(|(i, j)| check_spd(f(grid.point(i, j)), grid.point(i, j))),
        }
    }
}

impl fmt::Debug for Diffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diffusion::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            Diffusion::Variable(_) => f.write_str("Variable(..)"),
        }
    }
}

fn check_spd(m: Mat2, x: Point) -> Result<()> {
    let finite = m.iter().flatten().all(|v| v.is_finite());
    let symmetric = (m[0][1] - m[1][0]).abs() <= 1e-12 * (m[0][1].abs() + m[1][0].abs() + 1.0);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if finite && symmetric && m[0][0] > 0.0 && det > 0.0 {
        Ok(())
    } else {
        Err(Error::Coefficient { x: x[0], y: x[1], matrix: m })
    }
}

/// `F(x, s, p)` with `F_s` and `∇_p F`.
#[derive(Clone)]
pub struct Nonlinearity {
    pub value: ScalarMap,
    pub d_s: ScalarMap,
    pub d_p: VectorMap,
}

impl Nonlinearity {
    pub fn new(value: ScalarMap, d_s: ScalarMap, d_p: VectorMap) -> Self {
        Nonlinearity { value, d_s, d_p }
    }

    pub fn zero() -> Self {
        Nonlinearity::new(
            Arc::new(|_, _, _| 0.0),
            Arc::new(|_, _, _| 0.0),
            Arc::new(|_, _, _| [0.0, 0.0]),
        )
    }

    /// `c·F` with derivatives scaled to match.
    pub fn scaled(&self, c: f64) -> Self {
        let (v, ds, dp) = (self.value.clone(), self.d_s.clone(), self.d_p.clone());
        Nonlinearity::new(
            Arc::new(move |x, s, p| c * v(x, s, p)),
            Arc::new(move |x, s, p| c * ds(x, s, p)),
            Arc::new(move |x, s, p| {
                let g = dp(x, s, p);
                [c * g[0], c * g[1]]
            }),
        )
    }

    /// Derivatives by central differences with step `10⁻⁶·max(1, |·|)`
    /// per argument.
    pub fn from_value(value: ScalarMap) -> Self {
        const REL: f64 = 1e-6;
        let fs = value.clone();
        let d_s: ScalarMap = Arc::new(move |x, s, p| {
            let h = REL * s.abs().max(1.0);
            (fs(x, s + h, p) - fs(x, s - h, p)) / (2.0 * h)
        });
        let fp = value.clone();
        let d_p: VectorMap = Arc::new(move |x, s, p| {
            let mut out = [0.0; 2];
            for (k, o) in out.iter_mut().enumerate() {
                let h = REL * p[k].abs().max(1.0);
                let (mut hi, mut lo) = (p, p);
                hi[k] += h;
                lo[k] -= h;
                *o = (fp(x, s, hi) - fp(x, s, lo)) / (2.0 * h);
            }
            out
        });
        Nonlinearity { value, d_s, d_p }
    }
}

/// Analytic solution with first and second derivatives (the Hessian is
/// the classical one away from kinks).
#[derive(Clone)]
pub struct ExactSolution {
    pub value: ScalarFn,
    pub gradient: VectorFn,
    pub hessian: MatrixFn,
}

/// Dirichlet data `f` and the outward normal derivative `g`, the latter
/// already dotted with the normal of the given side.
#[derive(Clone)]
pub struct CauchyData {
    pub dirichlet: ScalarFn,
    pub neumann: NeumannFn,
}

impl CauchyData {
    pub fn homogeneous() -> Self {
        CauchyData { dirichlet: Arc::new(|_| 0.0), neumann: Arc::new(|_, _| 0.0) }
    }

    /// Traces of an analytic solution: `f = u*`, `g = ∇u*·ν`.
    pub fn from_exact(exact: &ExactSolution) -> Self {
        let grad = exact.gradient.clone();
        CauchyData {
            dirichlet: exact.value.clone(),
            neumann: Arc::new(move |x, side| {
                let g = grad(x);
                let n = side.normal();
                g[0] * n[0] + g[1] * n[1]
            }),
        }
    }
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub label: String,
    pub diffusion: Diffusion,
    pub nonlinearity: Nonlinearity,
    pub data: CauchyData,
    pub exact: Option<ExactSolution>,
    /// Distance to the nearest curve where the exact solution has a kink.
    pub kink_distance: Option<ScalarFn>,
    /// Caps `|s|` and `|p|` before `F` is evaluated.
    pub clamp: Option<f64>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("label", &self.label)
            .field("diffusion", &self.diffusion)
            .field("exact", &self.exact.is_some())
            .field("clamp", &self.clamp)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(
        label: impl Into<String>,
        diffusion: Diffusion,
        nonlinearity: Nonlinearity,
        data: CauchyData,
    ) -> Self {
        ProblemSpec {
            label: label.into(),
            diffusion,
            nonlinearity,
            data,
            exact: None,
            kink_distance: None,
            clamp: None,
        }
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn with_kinks(mut self, distance: ScalarFn) -> Self {
        self.kink_distance = Some(distance);
        self
    }

    pub fn with_clamp(mut self, bound: Option<f64>) -> Self {
        self.clamp = bound;
        self
    }

    /// Replaces the analytic derivatives of `F` by finite differences.
    pub fn with_fd_derivatives(mut self) -> Self {
        self.nonlinearity = Nonlinearity::from_value(self.nonlinearity.value.clone());
        self
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        self.diffusion.check(grid)?;
        if let Some(m) = self.clamp {
            if !(m > 0.0) {
                return Err(Error::Parameter(format!("clamp bound must be positive, got {m}")));
            }
        }
        Ok(())
    }

    pub fn true_solution(&self) -> Option<&ScalarFn> {
        self.exact.as_ref().map(|e| &e.value)
    }

    pub fn kink_distance(&self, x: Point) -> f64 {
        self.kink_distance.as_ref().map_or(f64::INFINITY, |d| d(x))
    }

    fn clamped(&self, s: f64, p: Vec2) -> (f64, Vec2, bool, bool) {
        match self.clamp {
            None => (s, p, true, true),
            Some(m) => {
                let sc = s.clamp(-m, m);
                let np = p[0].hypot(p[1]);
                let pc = if np > m { [p[0] * m / np, p[1] * m / np] } else { p };
                (sc, pc, s.abs() <= m, np <= m)
            }
        }
    }

    pub fn eval_f(&self, x: Point, s: f64, p: Vec2) -> Result<f64> {
        let (s, p, _, _) = self.clamped(s, p);
        finite((self.nonlinearity.value)(x, s, p), "F", x)
    }

    /// `(F_s, ∇_p F)` at `(x, s, p)`.
    pub fn eval_partials(&self, x: Point, s: f64, p: Vec2) -> Result<(f64, Vec2)> {
        let (sc, pc, s_free, p_free) = self.clamped(s, p);
        let ds = if s_free { (self.nonlinearity.d_s)(x, sc, pc) } else { 0.0 };
        let dp = if p_free { (self.nonlinearity.d_p)(x, sc, pc) } else { [0.0, 0.0] };
        finite(ds, "F_s", x)?;
        finite(dp[0], "dF/dp1", x)?;
        finite(dp[1], "dF/dp2", x)?;
        Ok((ds, dp))
    }

    /// `F_s(x,s,p)·h + ∇_pF(x,s,p)·∇h`.
    pub fn eval_df(&self, x: Point, s: f64, p: Vec2, h_val: f64, h_grad: Vec2) -> Result<f64> {
        let (ds, dp) = self.eval_partials(x, s, p)?;
        Ok(ds * h_val + dp[0] * h_grad[0] + dp[1] * h_grad[1])
    }

    /// `-div(A∇u*) + F(x, u*, ∇u*)` from the analytic derivatives, for a
    /// constant diffusion matrix. `None` without an exact solution or with
    /// variable `A`.
    pub fn manufactured_residual(&self, x: Point) -> Option<f64> {
        let exact = self.exact.as_ref()?;
        let a = match &self.diffusion {
            Diffusion::Constant(m) => *m,
            Diffusion::Variable(_) => return None,
        };
        let h = (exact.hessian)(x);
        let div = a[0][0] * h[0][0] + 2.0 * a[0][1] * h[0][1] + a[1][1] * h[1][1];
        let f = (self.nonlinearity.value)(x, (exact.value)(x), (exact.gradient)(x));
        Some(-div + f)
    }
}

fn finite(v: f64, what: &'static str, x: Point) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { what, x: x[0], y: x[1] })
    }
}

/// Wraps a first-order Hamiltonian as `-εΔu + F(x, u, ∇u) = 0`.
pub fn make_viscous(
    label: impl Into<String>,
    hamiltonian: Nonlinearity,
    data: CauchyData,
    epsilon: f64,
) -> Result<ProblemSpec> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Parameter(format!("viscosity must be positive, got {epsilon}")));
    }
    Ok(ProblemSpec::new(label, Diffusion::scaled_identity(epsilon), hamiltonian, data))
}
