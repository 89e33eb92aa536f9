//! Carleman-weighted quasi-reversibility solver for quasilinear elliptic
//! equations with over-determined (Cauchy) boundary data.
//!
//! Given `-div(A ∇u) + F(x, u, ∇u) = 0` on a rectangle together with both
//! `u = f` and `∂_ν u = g` on the boundary, the solver
//!
//! 1. picks an initial guess `u₀` that matches the Cauchy data by minimizing
//!    a weighted, regularized least-squares functional of `div(A ∇u₀)`,
//! 2. repeatedly linearizes the equation around the current iterate and
//!    computes the correction `h` (with zero Cauchy data) as the minimizer of
//!    a Carleman-weighted quasi-reversibility functional,
//! 3. stops once `‖u_{n+1} - u_n‖_{L²}` falls below a threshold.
//!
//! First-order Hamilton-Jacobi equations are handled through the vanishing
//! viscosity wrapper [`problem::make_viscous`].
//!
//! The crate is organized bottom-up:
//!
//! * [`grid`]: uniform grids, fields, finite-difference stencils and norms.
//! * [`carleman`]: the weight `μ_β(x) = |x - x₀|^{-β}` and `e^{mλμ_β}`.
//! * [`problem`]: problem definitions and the benchmark catalog.
//! * [`qr_solver`]: least-squares assembly and sparse solves.
//! * [`iteration`]: the outer linearization loop and its diagnostics.
//! * [`benchmark`]: reproduction runs with error metrics and artifacts.
//! * [`io`]: CSV, JSON and MatrixMarket serialization.

pub mod benchmark;
pub mod carleman;
mod error;
pub mod grid;
pub mod io;
pub mod iteration;
pub mod problem;
pub mod qr_solver;

pub use benchmark::{run_all, run_benchmark, run_spec, BenchConfig, BenchReport, Summary};
pub use carleman::{carleman_factor, weight_mu, CarlemanParams, FactorPower};
pub use error::{Error, Result};
pub use grid::{Field, Grid2D, NodeKind, Point, Rect, Side, Vec2, VectorField};
pub use iteration::{fit_theta, IterationParams, IterationRecord, IterationReport};
pub use problem::{catalog, BenchmarkId, Diffusion, Mat2, ProblemSpec};
pub use qr_solver::{LinearMethod, SolverParams, WeightedLeastSquares};
