//! Conjugate gradients on the normal equations, in the CGLS arrangement
//! (residual `r = b - Ax` is updated instead of forming `AᵀA`).

use super::sparse::CsrMatrix;

pub struct CglsOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖Aᵀ W (b - A x)‖ / ‖Aᵀ W b‖` at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Minimizes `‖W (A x - b)‖²` with `W = diag(w)`.
pub fn cgls(a: &CsrMatrix, w: &[f64], b: &[f64], tol: f64, max_iter: usize) -> CglsOutcome {
    let (m, n) = (a.nrows(), a.ncols());
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = b.iter().zip(w).map(|(bi, wi)| bi * wi).collect();
    let mut s = vec![0.0; n];
    a.weighted_tmul(w, &r, &mut s);
    let norm0 = dot(&s, &s).sqrt();
    if norm0 == 0.0 {
        return CglsOutcome { x, iterations: 0, relative_residual: 0.0, converged: true };
    }
    let mut p = s.clone();
    let mut gamma = dot(&s, &s);
    let mut q = vec![0.0; m];
    for it in 1..=max_iter {
        a.weighted_mul(w, &p, &mut q);
        let qq = dot(&q, &q);
        if qq == 0.0 {
            break;
        }
        let alpha = gamma / qq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        a.weighted_tmul(w, &r, &mut s);
        let gamma_new = dot(&s, &s);
        let rel = gamma_new.sqrt() / norm0;
        if rel <= tol {
            return CglsOutcome { x, iterations: it, relative_residual: rel, converged: true };
        }
        let beta = gamma_new / gamma;
        gamma = gamma_new;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + beta * *pi;
        }
    }
    CglsOutcome { x, iterations: max_iter, relative_residual: gamma.sqrt() / norm0, converged: false }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
