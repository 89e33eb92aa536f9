//! User problems: a catalog entry with a replaced diffusion matrix, a
//! rescaled nonlinearity or a different viscosity. The Cauchy data always
//! come from the base entry.
//!
//! ```json
//! { "base": "hj4", "label": "hj4-soft", "epsilon": 0.002, "scale": 1.0,
//!   "a": [[1.0, 0.0], [0.0, 1.0]], "clamp": 50.0, "fd_derivatives": false }
//! ```

use std::fs;
use std::path::Path;

use carleman_core::problem::{catalog_with_epsilon, Diffusion};
use carleman_core::{BenchmarkId, Error, Mat2, ProblemSpec};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub base: String,
    pub label: Option<String>,
    /// Constant diffusion matrix replacing the base one.
    pub a: Option<Mat2>,
    /// Viscosity of a Hamilton-Jacobi base.
    pub epsilon: Option<f64>,
    /// Multiplies `F`.
    pub scale: Option<f64>,
    pub clamp: Option<f64>,
    #[serde(default)]
    pub fd_derivatives: bool,
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), line, message: message.into() }
}

/// Line of `"key"` in `text`, for messages about a field value.
fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map_or(0, |k| k + 1)
}

/// Reads and builds a problem; `default_epsilon` applies to HJ bases
/// without an `epsilon` entry.
pub fn load_problem(path: &Path, default_epsilon: f64) -> Result<ProblemSpec, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let file: ProblemFile =
        serde_json::from_str(&text).map_err(|e| parse_error(path, e.line(), e.to_string()))?;
    let id: BenchmarkId = file
        .base
        .parse()
        .map_err(|e: Error| parse_error(path, line_of(&text, "base"), e.to_string()))?;
    let epsilon = file.epsilon.unwrap_or(default_epsilon);
    if file.epsilon.is_some() && !id.is_hamilton_jacobi() {
        return Err(parse_error(path, line_of(&text, "epsilon"), "epsilon only applies to hj bases"));
    }
    let mut spec = catalog_with_epsilon(id, epsilon)
        .map_err(|e| parse_error(path, line_of(&text, "epsilon"), e.to_string()))?;
    let mut modified = false;
    if let Some(a) = file.a {
        spec.diffusion = Diffusion::Constant(a);
        modified = true;
    }
    if let Some(c) = file.scale {
        if !c.is_finite() {
            return Err(parse_error(path, line_of(&text, "scale"), "scale must be finite"));
        }
        if c != 1.0 {
            spec.nonlinearity = spec.nonlinearity.scaled(c);
            modified = true;
        }
    }
    if let Some(m) = file.clamp {
        if !(m > 0.0) {
            return Err(parse_error(path, line_of(&text, "clamp"), "clamp must be positive"));
        }
        spec = spec.with_clamp(Some(m));
    }
    if file.fd_derivatives {
        spec = spec.with_fd_derivatives();
    }
    if modified {
        // the base solution no longer solves the modified equation
        spec.exact = None;
    }
    spec.label = file.label.unwrap_or_else(|| id.as_str().to_string());
    Ok(spec)
}
