use std::ops::{Add, Sub};

use super::{Grid2D, Point, Vec2};
use crate::{Error, Result};

/// A real scalar per grid node, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid2D,
    values: Vec<f64>,
}

impl Field {
    /// Wraps `values`; fails on length mismatch or non-finite entries.
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "field", index });
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Field { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Field { grid, values: vec![c; grid.len()] }
    }

    /// Samples `f` at every node. Non-finite samples are rejected.
    pub fn from_fn(grid: Grid2D, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values = grid.nodes().map(|(i, j)| f(grid.point(i, j))).collect();
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, s: f64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }

    fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Field { grid: self.grid, values }
    }
}

impl Add for &Field {
    type Output = Field;

    fn add(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;

    fn sub(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Two components (x, y) per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid2D,
    values: Vec<Vec2>,
}

impl VectorField {
    pub fn new(grid: Grid2D, values: Vec<Vec2>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(Error::NonFinite { what: "vector field", index });
        }
        Ok(VectorField { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Vec2] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Vec2 {
        self.values[self.grid.index(i, j)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rect;

    #[test]
    fn rejects_nan_and_wrong_length() {
        let g = Grid2D::square(3, Rect::unit_square()).unwrap();
        let mut v = vec![0.0; 9];
        v[4] = f64::NAN;
        assert!(matches!(Field::new(g, v), Err(Error::NonFinite { index: 4, .. })));
        assert!(matches!(Field::new(g, vec![0.0; 8]), Err(Error::LengthMismatch { .. })));
        assert!(VectorField::new(g, vec![[0.0, f64::INFINITY]; 9]).is_err());
    }

    #[test]
    fn arithmetic() {
        let g = Grid2D::square(4, Rect::unit_square()).unwrap();
        let a = Field::new(g, (0..16).map(|k| k as f64).collect()).unwrap();
        let b = Field::constant(g, 0.5);
        let s = &a + &b;
        let d = &s - &b;
        assert_eq!(d, a);
        assert_eq!(a.scaled(2.0).at(3, 0), 6.0);
    }
}
