//! The Carleman weight `μ_β(x) = |x - x₀|^{-β}` and the factor
//! `e^{mλμ_β(x)}` that multiplies the residual in every least-squares
//! functional.

use serde::{Deserialize, Serialize};

use crate::grid::{Grid2D, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlemanParams {
    /// Pole of the weight; must sit farther than 1 from every node.
    pub x0: Point,
    pub beta: f64,
    pub lambda: f64,
}

impl Default for CarlemanParams {
    fn default() -> Self {
        CarlemanParams { x0: [-4.0, 0.0], beta: 10.0, lambda: 4.0 }
    }
}

impl CarlemanParams {
    /// Checks the exponents and that `|x - x₀| > 1` at every node of `grid`.
    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Parameter(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Parameter(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        // the distance is minimized at a node on the boundary
        for (i, j) in grid.boundary_nodes() {
            weight_mu(grid.point(i, j), self)?;
        }
        Ok(())
    }
}

/// Exponent multiplier `m` in `e^{mλμ_β}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorPower {
    /// `e^{λμ_β}`, as written for the initial-guess functional.
    Single,
    /// `e^{2λμ_β}`, used by the linearized functional and the weighted norm.
    Double,
}

impl FactorPower {
    fn multiplier(self) -> f64 {
        match self {
            FactorPower::Single => 1.0,
            FactorPower::Double => 2.0,
        }
    }
}

pub fn weight_mu(x: Point, cp: &CarlemanParams) -> Result<f64> {
    let r = (x[0] - cp.x0[0]).hypot(x[1] - cp.x0[1]);
    if !(r > 1.0) {
        return Err(Error::WeightDomain { x: x[0], y: x[1], distance: r });
    }
    Ok(r.powf(-cp.beta))
}

pub fn carleman_factor(x: Point, cp: &CarlemanParams, power: FactorPower) -> Result<f64> {
    let mu = weight_mu(x, cp)?;
    Ok((power.multiplier() * cp.lambda * mu).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rect;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn default_parameters() {
        let cp = CarlemanParams::default();
        assert_eq!(cp.x0, [-4.0, 0.0]);
        assert_eq!(cp.beta, 10.0);
        assert_eq!(cp.lambda, 4.0);
    }

    #[test]
    fn mu_values() {
        let cp = CarlemanParams::default();
        assert_relative_eq!(weight_mu([0.0, 0.0], &cp).unwrap(), 9.5367431640625e-7, max_relative = 1e-14);
        assert_relative_eq!(weight_mu([1.0, 0.0], &cp).unwrap(), 1.024e-7, max_relative = 1e-14);
        let flat = CarlemanParams { beta: 0.0, ..cp };
        assert_eq!(weight_mu([0.3, -0.2], &flat).unwrap(), 1.0);
    }

    #[test]
    fn mu_domain_error() {
        let cp = CarlemanParams { x0: [-1.5, 0.0], ..Default::default() };
        assert!(matches!(weight_mu([-1.0, 0.0], &cp), Err(Error::WeightDomain { .. })));
        let g = Grid2D::square(5, Rect::unit_square()).unwrap();
        assert!(cp.validate(&g).is_err());
        assert!(CarlemanParams::default().validate(&g).is_ok());
        let neg = CarlemanParams { lambda: -1.0, ..Default::default() };
        assert!(neg.validate(&g).is_err());
    }

    #[test]
    fn factor_values() {
        let cp = CarlemanParams::default();
        let f = carleman_factor([0.0, 0.0], &cp, FactorPower::Double).unwrap();
        assert_relative_eq!(f, (8.0 * 9.5367431640625e-7f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(f, 1.00000763, max_relative = 1e-8);
        let off = CarlemanParams { lambda: 0.0, ..cp };
        assert_eq!(carleman_factor([0.5, 0.5], &off, FactorPower::Double).unwrap(), 1.0);
        let near = carleman_factor([-1.0, 0.0], &cp, FactorPower::Double).unwrap();
        let far = carleman_factor([1.0, 0.0], &cp, FactorPower::Double).unwrap();
        assert!(near > far);
    }

    proptest! {
        #[test]
        fn mu_in_unit_interval_on_square(x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let mu = weight_mu([x, y], &CarlemanParams::default()).unwrap();
            prop_assert!(mu > 0.0 && mu < 1.0);
        }

        #[test]
        fn mu_decreases_along_rays(angle in -1.2f64..1.2, r in 1.5f64..5.0, dr in 0.01f64..1.0, lambda in 0.1f64..50.0) {
            let cp = CarlemanParams { lambda, ..Default::default() };
            let at = |r: f64| [cp.x0[0] + r * angle.cos(), cp.x0[1] + r * angle.sin()];
            prop_assert!(weight_mu(at(r), &cp).unwrap() > weight_mu(at(r + dr), &cp).unwrap());
            prop_assert!(
                carleman_factor(at(r), &cp, FactorPower::Double).unwrap()
                    >= carleman_factor(at(r + dr), &cp, FactorPower::Double).unwrap()
            );
        }
    }
}
