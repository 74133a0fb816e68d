//! Axisymmetric scalar fields sampled at the collocation nodes.

use crate::error::{LabError, Result};
use crate::grid::CollocationGrid;
use nalgebra::DVector;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct ScalarProfile {
    pub grid: Arc<CollocationGrid>,
    pub values: DVector<f64>,
}

impl ScalarProfile {
    pub fn new(grid: Arc<CollocationGrid>, values: DVector<f64>) -> Self {
        assert_eq!(grid.len(), values.len());
        ScalarProfile { grid, values }
    }

    pub fn zeros(grid: Arc<CollocationGrid>) -> Self {
        let n = grid.len();
        ScalarProfile::new(grid, DVector::zeros(n))
    }

    pub fn constant(grid: Arc<CollocationGrid>, c: f64) -> Self {
        let n = grid.len();
        ScalarProfile::new(grid, DVector::from_element(n, c))
    }

    pub fn from_fn(grid: Arc<CollocationGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = DVector::from_iterator(grid.len(), grid.nodes().iter().map(|&mu| f(mu)));
        ScalarProfile::new(grid, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarProfile::new(self.grid.clone(), self.values.map(f))
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let v = DVector::from_iterator(
            self.len(),
            self.values.iter().zip(other.values.iter()).map(|(&a, &b)| f(a, b)),
        );
        ScalarProfile::new(self.grid.clone(), v)
    }

    pub fn scale(&self, c: f64) -> Self {
        ScalarProfile::new(self.grid.clone(), &self.values * c)
    }

    /// Spectral d/dμ.
    pub fn deriv(&self) -> Self {
        ScalarProfile::new(self.grid.clone(), self.grid.deriv(&self.values))
    }

    /// Round-sphere Laplacian Δ₀.
    pub fn round_laplacian(&self) -> Self {
        ScalarProfile::new(self.grid.clone(), self.grid.round_laplacian(&self.values))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn spectral_tail(&self) -> f64 {
        self.grid.spectral_tail(&self.values)
    }

    /// Diagnostic for fields declared smooth.
    pub fn require_smooth(&self, which: &str, threshold: f64) -> Result<()> {
        if !self.all_finite() {
            return Err(LabError::NonSmoothProfile {
                which: which.into(),
                tail: f64::INFINITY,
                threshold,
            });
        }
        let tail = self.spectral_tail();
        if tail > threshold {
            return Err(LabError::NonSmoothProfile {
                which: which.into(),
                tail,
                threshold,
            });
        }
        Ok(())
    }

    pub fn interpolate(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    /// CSV block of (μ_i, value_i) rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,value\n");
        for i in 0..self.len() {
            out.push_str(&format!("{:.16e},{:.16e}\n", self.grid.node(i), self.values[i]));
        }
        out
    }
}

impl Add for &ScalarProfile {
    type Output = ScalarProfile;
    fn add(self, rhs: &ScalarProfile) -> ScalarProfile {
        ScalarProfile::new(self.grid.clone(), &self.values + &rhs.values)
    }
}

impl Sub for &ScalarProfile {
    type Output = ScalarProfile;
    fn sub(self, rhs: &ScalarProfile) -> ScalarProfile {
        ScalarProfile::new(self.grid.clone(), &self.values - &rhs.values)
    }
}

impl Mul for &ScalarProfile {
    type Output = ScalarProfile;
    fn mul(self, rhs: &ScalarProfile) -> ScalarProfile {
        ScalarProfile::new(self.grid.clone(), self.values.component_mul(&rhs.values))
    }
}

impl Neg for &ScalarProfile {
    type Output = ScalarProfile;
    fn neg(self) -> ScalarProfile {
        ScalarProfile::new(self.grid.clone(), -&self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_smoothness() {
        let g = CollocationGrid::new(32);
        let a = ScalarProfile::from_fn(g.clone(), |mu| mu * mu);
        let b = ScalarProfile::from_fn(g.clone(), |mu| 1.0 - mu);
        let s = &a + &b;
        assert!((s.values[0] - (g.node(0).powi(2) + 1.0 - g.node(0))).abs() < 1e-15);
        assert!(a.require_smooth("a", 1e-8).is_ok());
    }

    #[test]
    fn derivative_of_product_rule() {
        let g = CollocationGrid::new(48);
        let a = ScalarProfile::from_fn(g.clone(), |mu| (1.5 * mu).sin());
        let b = ScalarProfile::from_fn(g.clone(), |mu| mu.cosh());
        let lhs = (&a * &b).deriv();
        let rhs = &(&a.deriv() * &b) + &(&a * &b.deriv());
        assert!((&lhs - &rhs).max_abs() < 1e-9);
    }
}
