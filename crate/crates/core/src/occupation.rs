//! The law of the occupation time `int_0^t 1{X_s < 0} ds`.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// An atom at zero plus a density sampled on a grid in `(0, t)`.
///
/// `cdf[i]` is the density mass on `(0, grid[i]]` (the atom excluded) and
/// `mass` the total density mass on `(0, t)`; both come from quadrature of
/// the exact density, not from the sampled values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationDistribution {
    pub horizon: f64,
    pub atom_at_zero: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub cdf: Vec<f64>,
    pub mass: f64,
}

impl OccupationDistribution {
    /// `atom + mass - 1`.
    pub fn normalization_error(&self) -> f64 {
        self.atom_at_zero + self.mass - 1.0
    }

    /// `P(occupation <= s)`, linear between grid points.
    pub fn cdf_at(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        if s >= self.horizon {
            return self.atom_at_zero + self.mass;
        }
        let idx = self.grid.partition_point(|&g| g <= s);
        let (s0, c0) = if idx == 0 {
            (0.0, 0.0)
        } else {
            (self.grid[idx - 1], self.cdf[idx - 1])
        };
        let (s1, c1) = if idx == self.grid.len() {
            (self.horizon, self.mass)
        } else {
            (self.grid[idx], self.cdf[idx])
        };
        self.atom_at_zero + c0 + (c1 - c0) * (s - s0) / (s1 - s0)
    }

    /// First moment `int s F(ds)` by the trapezoid rule on the grid.
    pub fn mean(&self) -> f64 {
        let mut acc = 0.0;
        let mut prev = (0.0, 0.0);
        for (&s, &c) in self.grid.iter().zip(&self.cdf) {
            acc += 0.5 * (s + prev.0) * (c - prev.1);
            prev = (s, c);
        }
        acc + 0.5 * (self.horizon + prev.0) * (self.mass - prev.1)
    }
}

/// A family `t -> law of the occupation time over [0, t]`.
pub trait OccupationLaw {
    /// `P(occupation = 0)`, i.e. survival to `t`.
    fn atom(&self, t: f64) -> Result<f64>;

    /// `E[exp(-q * occupation)] = atom + int_0^t e^{-q s} density(s) ds`.
    fn laplace(&self, t: f64, q: f64) -> Result<f64>;

    /// Largest horizon the family can be evaluated at.
    fn max_horizon(&self) -> f64 {
        f64::INFINITY
    }
}

pub(crate) fn uniform_interior_grid(t: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| t * i as f64 / (n + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_interpolates_and_saturates() {
        // Uniform density 0.5 on (0,1) with atom 0.5.
        let grid = uniform_interior_grid(1.0, 3);
        let d = OccupationDistribution {
            horizon: 1.0,
            atom_at_zero: 0.5,
            density: vec![0.5; 3],
            cdf: grid.iter().map(|s| 0.5 * s).collect(),
            grid,
            mass: 0.5,
        };
        assert_eq!(d.cdf_at(-0.1), 0.0);
        assert!((d.cdf_at(0.0) - 0.5).abs() < 1e-15);
        assert!((d.cdf_at(0.6) - 0.8).abs() < 1e-15);
        assert_eq!(d.cdf_at(1.0), 1.0);
        assert!(d.normalization_error().abs() < 1e-15);
        assert!((d.mean() - 0.25).abs() < 1e-15);
    }
}
