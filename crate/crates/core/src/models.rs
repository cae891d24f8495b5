//! Surplus models, their Laplace exponents and the roots of Lundberg's
//! equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compound Poisson surplus with drift and exponential claims:
/// `X_t = x + c t - sum_{i <= N_t} C_i`, `N ~ Poisson(lambda)`, `C_i ~ Exp(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CramerLundbergParams {
    c: f64,
    lambda: f64,
    alpha: f64,
    net_profit: bool,
}

impl CramerLundbergParams {
    pub fn new(c: f64, lambda: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("c", c), ("lambda", lambda), ("alpha", alpha)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            c,
            lambda,
            alpha,
            net_profit: c * alpha > lambda,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `E[X_1] = c - lambda / alpha > 0`.
    pub fn net_profit(&self) -> bool {
        self.net_profit
    }

    /// `E[X_1]`, the right derivative of the Laplace exponent at zero.
    pub fn mean_increment(&self) -> f64 {
        self.c - self.lambda / self.alpha
    }

    /// `psi(theta) = c theta - lambda theta / (alpha + theta)`, defined for `theta > -alpha`.
    pub fn psi(&self, theta: f64) -> Result<f64> {
        if theta <= -self.alpha {
            return Err(Error::Domain(format!(
                "Laplace exponent has a pole at -alpha = {}; got theta = {theta}",
                -self.alpha
            )));
        }
        Ok(self.c * theta - self.lambda * theta / (self.alpha + theta))
    }

    /// `Delta_p = (p + lambda - c alpha)^2 + 4 c alpha p`.
    pub fn discriminant(&self, p: f64) -> f64 {
        let b = p + self.lambda - self.c * self.alpha;
        b * b + 4.0 * self.c * self.alpha * p
    }

    /// Both roots of `psi(theta) = p`.
    pub fn lundberg_roots(&self, p: f64) -> Result<LundbergRoots> {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p must be finite and >= 0, got {p}")));
        }
        let (c, ca) = (self.c, self.c * self.alpha);
        let b = p + self.lambda - ca;
        let delta = self.discriminant(p);
        let sq = delta.sqrt();
        // phi * theta = -alpha p / c; compute the root free of cancellation
        // first and recover the other one from the product.
        let (phi, theta) = if b >= 0.0 {
            let phi = (b + sq) / (2.0 * c);
            let theta = if phi > 0.0 {
                -self.alpha * p / (c * phi)
            } else {
                0.0
            };
            (phi, theta)
        } else {
            let theta = (b - sq) / (2.0 * c);
            (-self.alpha * p / (c * theta), theta)
        };
        Ok(LundbergRoots { phi, theta, delta })
    }
}

/// Brownian surplus with drift: `X_t = x + c t + sigma B_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrownianParams {
    c: f64,
    sigma: f64,
}

impl BrownianParams {
    pub fn new(c: f64, sigma: f64) -> Result<Self> {
        for (name, v) in [("c", c), ("sigma", sigma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self { c, sigma })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn psi(&self, theta: f64) -> f64 {
        self.c * theta + 0.5 * self.sigma * self.sigma * theta * theta
    }

    /// Right inverse of `psi`: `(sqrt(c^2 + 2 sigma^2 q) - c) / sigma^2`.
    pub fn phi(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::Domain(format!("q must be finite and >= 0, got {q}")));
        }
        let s2 = self.sigma * self.sigma;
        // Conjugate form: no cancellation for small q.
        let root = (self.c * self.c + 2.0 * s2 * q).sqrt();
        Ok(2.0 * q / (root + self.c))
    }
}

/// Roots of `psi(theta) = p` for the Cramér–Lundberg model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LundbergRoots {
    /// Largest root, `>= 0`.
    pub phi: f64,
    /// Smallest root, in `(-alpha, 0]`.
    pub theta: f64,
    /// Discriminant `Delta_p`.
    pub delta: f64,
}

/// Either surplus model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    CramerLundberg(CramerLundbergParams),
    Brownian(BrownianParams),
}

impl ModelParams {
    pub fn psi(&self, theta: f64) -> Result<f64> {
        match self {
            ModelParams::CramerLundberg(m) => m.psi(theta),
            ModelParams::Brownian(m) => Ok(m.psi(theta)),
        }
    }

    /// Largest root `Phi(p)` of Lundberg's equation.
    pub fn phi(&self, p: f64) -> Result<f64> {
        match self {
            ModelParams::CramerLundberg(m) => Ok(m.lundberg_roots(p)?.phi),
            ModelParams::Brownian(m) => m.phi(p),
        }
    }

    pub fn net_profit(&self) -> bool {
        match self {
            ModelParams::CramerLundberg(m) => m.net_profit(),
            ModelParams::Brownian(_) => true,
        }
    }

    pub fn premium_rate(&self) -> f64 {
        match self {
            ModelParams::CramerLundberg(m) => m.c(),
            ModelParams::Brownian(m) => m.c(),
        }
    }
}

impl From<CramerLundbergParams> for ModelParams {
    fn from(m: CramerLundbergParams) -> Self {
        ModelParams::CramerLundberg(m)
    }
}

impl From<BrownianParams> for ModelParams {
    fn from(m: BrownianParams) -> Self {
        ModelParams::Brownian(m)
    }
}

/// Laplace exponent of either model.
pub fn psi(model: &ModelParams, theta: f64) -> Result<f64> {
    model.psi(theta)
}

pub fn lundberg_roots(model: &CramerLundbergParams, p: f64) -> Result<LundbergRoots> {
    model.lundberg_roots(p)
}

pub fn phi_bm(model: &BrownianParams, q: f64) -> Result<f64> {
    model.phi(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cl(c: f64, l: f64, a: f64) -> CramerLundbergParams {
        CramerLundbergParams::new(c, l, a).unwrap()
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(CramerLundbergParams::new(0.0, 1.0, 1.0).is_err());
        assert!(CramerLundbergParams::new(1.0, -1.0, 1.0).is_err());
        assert!(CramerLundbergParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(BrownianParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn psi_examples() {
        let bm: ModelParams = BrownianParams::new(2.0, 1.0).unwrap().into();
        assert_eq!(psi(&bm, 0.0).unwrap(), 0.0);
        let m: ModelParams = cl(2.0, 1.0, 1.0).into();
        assert!((psi(&m, 1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!(psi(&m, -1.0).is_err());
        assert!(psi(&m, -2.0).is_err());
        let h = 1e-6;
        let d = (psi(&m, h).unwrap() - psi(&m, -h).unwrap()) / (2.0 * h);
        assert!((d - 1.0).abs() < 1e-8, "psi'(0) = {d}");
    }

    #[test]
    fn roots_at_zero_and_product() {
        let m = cl(2.0, 1.0, 1.0);
        let r = m.lundberg_roots(0.0).unwrap();
        assert_eq!(r.phi, 0.0);
        assert!((r.theta + 0.5).abs() < 1e-15);
        let r = m.lundberg_roots(1.0).unwrap();
        assert!((m.c() * r.phi * r.theta + 1.0).abs() < 1e-14);
        // net profit violated: Phi(0) = (lambda - c alpha)/c, theta(0) = 0
        let v = cl(1.0, 2.0, 1.0);
        let r = v.lundberg_roots(0.0).unwrap();
        assert!((r.phi - 1.0).abs() < 1e-15);
        assert_eq!(r.theta, 0.0);
        assert!(!v.net_profit());
    }

    #[test]
    fn phi_bm_examples() {
        let b = BrownianParams::new(1.0, 1.0).unwrap();
        assert_eq!(b.phi(0.0).unwrap(), 0.0);
        assert!((b.phi(1.5).unwrap() - 1.0).abs() < 1e-15);
        let b = BrownianParams::new(2.0, 1.0).unwrap();
        assert!((b.phi(6.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn phi_monotone_on_grid() {
        let m = cl(2.0, 1.0, 1.0);
        let mut prev = -1.0;
        for i in 0..200 {
            let p = 0.05 * i as f64;
            let phi = m.lundberg_roots(p).unwrap().phi;
            assert!(phi > prev);
            prev = phi;
        }
    }

    proptest! {
        #[test]
        fn roots_solve_lundberg_equation(
            c in 0.1f64..10.0, l in 0.1f64..10.0, a in 0.1f64..10.0, p in 1e-6f64..50.0
        ) {
            let m = cl(c, l, a);
            let r = m.lundberg_roots(p).unwrap();
            let mp: ModelParams = m.into();
            prop_assert!(r.phi >= 0.0 && r.theta <= 0.0 && r.theta > -a);
            prop_assert!((mp.psi(r.phi).unwrap() - p).abs() <= 1e-10 * p);
            prop_assert!((mp.psi(r.theta).unwrap() - p).abs() <= 1e-10 * p);
            let alt = (p + l + c * a).powi(2) - 4.0 * c * a * l;
            prop_assert!((r.delta - alt).abs() <= 1e-12 * alt.max(1.0));
            prop_assert!((r.phi - r.theta - r.delta.sqrt() / c).abs() <= 1e-12 * (r.phi - r.theta));
        }

        #[test]
        fn product_identity_on_shifted_argument(
            c in 0.1f64..10.0, l in 0.1f64..10.0, a in 0.1f64..10.0,
            p in 0.0f64..20.0, q in 0.0f64..20.0
        ) {
            let m = cl(c, l, a);
            let r = m.lundberg_roots(p + q).unwrap();
            let lhs = c * r.phi * r.theta;
            let rhs = -a * (p + q);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn brownian_phi_inverts_psi(c in 0.01f64..10.0, s in 0.05f64..5.0, q in 0.0f64..100.0) {
            let b = BrownianParams::new(c, s).unwrap();
            let phi = b.phi(q).unwrap();
            prop_assert!((b.psi(phi) - q).abs() <= 1e-12 * q.max(1e-300) + 1e-300);
        }
    }
}
