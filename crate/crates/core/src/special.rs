//! Modified Bessel functions `I_0`, `I_1`, `I_2` and the standard normal tail.
//!
//! Small arguments use the power series. Larger arguments use the weighted
//! integral representations
//!
//! ```text
//! I_0(s) = 1/pi       int_{-1}^{1} e^{-su} (1-u^2)^{-1/2} du
//! I_1(s) = s/pi       int_{-1}^{1} e^{-su} (1-u^2)^{1/2}  du
//! I_2(s) = s^2/(3 pi) int_{-1}^{1} e^{-su} (1-u^2)^{3/2}  du
//! ```
//!
//! evaluated after `u = -cos(phi)`, which turns each one into the integral of
//! a smooth periodic function over `[0, pi]`; the trapezoid rule is then
//! spectrally accurate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Series is used up to this argument, the integral form beyond it.
pub const SERIES_CUTOFF: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselOrder {
    Zero,
    One,
    Two,
}

impl BesselOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
            BesselOrder::Two => 2,
        }
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        match n {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            2 => Ok(BesselOrder::Two),
            _ => Err(Error::Domain(format!(
                "Bessel order {n} not supported (0, 1, 2 only)"
            ))),
        }
    }
}

fn check_arg(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Bessel argument must be finite and >= 0, got {s}"
        )))
    }
}

/// `I_nu(s)`. Overflows to `inf` past `s ~ 713`; use [`bessel_i_scaled`] there.
pub fn bessel_i(order: BesselOrder, s: f64) -> Result<f64> {
    check_arg(s)?;
    if s <= SERIES_CUTOFF {
        Ok(series(order, s))
    } else {
        Ok(integral_scaled(order, s) * s.exp())
    }
}

/// `e^{-s} I_nu(s)`.
pub fn bessel_i_scaled(order: BesselOrder, s: f64) -> Result<f64> {
    check_arg(s)?;
    Ok(scaled_unchecked(order, s))
}

#[inline]
pub(crate) fn scaled_unchecked(order: BesselOrder, s: f64) -> f64 {
    if s <= SERIES_CUTOFF {
        series(order, s) * (-s).exp()
    } else {
        integral_scaled(order, s)
    }
}

/// Power-series route, any `s >= 0` that does not overflow.
pub fn bessel_i_series(order: BesselOrder, s: f64) -> Result<f64> {
    check_arg(s)?;
    Ok(series(order, s))
}

/// Integral-representation route, any `s >= 0` that does not overflow.
pub fn bessel_i_integral(order: BesselOrder, s: f64) -> Result<f64> {
    check_arg(s)?;
    Ok(integral_scaled(order, s) * s.exp())
}

fn series(order: BesselOrder, s: f64) -> f64 {
    let nu = order.as_u32() as f64;
    let half = 0.5 * s;
    let q = half * half;
    let mut term = match order {
        BesselOrder::Zero => 1.0,
        BesselOrder::One => half,
        BesselOrder::Two => 0.5 * q,
    };
    let mut sum = term;
    let mut k = 0.0;
    while term > 1e-17 * sum {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
    }
    sum
}

fn integral_scaled(order: BesselOrder, s: f64) -> f64 {
    // Trapezoid error for e^{s cos(phi)} decays like I_{2n}(s)/I_0(s).
    let n = 64 + 8 * (s.sqrt().ceil() as usize);
    let h = PI / n as f64;
    let f = |phi: f64| {
        let e = (s * (phi.cos() - 1.0)).exp();
        match order {
            BesselOrder::Zero => e,
            BesselOrder::One => e * phi.sin().powi(2),
            BesselOrder::Two => e * phi.sin().powi(4),
        }
    };
    let mut acc = 0.5 * (f(0.0) + f(PI));
    for k in 1..n {
        acc += f(k as f64 * h);
    }
    let integral = acc * h;
    match order {
        BesselOrder::Zero => integral / PI,
        BesselOrder::One => s * integral / PI,
        BesselOrder::Two => s * s * integral / (3.0 * PI),
    }
}

/// `e^{-z} (I_0(z) - I_2(z))`, which equals `e^{-z} 2 I_1(z) / z` and tends to 1 at 0.
pub(crate) fn i0_minus_i2_scaled(z: f64) -> f64 {
    if z <= SERIES_CUTOFF {
        (series(BesselOrder::Zero, z) - series(BesselOrder::Two, z)) * (-z).exp()
    } else {
        integral_scaled(BesselOrder::Zero, z) - integral_scaled(BesselOrder::Two, z)
    }
}

/// Standard normal tail `P(Z > x)`.
pub fn normal_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use BesselOrder::*;

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_i(Zero, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(One, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(Two, 0.0).unwrap(), 0.0);
        assert!((bessel_i_integral(Zero, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn i0_at_one() {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..30 {
            term /= 4.0 * (k * k) as f64;
            sum += term;
        }
        assert!((sum - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((bessel_i(Zero, 1.0).unwrap() - sum).abs() < 1e-15);
    }

    #[test]
    fn negative_argument_rejected() {
        assert!(bessel_i(Zero, -1.0).is_err());
        assert!(bessel_i_scaled(Two, f64::NAN).is_err());
        assert!(BesselOrder::try_from(3).is_err());
    }

    #[test]
    fn routes_agree_in_overlap_band() {
        for &s in &[10.0, 12.5, 15.0, 17.5, 20.0] {
            for o in [Zero, One, Two] {
                let a = bessel_i_series(o, s).unwrap();
                let b = bessel_i_integral(o, s).unwrap();
                assert!(((a - b) / a).abs() < 1e-13, "{o:?} at {s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn scaled_large_argument_is_finite() {
        let v = bessel_i_scaled(Zero, 1e4).unwrap();
        // e^{-z} I_0(z) ~ (2 pi z)^{-1/2} (1 + 1/(8z) + 9/(128 z^2))
        let z = 1e4;
        let asym = (2.0 * PI * z).sqrt().recip() * (1.0 + 1.0 / (8.0 * z) + 9.0 / (128.0 * z * z));
        assert!(((v - asym) / asym).abs() < 1e-10, "{v} vs {asym}");
    }

    #[test]
    fn i0_minus_i2_is_two_i1_over_z() {
        for &z in &[1e-3, 0.5, 3.0, 14.0, 16.0, 40.0] {
            let lhs = i0_minus_i2_scaled(z);
            let rhs = 2.0 * bessel_i_scaled(One, z).unwrap() / z;
            assert!(((lhs - rhs) / rhs).abs() < 1e-12, "z={z}");
        }
        assert_eq!(i0_minus_i2_scaled(0.0), 1.0);
    }

    #[test]
    fn normal_tail_examples() {
        assert_eq!(normal_tail(0.0), 0.5);
        assert!(normal_tail(40.0) < 1e-300);
        for &x in &[-3.0, -0.4, 0.7, 2.5] {
            assert!((normal_tail(x) + normal_tail(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normal_tail_at_one_against_quadrature() {
        let dens = |y: f64| (-0.5 * y * y).exp() / (2.0 * PI).sqrt();
        let oracle = crate::quadrature::adaptive_integrate(dens, 1.0, 40.0, 1e-13)
            .unwrap()
            .value;
        assert!((oracle - 0.158_655_253_931_457_05).abs() < 1e-13);
        assert!((normal_tail(1.0) - oracle).abs() < 1e-14);
    }
}
