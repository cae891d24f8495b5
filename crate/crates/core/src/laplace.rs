//! Double Laplace transforms of the occupation time, closed form and by
//! forward numerical quadrature of a computed law.
//!
//! `D(p, q) = int_0^inf e^{-p t} E_x[exp(-q int_0^t 1{X_s < 0} ds)] dt`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{CramerLundbergParams, ModelParams};
use crate::occupation::OccupationLaw;
use crate::quadrature::adaptive_integrate_named;

/// Minimum `p * t_max` accepted by the numerical transforms.
pub const MIN_TRUNCATION: f64 = 30.0;

const PANEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformPoint {
    pub p: f64,
    pub q: f64,
    pub value: f64,
}

fn check_args(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be finite and > 0, got {p}")));
    }
    if !(q > 0.0) || q.is_nan() {
        return Err(Error::Domain(format!("q must be > 0, got {q}")));
    }
    Ok(())
}

/// `Phi(p + q) / ((p + q) Phi(p))` for a zero start.
pub fn closed_dlt_zero(model: &ModelParams, p: f64, q: f64) -> Result<f64> {
    check_args(p, q)?;
    if !model.net_profit() {
        return Err(Error::NetProfit);
    }
    Ok(model.phi(p + q)? / ((p + q) * model.phi(p)?))
}

/// Closed double transform from initial capital `x` for exponential claims.
pub fn closed_dlt_x(model: &CramerLundbergParams, x: f64, p: f64, q: f64) -> Result<f64> {
    check_args(p, q)?;
    if !model.net_profit() {
        return Err(Error::NetProfit);
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "initial capital must be >= 0, got {x}"
        )));
    }
    let (c, alpha) = (model.c(), model.alpha());
    let rp = model.lundberg_roots(p)?;
    let rpq = model.lundberg_roots(p + q)?;
    let lead = (alpha + rp.theta) * rpq.phi / (c * (rpq.phi - rp.theta));
    let bracket = 1.0 / (rp.phi * rp.theta) - 1.0 / (rpq.phi * rpq.theta);
    Ok(lead * bracket * (rp.theta * x).exp() - alpha / (c * rp.phi * rp.theta))
}

/// `int_0^inf e^{-p t} P_x(tau_0^- > t) dt = 1/p - (alpha + theta(p)) / (alpha p) e^{theta(p) x}`.
pub fn closed_laplace_survival(model: &CramerLundbergParams, x: f64, p: f64) -> Result<f64> {
    check_args(p, 1.0)?;
    let theta = model.lundberg_roots(p)?.theta;
    Ok(1.0 / p - (model.alpha() + theta) / (model.alpha() * p) * (theta * x).exp())
}

/// `1 / (c Phi(p))`, the transform of the zero-start survival curve.
pub fn closed_laplace_survival_zero(model: &ModelParams, p: f64) -> Result<f64> {
    check_args(p, 1.0)?;
    Ok(1.0 / (model.premium_rate() * model.phi(p)?))
}

/// `int_0^{t_max} e^{-p t} F(t) dt` over geometric panels
/// `[0, t_max 2^-12], ..., [t_max/2, t_max]`, each adaptive.
fn time_transform<F: Fn(f64) -> Result<f64>>(
    name: &'static str,
    f: F,
    p: f64,
    t_max: f64,
) -> Result<f64> {
    let mut edges = vec![0.0];
    edges.extend((0..=12).rev().map(|j| t_max / f64::powi(2.0, j)));
    let mut first_err = None;
    let mut total = 0.0;
    for w in edges.windows(2) {
        let panel = adaptive_integrate_named(
            name,
            |t| match f(t) {
                Ok(v) => (-p * t).exp() * v,
                Err(e) => {
                    first_err.get_or_insert(e);
                    0.0
                }
            },
            w[0],
            w[1],
            PANEL_TOL,
        )?;
        total += panel.value;
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

fn check_truncation(law: &(impl OccupationLaw + ?Sized), p: f64, t_max: f64) -> Result<()> {
    if p * t_max < MIN_TRUNCATION {
        return Err(Error::Truncation(p * t_max));
    }
    if t_max > law.max_horizon() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "t_max = {t_max} beyond the law's horizon {}",
            law.max_horizon()
        )));
    }
    Ok(())
}

/// Forward numerical double transform of `law`, truncated at `t_max`.
pub fn numeric_dlt(law: &(impl OccupationLaw + ?Sized), p: f64, q: f64, t_max: f64) -> Result<f64> {
    if !(p > 0.0) || !(q >= 0.0) {
        return Err(Error::Domain(format!(
            "need p > 0 and q >= 0, got p = {p}, q = {q}"
        )));
    }
    check_truncation(law, p, t_max)?;
    time_transform("numeric_dlt", |t| law.laplace(t, q), p, t_max)
}

/// `int_0^{t_max} e^{-p t} atom(t) dt`.
pub fn numeric_laplace_atom(
    law: &(impl OccupationLaw + ?Sized),
    p: f64,
    t_max: f64,
) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be > 0, got {p}")));
    }
    check_truncation(law, p, t_max)?;
    time_transform("numeric_laplace_atom", |t| law.atom(t), p, t_max)
}

/// Numeric and closed transforms side by side over `pairs`, evaluated in parallel.
/// `t_max` per point is `MIN_TRUNCATION / p`.
pub fn compare_on_grid<L, C>(
    law: &L,
    closed: C,
    pairs: &[(f64, f64)],
) -> Result<Vec<(TransformPoint, f64)>>
where
    L: OccupationLaw + Sync + ?Sized,
    C: Fn(f64, f64) -> Result<f64> + Sync,
{
    pairs
        .par_iter()
        .map(|&(p, q)| {
            let value = numeric_dlt(law, p, q, MIN_TRUNCATION / p)?;
            Ok((TransformPoint { p, q, value }, closed(p, q)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::BrownianParams;

    fn cl() -> CramerLundbergParams {
        CramerLundbergParams::new(2.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn brownian_closed_form_by_substitution() {
        let (c, s) = (1.0f64, 1.0f64);
        let m: ModelParams = BrownianParams::new(c, s).unwrap().into();
        let v = closed_dlt_zero(&m, 1.0, 1.0).unwrap();
        let expect =
            ((c * c + 2.0 * s * s * 2.0).sqrt() - c) / (2.0 * ((c * c + 2.0 * s * s).sqrt() - c));
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn large_q_limits() {
        let m = cl();
        let mp: ModelParams = m.into();
        let p = 0.7;
        let phi = m.lundberg_roots(p).unwrap().phi;
        let v = closed_dlt_zero(&mp, p, 1e8).unwrap();
        assert!((v * m.c() * phi - 1.0).abs() < 1e-3);
        for x in [0.0, 0.5, 2.0] {
            let lim = closed_laplace_survival(&m, x, p).unwrap();
            let v = closed_dlt_x(&m, x, p, 1e8).unwrap();
            assert!((v - lim).abs() < 1e-3, "x={x}");
        }
    }

    #[test]
    fn x_form_reduces_to_zero_form() {
        let m = cl();
        let mp: ModelParams = m.into();
        for &(p, q) in &[(0.5, 0.5), (0.7, 1.3), (4.0, 0.5), (2.0, 3.0)] {
            let a = closed_dlt_x(&m, 0.0, p, q).unwrap();
            let b = closed_dlt_zero(&mp, p, q).unwrap();
            assert!((a - b).abs() < 1e-12 * b, "{a} vs {b}");
        }
        let p = 1.3;
        let a = closed_laplace_survival(&m, 0.0, p).unwrap();
        assert!((a - closed_laplace_survival_zero(&mp, p).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn net_profit_is_required() {
        let m = CramerLundbergParams::new(1.0, 2.0, 1.0).unwrap();
        assert_eq!(closed_dlt_zero(&m.into(), 1.0, 1.0), Err(Error::NetProfit));
        assert_eq!(closed_dlt_x(&m, 1.0, 1.0, 1.0), Err(Error::NetProfit));
    }

    struct Trivial;
    impl OccupationLaw for Trivial {
        fn atom(&self, _t: f64) -> Result<f64> {
            Ok(1.0)
        }
        fn laplace(&self, _t: f64, _q: f64) -> Result<f64> {
            Ok(1.0)
        }
    }

    #[test]
    fn transform_of_constant_and_truncation_guard() {
        let v = numeric_dlt(&Trivial, 2.0, 1e-12, 15.0).unwrap();
        assert!((v - 0.5).abs() < 1e-6);
        assert!(matches!(
            numeric_dlt(&Trivial, 2.0, 1.0, 10.0),
            Err(Error::Truncation(_))
        ));
    }
}
