//! Occupation time and cumulative Parisian ruin for the Brownian surplus
//! `X_t = x + c t + sigma B_t`.
//!
//! For a zero start the occupation time of `(-inf, 0)` over `[0, t]` has density
//!
//! ```text
//! 2/sigma^2 * g(s) * (c + g(t - s)),   g(u) = sigma e^{-c^2 u / (2 sigma^2)} / sqrt(2 pi u) - c Nbar(c sqrt(u) / sigma)
//! ```
//!
//! on `(0, t)`, with no atom. For `x > 0` the law follows by conditioning on
//! the first-passage time below zero.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::BrownianParams;
use crate::occupation::{uniform_interior_grid, OccupationDistribution, OccupationLaw};
use crate::quadrature::adaptive_integrate_named;
use crate::special::normal_tail;

const INNER_TOL: f64 = 1e-14;
const OUTER_TOL: f64 = 1e-10;

fn g(m: &BrownianParams, u: f64) -> f64 {
    let (c, sigma) = (m.c(), m.sigma());
    sigma * (-(c * c) * u / (2.0 * sigma * sigma)).exp() / (2.0 * PI * u).sqrt()
        - c * normal_tail(c * u.sqrt() / sigma)
}

/// `v g(v^2)`, finite at `v = 0`.
fn g_times_root(m: &BrownianParams, v: f64) -> f64 {
    let (c, sigma) = (m.c(), m.sigma());
    sigma * (-(c * c) * v * v / (2.0 * sigma * sigma)).exp() / (2.0 * PI).sqrt()
        - c * v * normal_tail(c * v / sigma)
}

fn density_unchecked(m: &BrownianParams, t: f64, s: f64) -> f64 {
    2.0 / (m.sigma() * m.sigma()) * g(m, s) * (m.c() + g(m, t - s))
}

/// Occupation density at `s` for horizon `t`, zero start.
pub fn occ_density_bm(params: &BrownianParams, t: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < t && t.is_finite()) {
        return Err(Error::Domain(format!(
            "occupation density needs 0 < s < t, got s = {s}, t = {t}"
        )));
    }
    Ok(density_unchecked(params, t, s))
}

/// `int_lo^hi weight(s) density_t(s) ds`, with `s = v^2` on the half touching
/// zero and `s = t - w^2` on the half touching `t`, which removes both
/// inverse-square-root singularities.
fn integrate_occupation<W: Fn(f64) -> f64>(
    m: &BrownianParams,
    t: f64,
    lo: f64,
    hi: f64,
    weight: W,
    tol: f64,
) -> Result<f64> {
    let (lo, hi) = (lo.max(0.0), hi.min(t));
    if hi <= lo {
        return Ok(0.0);
    }
    let mid = 0.5 * t;
    let mut total = 0.0;
    if lo < mid {
        let top = hi.min(mid);
        let f = |v: f64| {
            let s = v * v;
            let scale = 4.0 / (m.sigma() * m.sigma());
            scale * weight(s) * g_times_root(m, v) * (m.c() + g(m, t - s))
        };
        total +=
            adaptive_integrate_named("bm_occupation_left", f, lo.sqrt(), top.sqrt(), tol)?.value;
    }
    if hi > mid {
        let bottom = lo.max(mid);
        let f = |w: f64| {
            let s = t - w * w;
            let scale = 4.0 / (m.sigma() * m.sigma());
            scale * weight(s) * g(m, s) * (m.c() * w + g_times_root(m, w))
        };
        total += adaptive_integrate_named(
            "bm_occupation_right",
            f,
            (t - hi).sqrt(),
            (t - bottom).sqrt(),
            tol,
        )?
        .value;
    }
    Ok(total)
}

fn check_horizon(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "horizon must be finite and > 0, got {t}"
        )))
    }
}

/// `P(occupation over [0, t] <= s)` for a zero start.
pub fn occ_cdf_bm(params: &BrownianParams, t: f64, s: f64) -> Result<f64> {
    check_horizon(t)?;
    if s <= 0.0 {
        return Ok(0.0);
    }
    integrate_occupation(params, t, 0.0, s, |_| 1.0, INNER_TOL)
}

/// `P(occupation over [0, t] > r)` for a zero start.
pub fn occ_tail_bm(params: &BrownianParams, t: f64, r: f64) -> Result<f64> {
    check_horizon(t)?;
    if r >= t {
        return Ok(0.0);
    }
    integrate_occupation(params, t, r.max(0.0), t, |_| 1.0, INNER_TOL)
}

/// First-passage density below zero, `P_x(tau_0^- in du) / du`.
pub fn ruin_time_density_bm(params: &BrownianParams, x: f64, u: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "initial capital must be > 0, got {x}"
        )));
    }
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("time must be > 0, got {u}")));
    }
    Ok(passage_density(params, x, u))
}

fn passage_density(m: &BrownianParams, x: f64, u: f64) -> f64 {
    let s2 = m.sigma() * m.sigma();
    let d = x + m.c() * u;
    x / (2.0 * PI * s2 * u * u * u).sqrt() * (-(d * d) / (2.0 * s2 * u)).exp()
}

/// `P_x(tau_0^- <= t)` by integrating the first-passage density.
pub fn ruin_prob_bm(params: &BrownianParams, x: f64, t: f64) -> Result<f64> {
    check_horizon(t)?;
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "initial capital must be >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let v = adaptive_integrate_named(
        "bm_ruin_time",
        |u| passage_density(params, x, u),
        0.0,
        t,
        OUTER_TOL,
    )?
    .value;
    Ok(v.clamp(0.0, 1.0))
}

/// `P_x(sigma_r <= t)`.
pub fn cum_parisian_prob_bm(params: &BrownianParams, x: f64, r: f64, t: f64) -> Result<f64> {
    check_horizon(t)?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be > 0, got {r}")));
    }
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "initial capital must be >= 0, got {x}"
        )));
    }
    if r >= t {
        return Ok(0.0);
    }
    if x == 0.0 {
        return occ_tail_bm(params, t, r);
    }
    let mut inner_err = None;
    let outer = adaptive_integrate_named(
        "bm_cumulative_parisian",
        // u = (t - r) - w^2 absorbs the square-root decay of the tail as t - u -> r.
        |w| {
            let u = (t - r) - w * w;
            if u <= 0.0 {
                return 0.0;
            }
            match occ_tail_bm(params, t - u, r) {
                Ok(tail) => 2.0 * w * tail * passage_density(params, x, u),
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        (t - r).sqrt(),
        OUTER_TOL,
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(outer.value.clamp(0.0, 1.0))
}

/// `P_x(kappa_q <= t) = 1 - E_x[exp(-q occupation)]`.
pub fn exp_parisian_prob_bm(params: &BrownianParams, x: f64, q: f64, t: f64) -> Result<f64> {
    check_horizon(t)?;
    if !(q > 0.0) {
        return Err(Error::Domain(format!("q must be > 0, got {q}")));
    }
    Ok((1.0 - BrownianLaw::new(*params, x)?.laplace(t, q)?).clamp(0.0, 1.0))
}

/// Zero-start law at horizon `t`, density sampled at `n_grid` interior points.
pub fn occ_distribution_bm(
    params: &BrownianParams,
    t: f64,
    n_grid: usize,
) -> Result<OccupationDistribution> {
    check_horizon(t)?;
    let grid = uniform_interior_grid(t, n_grid);
    let density: Vec<f64> = grid
        .iter()
        .map(|&s| density_unchecked(params, t, s))
        .collect();
    let mut cdf = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &s in &grid {
        acc += integrate_occupation(params, t, prev, s, |_| 1.0, INNER_TOL)?;
        cdf.push(acc);
        prev = s;
    }
    let mass = acc + integrate_occupation(params, t, prev, t, |_| 1.0, INNER_TOL)?;
    Ok(OccupationDistribution {
        horizon: t,
        atom_at_zero: 0.0,
        grid,
        density,
        cdf,
        mass,
    })
}

/// The family `t -> law of the occupation time` from initial capital `x`.
#[derive(Debug, Clone, Copy)]
pub struct BrownianLaw {
    pub params: BrownianParams,
    pub x: f64,
}

impl BrownianLaw {
    pub fn new(params: BrownianParams, x: f64) -> Result<Self> {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!(
                "initial capital must be >= 0, got {x}"
            )));
        }
        Ok(Self { params, x })
    }

    fn laplace_zero_start(&self, t: f64, q: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(1.0);
        }
        integrate_occupation(&self.params, t, 0.0, t, |s| (-q * s).exp(), INNER_TOL)
    }
}

impl OccupationLaw for BrownianLaw {
    fn atom(&self, t: f64) -> Result<f64> {
        if self.x == 0.0 {
            return Ok(0.0);
        }
        Ok(1.0 - ruin_prob_bm(&self.params, self.x, t)?)
    }

    fn laplace(&self, t: f64, q: f64) -> Result<f64> {
        if self.x == 0.0 {
            return self.laplace_zero_start(t, q);
        }
        let mut inner_err = None;
        let conv = adaptive_integrate_named(
            "bm_laplace_convolution",
            |u| match self.laplace_zero_start(t - u, q) {
                Ok(v) => v * passage_density(&self.params, self.x, u),
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            t,
            OUTER_TOL,
        )?;
        if let Some(e) = inner_err {
            return Err(e);
        }
        Ok(self.atom(t)? + conv.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(c: f64, s: f64) -> BrownianParams {
        BrownianParams::new(c, s).unwrap()
    }

    #[test]
    fn density_is_normalized() {
        for (c, s) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.5)] {
            let m = bm(c, s);
            for &t in &[0.5, 1.0, 5.0] {
                let cdf = occ_cdf_bm(&m, t, t).unwrap();
                assert!((cdf - 1.0).abs() < 1e-9, "c={c} sigma={s} t={t}: {cdf}");
            }
        }
    }

    #[test]
    fn density_nonnegative_and_domain_checked() {
        let m = bm(1.0, 1.0);
        for i in 1..100 {
            assert!(occ_density_bm(&m, 1.0, i as f64 / 100.0).unwrap() >= 0.0);
        }
        assert!(occ_density_bm(&m, 1.0, 0.0).is_err());
        assert!(occ_density_bm(&m, 1.0, 1.0).is_err());
    }

    #[test]
    fn small_drift_approaches_arcsine_law() {
        let m = bm(0.01, 1.0);
        let v = occ_cdf_bm(&m, 1.0, 0.5).unwrap();
        assert!((v - 0.5).abs() < 0.02, "{v}");
        // Tighter: the arcsine CDF is the c -> 0 limit at every s.
        let m = bm(1e-6, 1.0);
        for &s in &[0.1f64, 0.3, 0.8] {
            let arcsine = 2.0 / PI * s.sqrt().asin();
            assert!((occ_cdf_bm(&m, 1.0, s).unwrap() - arcsine).abs() < 1e-5);
        }
    }

    #[test]
    fn first_passage_total_mass() {
        let m = bm(1.0, 1.0);
        let total =
            adaptive_integrate_named("test", |u| passage_density(&m, 1.0, u), 0.0, 400.0, 1e-12)
                .unwrap()
                .value;
        assert!((total - (-2.0f64).exp()).abs() < 1e-10, "{total}");
        assert!(ruin_time_density_bm(&m, 1e-12, 0.5).unwrap() < 1e-11);
        assert!(ruin_time_density_bm(&m, 0.0, 0.5).is_err());
        assert!(ruin_time_density_bm(&m, 1.0, 0.0).is_err());
    }

    #[test]
    fn cumulative_parisian_edges() {
        let m = bm(1.0, 1.0);
        assert_eq!(cum_parisian_prob_bm(&m, 0.5, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(cum_parisian_prob_bm(&m, 0.5, 2.0, 1.0).unwrap(), 0.0);
        let near = cum_parisian_prob_bm(&m, 0.0, 1e-8, 1.0).unwrap();
        assert!((near - 1.0).abs() < 1e-3, "{near}");
        let p = cum_parisian_prob_bm(&m, 0.5, 0.1, 1.0).unwrap();
        assert!(p > 0.0 && p <= ruin_prob_bm(&m, 0.5, 1.0).unwrap());
    }

    #[test]
    fn distribution_matches_cdf() {
        let m = bm(1.0, 1.0);
        let d = occ_distribution_bm(&m, 1.0, 99).unwrap();
        assert!(d.normalization_error().abs() < 1e-9);
        let direct = occ_cdf_bm(&m, 1.0, d.grid[29]).unwrap();
        assert!((d.cdf[29] - direct).abs() < 1e-11);
    }
}
