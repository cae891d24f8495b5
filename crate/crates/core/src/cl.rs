//! Occupation-time law and ruin probabilities for the Cramér–Lundberg model
//! with exponential claims.
//!
//! Notation: `B = lambda + c alpha`, `A = 2 sqrt(c alpha lambda)`,
//! `z(s) = A sqrt(s (s + x/c))`.
//!
//! * `a_t = (1 - lambda/(c alpha))_+ + 2 lambda/pi e^{-B t} int_{-1}^{1} sqrt(1-u^2) e^{-A t u} / (B + A u) du`
//! * `a^x_t = 1 - int_0^t f_x(s) ds` with the ruin-time density
//!   `f_x(s) = lambda e^{-alpha x} e^{-B s} [I_0(z) - s/(s + x/c) I_2(z)]`
//! * `k^x_t = e^{-alpha x} - 1 + x alpha lambda e^{-alpha x} int_0^t e^{-B s} [I_0(z) - I_2(z)] ds`
//!
//! and the occupation law is
//! `a^x_t delta_0(ds) + (a^x_{t-s} + k^x_{t-s}) (lambda - c alpha (1 - a_s)) ds` on `(0, t)`.

use std::f64::consts::PI;

use crate::curve::HermiteCurve;
use crate::error::{Error, Result};
use crate::models::CramerLundbergParams;
use crate::occupation::{uniform_interior_grid, OccupationDistribution, OccupationLaw};
use crate::quadrature::{adaptive_integrate_named, angle_trapezoid_converged, QuadratureRule};
use crate::special::{i0_minus_i2_scaled, scaled_unchecked, BesselOrder};

/// Grid resolution of the precomputed time curves.
pub const CURVE_INTERVALS: usize = 2048;

const CHEB_TOL: f64 = 1e-13;
const ADAPTIVE_TOL: f64 = 1e-12;
/// Normalization error beyond this is reported as an internal failure.
pub const NORMALIZATION_LIMIT: f64 = 1e-4;

fn check_time(name: &str, t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be finite and >= 0, got {t}"
        )))
    }
}

#[derive(Debug, Clone, Copy)]
struct Consts {
    lambda: f64,
    ca: f64,
    alpha: f64,
    c: f64,
    b: f64,
    a: f64,
}

impl Consts {
    fn new(m: &CramerLundbergParams) -> Self {
        let ca = m.c() * m.alpha();
        Self {
            lambda: m.lambda(),
            ca,
            alpha: m.alpha(),
            c: m.c(),
            b: m.lambda() + ca,
            a: 2.0 * (ca * m.lambda()).sqrt(),
        }
    }

    fn z(&self, x: f64, s: f64) -> f64 {
        self.a * (s * (s + x / self.c)).sqrt()
    }

    fn ruin_density(&self, x: f64, s: f64) -> f64 {
        let z = self.z(x, s);
        let ratio = if x == 0.0 { 1.0 } else { s / (s + x / self.c) };
        let i0 = scaled_unchecked(BesselOrder::Zero, z);
        let i2 = scaled_unchecked(BesselOrder::Two, z);
        self.lambda * (z - self.b * s - self.alpha * x).exp() * (i0 - ratio * i2)
    }

    fn k_integrand(&self, x: f64, s: f64) -> f64 {
        let z = self.z(x, s);
        x * self.alpha
            * self.lambda
            * (z - self.b * s - self.alpha * x).exp()
            * i0_minus_i2_scaled(z)
    }

    fn survival_zero(&self, t: f64) -> Result<f64> {
        // With u = cos(phi), B + A u = gap + 2 A cos^2(phi/2), and the sin^2(phi)
        // weight cancels the pole at u = -1 when gap = 0.
        let a = self.a;
        let gap = (self.ca.sqrt() - self.lambda.sqrt()).powi(2);
        let integral = angle_trapezoid_converged(
            |phi| {
                let (sh, ch) = (0.5 * phi).sin_cos();
                let c2 = ch * ch;
                let d = gap + 2.0 * a * c2;
                let ratio = if d == 0.0 {
                    2.0 * sh * sh / a
                } else {
                    4.0 * sh * sh * c2 / d
                };
                ratio * (-d * t).exp()
            },
            CHEB_TOL,
        )?;
        let base = (1.0 - self.lambda / self.ca).max(0.0);
        Ok((base + 2.0 * self.lambda / PI * integral).clamp(0.0, 1.0))
    }
}

/// `P(tau_0^- > t)` started from zero, by Gauss–Chebyshev quadrature.
pub fn survival_zero(model: &CramerLundbergParams, t: f64) -> Result<f64> {
    check_time("t", t)?;
    Consts::new(model).survival_zero(t)
}

/// Density of the classical ruin time, `P_x(tau_0^- in ds) / ds`.
pub fn ruin_time_density_cl(model: &CramerLundbergParams, x: f64, s: f64) -> Result<f64> {
    check_time("x", x)?;
    check_time("s", s)?;
    Ok(Consts::new(model).ruin_density(x, s))
}

/// `a^x_t = P_x(tau_0^- > t)`.
pub fn survival_x(model: &CramerLundbergParams, x: f64, t: f64) -> Result<f64> {
    check_time("x", x)?;
    check_time("t", t)?;
    let k = Consts::new(model);
    let ruined =
        adaptive_integrate_named("survival_x", |s| k.ruin_density(x, s), 0.0, t, ADAPTIVE_TOL)?;
    Ok((1.0 - ruined.value).clamp(0.0, 1.0))
}

/// Classical finite-time ruin probability `P_x(tau_0^- <= t)`.
pub fn classical_ruin_prob_cl(model: &CramerLundbergParams, x: f64, t: f64) -> Result<f64> {
    Ok(1.0 - survival_x(model, x, t)?)
}

/// `k^x_t`, the correction added to `a^x` in the occupation density.
pub fn k_correction(model: &CramerLundbergParams, x: f64, t: f64) -> Result<f64> {
    check_time("x", x)?;
    check_time("t", t)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let k = Consts::new(model);
    let integral = adaptive_integrate_named(
        "k_correction",
        |s| k.k_integrand(x, s),
        0.0,
        t,
        ADAPTIVE_TOL,
    )?;
    Ok((-model.alpha() * x).exp() - 1.0 + integral.value)
}

/// Occupation density at `s` for a zero start, `a_{t-s} (lambda - c alpha (1 - a_s))`.
pub fn occ_density_zero(model: &CramerLundbergParams, t: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < t) {
        return Err(Error::Domain(format!(
            "occupation density needs 0 < s < t, got s = {s}, t = {t}"
        )));
    }
    let k = Consts::new(model);
    let a_rest = k.survival_zero(t - s)?;
    let a_s = k.survival_zero(s)?;
    Ok(a_rest * (k.lambda - k.ca * (1.0 - a_s)))
}

/// A time curve sampled on the kernel grid: `a_t` for a zero start.
#[derive(Debug, Clone)]
pub struct SurvivalCurve {
    pub model: CramerLundbergParams,
    pub x: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// `k^x_t` sampled on the kernel grid.
#[derive(Debug, Clone)]
pub struct KCorrection {
    pub model: CramerLundbergParams,
    pub x: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// `a^0`, `a^x` and `k^x` precomputed on a uniform grid over `[0, horizon]`
/// and interpolated by cubic Hermite with their exact derivatives.
///
/// Immutable once built; evaluate from as many threads as needed.
#[derive(Debug, Clone)]
pub struct ClKernel {
    model: CramerLundbergParams,
    x: f64,
    horizon: f64,
    a0: HermiteCurve,
    ax: HermiteCurve,
    k: HermiteCurve,
    rule: QuadratureRule,
}

impl ClKernel {
    pub fn new(model: CramerLundbergParams, x: f64, horizon: f64) -> Result<Self> {
        Self::with_resolution(model, x, horizon, CURVE_INTERVALS)
    }

    pub fn with_resolution(
        model: CramerLundbergParams,
        x: f64,
        horizon: f64,
        intervals: usize,
    ) -> Result<Self> {
        check_time("x", x)?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!(
                "horizon must be finite and > 0, got {horizon}"
            )));
        }
        if intervals < 2 {
            return Err(Error::InvalidParameter(
                "kernel needs at least 2 intervals".into(),
            ));
        }
        let k = Consts::new(&model);
        let n = intervals;
        let h = horizon / n as f64;
        let rule = QuadratureRule::legendre(8);
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();

        let a0_vals = times
            .iter()
            .map(|&t| k.survival_zero(t))
            .collect::<Result<Vec<_>>>()?;
        let a0_slopes: Vec<f64> = times.iter().map(|&t| -k.ruin_density(0.0, t)).collect();

        let mut ax_vals = Vec::with_capacity(n + 1);
        let mut k_vals = Vec::with_capacity(n + 1);
        let (mut ruined, mut kacc) = (0.0, 0.0);
        let k0 = (-model.alpha() * x).exp() - 1.0;
        ax_vals.push(1.0);
        k_vals.push(if x == 0.0 { 0.0 } else { k0 });
        for w in times.windows(2) {
            ruined += rule.integrate_on(|s| k.ruin_density(x, s), w[0], w[1]);
            ax_vals.push((1.0 - ruined).clamp(0.0, 1.0));
            if x > 0.0 {
                kacc += rule.integrate_on(|s| k.k_integrand(x, s), w[0], w[1]);
                k_vals.push(k0 + kacc);
            } else {
                k_vals.push(0.0);
            }
        }
        let ax_slopes: Vec<f64> = times.iter().map(|&t| -k.ruin_density(x, t)).collect();
        let k_slopes: Vec<f64> = times
            .iter()
            .map(|&t| if x > 0.0 { k.k_integrand(x, t) } else { 0.0 })
            .collect();

        Ok(Self {
            model,
            x,
            horizon,
            a0: HermiteCurve::new(horizon, a0_vals, a0_slopes),
            ax: HermiteCurve::new(horizon, ax_vals, ax_slopes),
            k: HermiteCurve::new(horizon, k_vals, k_slopes),
            rule,
        })
    }

    pub fn model(&self) -> &CramerLundbergParams {
        &self.model
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn check_horizon(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t <= self.horizon * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "t = {t} outside kernel range [0, {}]",
                self.horizon
            )))
        }
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.a0.values().len();
        (0..n).map(|i| i as f64 * self.a0.step()).collect()
    }

    pub fn survival_zero_curve(&self) -> SurvivalCurve {
        SurvivalCurve {
            model: self.model,
            x: 0.0,
            grid: self.grid(),
            values: self.a0.values().to_vec(),
        }
    }

    pub fn survival_x_curve(&self) -> SurvivalCurve {
        SurvivalCurve {
            model: self.model,
            x: self.x,
            grid: self.grid(),
            values: self.ax.values().to_vec(),
        }
    }

    pub fn k_curve(&self) -> KCorrection {
        KCorrection {
            model: self.model,
            x: self.x,
            grid: self.grid(),
            values: self.k.values().to_vec(),
        }
    }

    pub fn survival_zero(&self, t: f64) -> f64 {
        self.a0.eval(t)
    }

    pub fn survival_x(&self, t: f64) -> f64 {
        self.ax.eval(t)
    }

    pub fn k_correction(&self, t: f64) -> f64 {
        self.k.eval(t)
    }

    /// `lambda - c alpha (1 - a_s)`.
    pub fn claim_factor(&self, s: f64) -> f64 {
        self.model.lambda() - self.model.c() * self.model.alpha() * (1.0 - self.a0.eval(s))
    }

    /// `a^x_{t-s} + k^x_{t-s}`.
    pub fn start_factor(&self, u: f64) -> f64 {
        self.ax.eval(u) + self.k.eval(u)
    }

    /// Occupation density at `s` for horizon `t`.
    pub fn density(&self, t: f64, s: f64) -> Result<f64> {
        self.check_horizon(t)?;
        if !(s > 0.0 && s < t) {
            return Err(Error::Domain(format!(
                "occupation density needs 0 < s < t, got s = {s}, t = {t}"
            )));
        }
        Ok(self.start_factor(t - s) * self.claim_factor(s))
    }

    fn density_unchecked(&self, t: f64, s: f64) -> f64 {
        self.start_factor(t - s) * self.claim_factor(s)
    }

    /// `int_lo^hi weight(s) density_t(s) ds` with panels aligned to the curve
    /// grid in both `s` and `t - s`, so each factor is a single cubic per panel.
    fn integrate_density<W: Fn(f64) -> f64>(
        &self,
        t: f64,
        lo: f64,
        hi: f64,
        weight: W,
        extra: &[f64],
    ) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let h = self.a0.step();
        let mut cuts = vec![lo, hi];
        cuts.extend_from_slice(extra);
        let first = (lo / h).ceil() as i64;
        let last = (hi / h).floor() as i64;
        cuts.extend((first..=last).map(|i| i as f64 * h));
        let first = ((t - hi) / h).ceil() as i64;
        let last = ((t - lo) / h).floor() as i64;
        cuts.extend((first..=last).map(|i| t - i as f64 * h));
        cuts.retain(|&c| c >= lo && c <= hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * h);
        cuts.windows(2)
            .map(|w| {
                self.rule
                    .integrate_on(|s| weight(s) * self.density_unchecked(t, s), w[0], w[1])
            })
            .sum()
    }

    /// `P_x(occupation over [0, t] <= r)`.
    pub fn occupation_cdf(&self, t: f64, r: f64) -> Result<f64> {
        self.check_horizon(t)?;
        if r < 0.0 {
            return Ok(0.0);
        }
        let upper = r.min(t);
        Ok(self.survival_x(t) + self.integrate_density(t, 0.0, upper, |_| 1.0, &[]))
    }

    /// `P_x(sigma_r <= t) = 1 - P_x(occupation <= r)`; zero when `r >= t`.
    pub fn cum_parisian_prob(&self, r: f64, t: f64) -> Result<f64> {
        check_positive("r", r)?;
        self.check_horizon(t)?;
        if r >= t {
            return Ok(0.0);
        }
        Ok((1.0 - self.occupation_cdf(t, r)?).clamp(0.0, 1.0))
    }

    /// `P_x(kappa_q <= t) = 1 - E_x[exp(-q occupation)]`.
    pub fn exp_parisian_prob(&self, q: f64, t: f64) -> Result<f64> {
        check_positive("q", q)?;
        Ok((1.0 - self.laplace(t, q)?).clamp(0.0, 1.0))
    }

    /// The full law at horizon `t` with the density sampled at `n_grid` interior points.
    pub fn distribution(&self, t: f64, n_grid: usize) -> Result<OccupationDistribution> {
        self.check_horizon(t)?;
        if !(t > 0.0) {
            return Err(Error::Domain("distribution needs t > 0".into()));
        }
        let grid = uniform_interior_grid(t, n_grid);
        let density: Vec<f64> = grid.iter().map(|&s| self.density_unchecked(t, s)).collect();
        let mut cdf = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &s in &grid {
            acc += self.integrate_density(t, prev, s, |_| 1.0, &[]);
            cdf.push(acc);
            prev = s;
        }
        let mass = acc + self.integrate_density(t, prev, t, |_| 1.0, &[]);
        let dist = OccupationDistribution {
            horizon: t,
            atom_at_zero: self.survival_x(t),
            grid,
            density,
            cdf,
            mass,
        };
        let err = dist.normalization_error();
        if err.abs() > NORMALIZATION_LIMIT {
            return Err(Error::Normalization(err));
        }
        Ok(dist)
    }
}

impl OccupationLaw for ClKernel {
    fn atom(&self, t: f64) -> Result<f64> {
        self.check_horizon(t)?;
        Ok(self.survival_x(t))
    }

    fn laplace(&self, t: f64, q: f64) -> Result<f64> {
        self.check_horizon(t)?;
        // Geometric cuts resolve e^{-q s} when it decays within one grid step.
        let mut extra = Vec::new();
        let mut c = 0.25 / q;
        while c < self.a0.step().min(t) {
            extra.push(c);
            c *= 2.0;
        }
        Ok(self.survival_x(t) + self.integrate_density(t, 0.0, t, |s| (-q * s).exp(), &extra))
    }

    fn max_horizon(&self) -> f64 {
        self.horizon
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be > 0, got {v}")))
    }
}

/// Law of the occupation time over `[0, t]` from initial capital `x`.
pub fn occ_distribution_x(
    model: &CramerLundbergParams,
    x: f64,
    t: f64,
) -> Result<OccupationDistribution> {
    ClKernel::new(*model, x, t)?.distribution(t, CURVE_INTERVALS - 1)
}

/// `P_x(sigma_r <= t)`.
pub fn cum_parisian_prob_cl(model: &CramerLundbergParams, x: f64, r: f64, t: f64) -> Result<f64> {
    check_positive("r", r)?;
    check_positive("t", t)?;
    if r >= t {
        return Ok(0.0);
    }
    ClKernel::new(*model, x, t)?.cum_parisian_prob(r, t)
}

/// `P_x(kappa_q <= t)`.
pub fn exp_parisian_prob_cl(model: &CramerLundbergParams, x: f64, q: f64, t: f64) -> Result<f64> {
    check_positive("q", q)?;
    check_positive("t", t)?;
    ClKernel::new(*model, x, t)?.exp_parisian_prob(q, t)
}
