//! Self-checks grouped into suites. Identities need no simulation; the
//! transform suite works in the Laplace domain; the oracle suite simulates.
//!
//! Each check records the observed deviation next to its tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::{cum_parisian_prob_bm, occ_cdf_bm, occ_distribution_bm, BrownianLaw};
use crate::cl::{occ_distribution_x, survival_x, survival_zero, ClKernel};
use crate::error::Result;
use crate::laplace::{
    closed_dlt_x, closed_dlt_zero, closed_laplace_survival_zero, numeric_dlt, numeric_laplace_atom,
    MIN_TRUNCATION,
};
use crate::mc::{
    check_orderings, estimate_events, simulate_bm_occupation, McConfig, RuinEvent, Surplus,
};
use crate::models::{BrownianParams, CramerLundbergParams, ModelParams};
use crate::special::{bessel_i_integral, bessel_i_series, BesselOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Transform,
    Oracle,
    All,
}

/// One comparison: passes when `observed <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Acceptance criterion number this check belongs to.
    pub criterion: u32,
    pub name: String,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(criterion: u32, name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            observed,
            tolerance,
            passed: observed <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Checks of one criterion.
    pub fn criterion(&self, n: u32) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.criterion == n)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

/// Path budgets and seed for the Monte Carlo suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub cl_paths: u64,
    pub bm_paths: u64,
    pub ordering_paths: u64,
    pub dt: f64,
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            cl_paths: 1_000_000,
            bm_paths: 1_000_000,
            ordering_paths: 100_000,
            dt: 1e-4,
            seed: 20_240_601,
        }
    }
}

impl OracleBudget {
    /// Same seed and step, every path count set to `n`.
    pub fn uniform(n: u64) -> Self {
        Self {
            cl_paths: n,
            bm_paths: n,
            ordering_paths: n,
            ..Self::default()
        }
    }
}

fn cl(lambda: f64, alpha: f64, c: f64) -> CramerLundbergParams {
    CramerLundbergParams::new(c, lambda, alpha).expect("positive parameters")
}

/// Criterion 1: `a_0 = 1` for random parameters, with and without net profit.
pub fn exact_at_zero() -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut report = Report::default();
    for i in 0..20 {
        let m = cl(
            rng.random_range(0.1..5.0),
            rng.random_range(0.1..5.0),
            rng.random_range(0.1..5.0),
        );
        let dev = (survival_zero(&m, 0.0)? - 1.0).abs();
        report.checks.push(Check::new(
            1,
            format!(
                "a_0 = 1, set {i} (c={:.3}, lambda={:.3}, alpha={:.3})",
                m.c(),
                m.lambda(),
                m.alpha()
            ),
            dev,
            1e-10,
        ));
    }
    Ok(report)
}

/// Criterion 2: `a_200` against `(1 - lambda/(c alpha))_+` at `c = 2`, `alpha = 1`.
pub fn ultimate_survival() -> Result<Report> {
    let mut report = Report::default();
    for ratio in [0.25, 0.5, 0.9, 1.0, 1.5] {
        let m = cl(2.0 * ratio, 1.0, 2.0);
        let limit = (1.0 - ratio).max(0.0);
        let dev = (survival_zero(&m, 200.0)? - limit).abs();
        report.checks.push(Check::new(
            2,
            format!("a_200 vs ultimate survival, lambda/(c alpha) = {ratio}"),
            dev,
            1e-6,
        ));
    }
    Ok(report)
}

/// Criterion 3: atom plus density mass equals one.
pub fn normalization() -> Result<Report> {
    let mut cases = Vec::new();
    for (l, a, c) in [(1.0, 1.0, 2.0), (2.0, 1.0, 1.0), (1.0, 2.0, 1.0)] {
        for x in [0.0, 0.5, 2.0] {
            for t in [0.5, 1.0, 5.0] {
                cases.push((l, a, c, x, t));
            }
        }
    }
    let mut checks: Vec<Check> = cases
        .par_iter()
        .map(|&(l, a, c, x, t)| {
            let d = occ_distribution_x(&cl(l, a, c), x, t)?;
            Ok(Check::new(
                3,
                format!("CL normalization (lambda={l}, alpha={a}, c={c}, x={x}, t={t})"),
                d.normalization_error().abs(),
                1e-6,
            ))
        })
        .collect::<Result<_>>()?;
    for (c, s) in [(1.0, 1.0), (0.5, 2.0)] {
        let m = BrownianParams::new(c, s)?;
        for t in [0.5, 1.0, 5.0] {
            let d = occ_distribution_bm(&m, t, 99)?;
            checks.push(Check::new(
                3,
                format!("BM normalization (c={c}, sigma={s}, t={t})"),
                d.normalization_error().abs(),
                1e-6,
            ));
        }
    }
    Ok(Report { checks })
}

/// Criterion 7: cumulative Parisian ruin tends to classical ruin as `r -> 0`.
pub fn small_allowance_limit() -> Result<Report> {
    let m = cl(1.0, 1.0, 2.0);
    let ker = ClKernel::new(m, 1.0, 1.0)?;
    let ruin = 1.0 - ker.survival_x(1.0);
    let rs = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let gaps = rs
        .iter()
        .map(|&r| Ok(ruin - ker.cum_parisian_prob(r, 1.0)?))
        .collect::<Result<Vec<f64>>>()?;
    let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_rise = gaps
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut report = Report::default();
    // Positivity and monotonicity are encoded as `observed <= 0`.
    report.checks.push(Check::new(
        7,
        "gap to classical ruin is positive (minus smallest gap)",
        -min_gap,
        0.0,
    ));
    report.checks.push(Check::new(
        7,
        "gap decreases as r shrinks (largest increase)",
        max_rise,
        0.0,
    ));
    report
        .checks
        .push(Check::new(7, "gap at r = 0.0125", gaps[4], 0.02));
    Ok(report)
}

/// Criterion 10: Bessel integral route against the series, and the recurrence.
pub fn special_functions() -> Result<Report> {
    let mut points: Vec<f64> = (0..=40)
        .map(|i| 1e-3 * f64::powf(5e4, i as f64 / 40.0))
        .collect();
    points.extend([1.0, 10.0, 15.0, 30.0, 50.0]);
    let mut route = 0.0f64;
    let mut recurrence = 0.0f64;
    for &s in &points {
        for order in [BesselOrder::Zero, BesselOrder::One, BesselOrder::Two] {
            let a = bessel_i_series(order, s)?;
            let b = bessel_i_integral(order, s)?;
            route = route.max(((a - b) / a).abs());
        }
        for f in [bessel_i_series, bessel_i_integral] {
            let (i0, i1, i2) = (
                f(BesselOrder::Zero, s)?,
                f(BesselOrder::One, s)?,
                f(BesselOrder::Two, s)?,
            );
            recurrence = recurrence.max(((0.5 * s * (i0 - i2) - i1) / i1).abs());
        }
    }
    Ok(Report {
        checks: vec![
            Check::new(
                10,
                "Bessel series vs integral, max relative deviation on [1e-3, 50]",
                route,
                1e-10,
            ),
            Check::new(
                10,
                "I1 = (z/2)(I0 - I2), max relative deviation",
                recurrence,
                1e-10,
            ),
        ],
    })
}

/// Criteria 1, 2, 3, 7 and 10.
pub fn identities() -> Result<Report> {
    let mut report = exact_at_zero()?;
    report.extend(ultimate_survival()?);
    report.extend(normalization()?);
    report.extend(small_allowance_limit()?);
    report.extend(special_functions()?);
    Ok(report)
}

const TRANSFORM_GRID: [f64; 3] = [0.5, 2.0, 4.0];

fn transform_checks<L: crate::occupation::OccupationLaw + Sync>(
    label: &str,
    law: &L,
    closed: impl Fn(f64, f64) -> Result<f64> + Sync,
) -> Result<Vec<Check>> {
    let pairs: Vec<(f64, f64)> = TRANSFORM_GRID
        .iter()
        .flat_map(|&p| TRANSFORM_GRID.map(|q| (p, q)))
        .collect();
    pairs
        .par_iter()
        .map(|&(p, q)| {
            let numeric = numeric_dlt(law, p, q, MIN_TRUNCATION / p)?;
            let dev = (numeric - closed(p, q)?).abs();
            Ok(Check::new(
                4,
                format!("{label} double transform at p={p}, q={q}"),
                dev,
                1e-4,
            ))
        })
        .collect()
}

/// Criterion 4: numerical double transforms against the closed forms.
pub fn transform() -> Result<Report> {
    let t_max = MIN_TRUNCATION / TRANSFORM_GRID[0];
    let m = cl(1.0, 1.0, 2.0);
    let mp: ModelParams = m.into();
    let b = BrownianParams::new(1.0, 1.0)?;
    let bp: ModelParams = b.into();
    let mut checks = Vec::new();

    let zero = ClKernel::new(m, 0.0, t_max)?;
    checks.extend(transform_checks("CL x=0", &zero, |p, q| {
        closed_dlt_zero(&mp, p, q)
    })?);
    checks.extend(transform_checks(
        "BM x=0",
        &BrownianLaw::new(b, 0.0)?,
        |p, q| closed_dlt_zero(&bp, p, q),
    )?);
    for x in [0.5, 1.0] {
        let ker = ClKernel::new(m, x, t_max)?;
        checks.extend(transform_checks(&format!("CL x={x}"), &ker, |p, q| {
            closed_dlt_x(&m, x, p, q)
        })?);
    }
    for p in [0.5, 1.0, 2.0] {
        let numeric = numeric_laplace_atom(&zero, p, MIN_TRUNCATION / p)?;
        let dev = (numeric - closed_laplace_survival_zero(&mp, p)?).abs();
        checks.push(Check::new(
            4,
            format!("transform of a_t = 1/(c Phi(p)) at p={p}"),
            dev,
            1e-5,
        ));
    }
    Ok(Report { checks })
}

fn z_check(criterion: u32, name: String, estimate: &crate::mc::Estimate, value: f64) -> Check {
    Check::new(
        criterion,
        name,
        (estimate.probability - value).abs(),
        3.0 * estimate.std_error,
    )
}

/// Criteria 5 and 6: exact Cramér–Lundberg paths against the formulas.
pub fn cl_oracle(budget: &OracleBudget) -> Result<Report> {
    let m = cl(1.0, 1.0, 2.0);
    let (t, r, q) = (1.0, 0.2, 2.0);
    let sim = Surplus::CramerLundberg(m);
    let events = [
        RuinEvent::Cumulative { r },
        RuinEvent::Classical,
        RuinEvent::CumulativeExpAllowance { q },
        RuinEvent::ExponentialParisian { q },
    ];
    let mut report = Report::default();
    for x in [0.0, 1.0] {
        let ker = ClKernel::new(m, x, t)?;
        let cum = ker.cum_parisian_prob(r, t)?;
        let classical = 1.0 - survival_x(&m, x, t)?;
        let exp = ker.exp_parisian_prob(q, t)?;
        let cfg = McConfig::new(budget.cl_paths, budget.seed)?;
        let est = estimate_events(&sim, x, t, &events, cfg)?;
        report.checks.push(z_check(
            5,
            format!(
                "P(sigma_r <= t), x={x}, r={r}: MC {:.6}",
                est[0].probability
            ),
            &est[0],
            cum,
        ));
        report.checks.push(z_check(
            5,
            format!("P(tau_0 <= t), x={x}: MC {:.6}", est[1].probability),
            &est[1],
            classical,
        ));
        report.checks.push(z_check(
            5,
            format!(
                "P(sigma_eq <= t), x={x}, q={q}: MC {:.6}",
                est[2].probability
            ),
            &est[2],
            exp,
        ));
        report.checks.push(z_check(
            6,
            format!(
                "P(kappa_q <= t), x={x}, q={q}: MC {:.6}",
                est[3].probability
            ),
            &est[3],
            exp,
        ));
    }
    Ok(report)
}

/// Criterion 8: Brownian formulas against grid paths, with a `2 sqrt(dt)` bias allowance.
pub fn bm_oracle(budget: &OracleBudget) -> Result<Report> {
    let b = BrownianParams::new(1.0, 1.0)?;
    let (t, r, dt) = (1.0, 0.1, budget.dt);
    let bias = 2.0 * dt.sqrt();
    let cfg = McConfig::new(budget.bm_paths, budget.seed)?;
    let mut report = Report::default();
    let bins = 100;
    for x in [0.0, 0.5] {
        let sample = simulate_bm_occupation(&b, x, t, dt, bins, cfg)?;
        let tail_mc = 1.0 - sample.ecdf(r);
        let tail = cum_parisian_prob_bm(&b, x, r, t)?;
        let se = sample.std_error(tail_mc);
        let dev = (tail_mc - tail).abs();
        report.checks.push(Check::new(
            8,
            format!("P(sigma_r <= t), x={x}, r={r}: MC {tail_mc:.6}"),
            dev,
            3.0 * se + bias,
        ));
        if x == 0.0 {
            for s in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let mc = sample.ecdf(s);
                let exact = occ_cdf_bm(&b, t, s)?;
                report.checks.push(Check::new(
                    8,
                    format!("occupation CDF at s={s}, x=0: MC {mc:.6}"),
                    (mc - exact).abs(),
                    3.0 * sample.std_error(mc) + bias,
                ));
            }
        }
    }
    Ok(report)
}

/// Criterion 9: pathwise ordering of the three ruin indicators.
pub fn orderings(budget: &OracleBudget) -> Result<Report> {
    let mut report = Report::default();
    let cfg = McConfig::new(budget.ordering_paths, budget.seed)?;
    let m = cl(1.0, 1.0, 2.0);
    for x in [0.0, 1.0] {
        let rep = check_orderings(&Surplus::CramerLundberg(m), x, 0.2, 1.0, cfg)?;
        report.checks.push(Check::new(
            9,
            format!("CL ordering violations, x={x}, r=0.2"),
            rep.violations() as f64,
            0.0,
        ));
    }
    let b = BrownianParams::new(1.0, 1.0)?;
    let sim = Surplus::Brownian {
        params: b,
        dt: 1e-3,
    };
    let rep = check_orderings(&sim, 0.5, 0.1, 1.0, cfg)?;
    report.checks.push(Check::new(
        9,
        "BM ordering violations, x=0.5, r=0.1",
        rep.violations() as f64,
        0.0,
    ));
    Ok(report)
}

/// Criteria 5, 6, 8 and 9.
pub fn oracle(budget: &OracleBudget) -> Result<Report> {
    let mut report = cl_oracle(budget)?;
    report.extend(bm_oracle(budget)?);
    report.extend(orderings(budget)?);
    Ok(report)
}

pub fn run(suite: Suite, budget: &OracleBudget) -> Result<Report> {
    match suite {
        Suite::Identities => identities(),
        Suite::Transform => transform(),
        Suite::Oracle => oracle(budget),
        Suite::All => {
            let mut report = identities()?;
            report.extend(transform()?);
            report.extend(oracle(budget)?);
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_passes_at_tolerance() {
        assert!(Check::new(1, "a", 1e-10, 1e-10).passed);
        assert!(!Check::new(1, "a", 2e-10, 1e-10).passed);
        assert!(!Check::new(1, "a", f64::NAN, 1.0).passed);
    }

    #[test]
    fn small_oracle_budget_runs() {
        let budget = OracleBudget {
            cl_paths: 20_000,
            bm_paths: 2000,
            ordering_paths: 5000,
            dt: 1e-2,
            seed: 3,
        };
        let rep = orderings(&budget).unwrap();
        assert!(rep.passed());
        let rep = cl_oracle(&budget).unwrap();
        assert_eq!(rep.checks.len(), 8);
    }
}
