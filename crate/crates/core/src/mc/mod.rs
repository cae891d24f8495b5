//! Path simulation and Monte Carlo estimators for ruin events.
//!
//! Every path `i` draws from its own counter-based stream (see
//! [`StreamFamily`]), and aggregation is over fixed index blocks in index
//! order, so results are bit-identical for any thread count.

mod path;
mod rng;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{BrownianParams, CramerLundbergParams};

pub use path::{simulate_bm_path, simulate_cl_path, Excursion, PathSample};
pub use rng::StreamFamily;

const BLOCK: u64 = 4096;

/// Which surplus to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surplus {
    /// Exact event-driven paths.
    CramerLundberg(CramerLundbergParams),
    /// Euler grid with step `dt`.
    Brownian { params: BrownianParams, dt: f64 },
}

impl Surplus {
    pub fn simulate<R: Rng + ?Sized>(&self, x: f64, t: f64, rng: &mut R) -> Result<PathSample> {
        match self {
            Surplus::CramerLundberg(m) => simulate_cl_path(m, x, t, rng),
            Surplus::Brownian { params, dt } => simulate_bm_path(params, x, t, *dt, rng),
        }
    }
}

/// Ruin notions decidable from one path's excursions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuinEvent {
    /// `tau_0^- <= t`.
    Classical,
    /// `sigma_r <= t`: total time below zero exceeds `r`.
    Cumulative { r: f64 },
    /// `tau_r <= t`: a single excursion outlasts `r`.
    Parisian { r: f64 },
    /// `kappa_q <= t`: some excursion outlives its own `Exp(q)` clock.
    ExponentialParisian { q: f64 },
    /// `sigma_{e_q} <= t`: total time below zero exceeds one `Exp(q)` allowance.
    CumulativeExpAllowance { q: f64 },
}

impl RuinEvent {
    pub fn name(&self) -> String {
        match self {
            RuinEvent::Classical => "tau0".into(),
            RuinEvent::Cumulative { r } => format!("sigma_r(r={r})"),
            RuinEvent::Parisian { r } => format!("tau_r(r={r})"),
            RuinEvent::ExponentialParisian { q } => format!("kappa_q(q={q})"),
            RuinEvent::CumulativeExpAllowance { q } => format!("sigma_eq(q={q})"),
        }
    }

    fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            RuinEvent::Classical => return Ok(()),
            RuinEvent::Cumulative { r } | RuinEvent::Parisian { r } => ("r", r),
            RuinEvent::ExponentialParisian { q } | RuinEvent::CumulativeExpAllowance { q } => {
                ("q", q)
            }
        };
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{name} must be finite and > 0, got {v}"
            )))
        }
    }

    /// Indicator on `path`; `clock` supplies this event's exponential clocks.
    pub fn occurs<R: Rng + ?Sized>(&self, path: &PathSample, clock: &mut R) -> bool {
        match *self {
            RuinEvent::Classical => path.ruined(),
            RuinEvent::Cumulative { r } => path.occupation_time() > r,
            RuinEvent::Parisian { r } => path.excursions.iter().any(|e| e.length() > r),
            RuinEvent::ExponentialParisian { q } => {
                let exp = Exp::new(q).expect("q > 0");
                // One clock per excursion in path order, drawn only as needed.
                path.excursions
                    .iter()
                    .any(|e| e.length() > exp.sample(clock))
            }
            RuinEvent::CumulativeExpAllowance { q } => {
                path.ruined() && path.occupation_time() > Exp::new(q).expect("q > 0").sample(clock)
            }
        }
    }
}

/// Monte Carlo run size and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n_paths: u64, seed: u64) -> Result<Self> {
        if n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be >= 1".into()));
        }
        Ok(Self { n_paths, seed })
    }
}

/// A Monte Carlo probability with its binomial standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimator: String,
    pub probability: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub hits: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_counts(estimator: String, hits: u64, n_paths: u64, seed: u64) -> Self {
        let p = hits as f64 / n_paths as f64;
        Self {
            estimator,
            probability: p,
            std_error: (p * (1.0 - p) / n_paths as f64).sqrt(),
            n_paths,
            hits,
            seed,
        }
    }

    /// `|probability - value|` in standard errors (infinite if the error is zero and they differ).
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.probability - value).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

fn block_ranges(n: u64) -> Vec<(u64, u64)> {
    (0..n.div_ceil(BLOCK))
        .map(|b| (b * BLOCK, ((b + 1) * BLOCK).min(n)))
        .collect()
}

fn check_run(x: f64, t: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "initial capital must be >= 0, got {x}"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "horizon must be finite and > 0, got {t}"
        )));
    }
    Ok(())
}

/// Estimates every event on the same (coupled) paths.
pub fn estimate_events(
    sim: &Surplus,
    x: f64,
    t: f64,
    events: &[RuinEvent],
    cfg: McConfig,
) -> Result<Vec<Estimate>> {
    check_run(x, t)?;
    if events.len() as u64 >= rng::STREAMS_PER_PATH {
        return Err(Error::InvalidParameter(format!(
            "at most {} events per run",
            rng::STREAMS_PER_PATH - 1
        )));
    }
    for e in events {
        e.validate()?;
    }
    let family = StreamFamily::new(cfg.seed);
    let blocks: Vec<Vec<u64>> = block_ranges(cfg.n_paths)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut hits = vec![0u64; events.len()];
            for i in lo..hi {
                let path = sim.simulate(x, t, &mut family.path(i))?;
                for (j, e) in events.iter().enumerate() {
                    if e.occurs(&path, &mut family.lane(i, j as u64 + 1)) {
                        hits[j] += 1;
                    }
                }
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    Ok(events
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let hits = blocks.iter().map(|b| b[j]).sum();
            Estimate::from_counts(e.name(), hits, cfg.n_paths, cfg.seed)
        })
        .collect())
}

fn single(sim: &Surplus, x: f64, t: f64, event: RuinEvent, cfg: McConfig) -> Result<Estimate> {
    Ok(estimate_events(sim, x, t, &[event], cfg)?.remove(0))
}

/// `P_x(tau_0^- <= t)`.
pub fn estimate_tau0(sim: &Surplus, x: f64, t: f64, cfg: McConfig) -> Result<Estimate> {
    single(sim, x, t, RuinEvent::Classical, cfg)
}

/// `P_x(sigma_r <= t)`; exactly zero when `r >= t`.
pub fn estimate_sigma_r(sim: &Surplus, x: f64, r: f64, t: f64, cfg: McConfig) -> Result<Estimate> {
    single(sim, x, t, RuinEvent::Cumulative { r }, cfg)
}

/// `P_x(tau_r <= t)`.
pub fn estimate_tau_r(sim: &Surplus, x: f64, r: f64, t: f64, cfg: McConfig) -> Result<Estimate> {
    single(sim, x, t, RuinEvent::Parisian { r }, cfg)
}

/// `P_x(kappa_q <= t)` with excursion-marked clocks.
pub fn estimate_kappa_q(sim: &Surplus, x: f64, q: f64, t: f64, cfg: McConfig) -> Result<Estimate> {
    single(sim, x, t, RuinEvent::ExponentialParisian { q }, cfg)
}

/// `P_x(sigma_{e_q} <= t)` with one exponential allowance per path.
pub fn estimate_sigma_eq(sim: &Surplus, x: f64, q: f64, t: f64, cfg: McConfig) -> Result<Estimate> {
    single(sim, x, t, RuinEvent::CumulativeExpAllowance { q }, cfg)
}

/// Simulated law of the occupation time over `[0, t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationSample {
    pub horizon: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// Paths with zero occupation.
    pub zero_count: u64,
    /// Counts of positive occupation times in `bins` equal bins over `(0, t]`.
    pub counts: Vec<u64>,
    pub mean: f64,
    pub mean_square: f64,
}

impl OccupationSample {
    pub fn bin_width(&self) -> f64 {
        self.horizon / self.counts.len() as f64
    }

    /// Empirical `P(occupation <= k * width)` for `k = 0..=bins`.
    pub fn ecdf_at_edges(&self) -> Vec<f64> {
        let n = self.n_paths as f64;
        let mut acc = self.zero_count;
        let mut out = vec![acc as f64 / n];
        for &c in &self.counts {
            acc += c;
            out.push(acc as f64 / n);
        }
        out
    }

    /// Empirical `P(occupation <= s)` rounded to the nearest bin edge below.
    pub fn ecdf(&self, s: f64) -> f64 {
        let k = ((s / self.bin_width()).floor().max(0.0) as usize).min(self.counts.len());
        let hits = self.zero_count + self.counts[..k].iter().sum::<u64>();
        hits as f64 / self.n_paths as f64
    }

    /// Standard error of the sample mean.
    pub fn mean_std_error(&self) -> f64 {
        let n = self.n_paths as f64;
        ((self.mean_square - self.mean * self.mean).max(0.0) / (n - 1.0).max(1.0)).sqrt()
    }

    /// Standard error of an empirical probability `p`.
    pub fn std_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.n_paths as f64).sqrt()
    }
}

/// Occupation-time histogram over `n_paths`.
pub fn simulate_occupation(
    sim: &Surplus,
    x: f64,
    t: f64,
    bins: usize,
    cfg: McConfig,
) -> Result<OccupationSample> {
    check_run(x, t)?;
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be >= 1".into()));
    }
    let family = StreamFamily::new(cfg.seed);
    let width = t / bins as f64;
    let blocks: Vec<(u64, Vec<u64>, f64, f64)> = block_ranges(cfg.n_paths)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut counts = vec![0u64; bins];
            let (mut zero, mut sum, mut sum_sq) = (0u64, 0.0, 0.0);
            for i in lo..hi {
                let occ = sim.simulate(x, t, &mut family.path(i))?.occupation_time();
                sum += occ;
                sum_sq += occ * occ;
                if occ == 0.0 {
                    zero += 1;
                } else {
                    // Bin k holds (k w, (k+1) w]; the top edge is inclusive.
                    let k = ((occ / width).ceil() as usize).clamp(1, bins) - 1;
                    counts[k] += 1;
                }
            }
            Ok((zero, counts, sum, sum_sq))
        })
        .collect::<Result<_>>()?;
    let mut counts = vec![0u64; bins];
    let (mut zero_count, mut sum, mut sum_sq) = (0u64, 0.0, 0.0);
    for (z, c, s, s2) in &blocks {
        zero_count += z;
        sum += s;
        sum_sq += s2;
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
    }
    Ok(OccupationSample {
        horizon: t,
        n_paths: cfg.n_paths,
        seed: cfg.seed,
        zero_count,
        counts,
        mean: sum / cfg.n_paths as f64,
        mean_square: sum_sq / cfg.n_paths as f64,
    })
}

/// Occupation histogram of Brownian grid paths.
pub fn simulate_bm_occupation(
    params: &BrownianParams,
    x: f64,
    t: f64,
    dt: f64,
    bins: usize,
    cfg: McConfig,
) -> Result<OccupationSample> {
    simulate_occupation(
        &Surplus::Brownian {
            params: *params,
            dt,
        },
        x,
        t,
        bins,
        cfg,
    )
}

/// Pathwise comparison of ruin indicators on coupled paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub n_paths: u64,
    pub classical: u64,
    pub cumulative: u64,
    pub parisian: u64,
    /// Paths with `tau_r <= t` but not `sigma_r <= t`.
    pub parisian_without_cumulative: u64,
    /// Paths with `tau_r <= t` but not `tau_0^- <= t`.
    pub parisian_without_classical: u64,
    /// Paths with `sigma_r <= t` but not `tau_0^- <= t`.
    pub cumulative_without_classical: u64,
}

impl OrderingReport {
    pub fn violations(&self) -> u64 {
        self.parisian_without_cumulative
            + self.parisian_without_classical
            + self.cumulative_without_classical
    }
}

/// Checks `1{tau_r <= t} <= 1{sigma_r <= t} <= 1{tau_0^- <= t}` on every path.
pub fn check_orderings(
    sim: &Surplus,
    x: f64,
    r: f64,
    t: f64,
    cfg: McConfig,
) -> Result<OrderingReport> {
    check_run(x, t)?;
    RuinEvent::Cumulative { r }.validate()?;
    let family = StreamFamily::new(cfg.seed);
    let blocks: Vec<[u64; 6]> = block_ranges(cfg.n_paths)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = [0u64; 6];
            for i in lo..hi {
                let path = sim.simulate(x, t, &mut family.path(i))?;
                let tau0 = path.ruined();
                let sigma = path.occupation_time() > r;
                let tau_r = path.excursions.iter().any(|e| e.length() > r);
                let flags = [
                    tau0,
                    sigma,
                    tau_r,
                    tau_r && !sigma,
                    tau_r && !tau0,
                    sigma && !tau0,
                ];
                for (a, f) in acc.iter_mut().zip(flags) {
                    *a += f as u64;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut tot = [0u64; 6];
    for b in &blocks {
        for (a, v) in tot.iter_mut().zip(b) {
            *a += v;
        }
    }
    Ok(OrderingReport {
        n_paths: cfg.n_paths,
        classical: tot[0],
        cumulative: tot[1],
        parisian: tot[2],
        parisian_without_cumulative: tot[3],
        parisian_without_classical: tot[4],
        cumulative_without_classical: tot[5],
    })
}
