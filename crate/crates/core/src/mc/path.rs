use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{BrownianParams, CramerLundbergParams};

/// A maximal interval on which the path is strictly below zero, clipped to
/// the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excursion {
    pub start: f64,
    pub end: f64,
    /// `false` when the horizon cut the excursion short.
    pub completed: bool,
}

impl Excursion {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// One simulated trajectory on `[0, horizon]` and its excursions below zero.
///
/// For the Cramér–Lundberg model the jump list is the whole path: linear with
/// slope `c` between jumps. Brownian grid paths carry no jumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub x: f64,
    pub horizon: f64,
    pub premium_rate: f64,
    pub jump_times: Vec<f64>,
    pub jump_sizes: Vec<f64>,
    pub excursions: Vec<Excursion>,
}

impl PathSample {
    /// Time spent strictly below zero on `[0, horizon]`.
    pub fn occupation_time(&self) -> f64 {
        self.excursions.iter().map(Excursion::length).sum()
    }

    /// `tau_0^- <= horizon`.
    pub fn ruined(&self) -> bool {
        !self.excursions.is_empty()
    }

    pub fn ruin_time(&self) -> Option<f64> {
        self.excursions.first().map(|e| e.start)
    }

    /// Longest single excursion, clipped to the horizon.
    pub fn longest_excursion(&self) -> f64 {
        self.excursions
            .iter()
            .map(Excursion::length)
            .fold(0.0, f64::max)
    }

    /// `X_s` for a jump path: `x + c s - sum of jumps at times <= s`.
    pub fn level_at(&self, s: f64) -> f64 {
        let n = self.jump_times.partition_point(|&u| u <= s);
        self.x + self.premium_rate * s - self.jump_sizes[..n].iter().sum::<f64>()
    }
}

fn check_inputs(x: f64, t: f64) -> Result<()> {
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

/// Exact event-driven Cramér–Lundberg path on `[0, t]`.
///
/// Excursion end points come from the crossing algebra: from level `y < 0`
/// the path returns to zero after `-y / c` unless a claim arrives first.
pub fn simulate_cl_path<R: Rng + ?Sized>(
    model: &CramerLundbergParams,
    x: f64,
    t: f64,
    rng: &mut R,
) -> Result<PathSample> {
    check_inputs(x, t)?;
    let c = model.c();
    let arrivals = Exp::new(model.lambda()).expect("lambda > 0");
    let claims = Exp::new(model.alpha()).expect("alpha > 0");
    let mut path = PathSample {
        x,
        horizon: t,
        premium_rate: c,
        jump_times: Vec::new(),
        jump_sizes: Vec::new(),
        excursions: Vec::new(),
    };
    let (mut time, mut level) = (0.0, x);
    let mut open: Option<f64> = None;
    loop {
        let next = time + arrivals.sample(rng);
        if let Some(start) = open {
            let back = time - level / c;
            if back <= next.min(t) {
                path.excursions.push(Excursion {
                    start,
                    end: back,
                    completed: true,
                });
                open = None;
            }
        }
        if next > t {
            if let Some(start) = open {
                path.excursions.push(Excursion {
                    start,
                    end: t,
                    completed: false,
                });
            }
            return Ok(path);
        }
        let size = claims.sample(rng);
        level += c * (next - time) - size;
        time = next;
        path.jump_times.push(next);
        path.jump_sizes.push(size);
        if level < 0.0 && open.is_none() {
            open = Some(next);
        }
    }
}

/// Euler grid path of the Brownian surplus with step `t / round(t / dt)`.
///
/// Occupation time is `dt * #{grid points k >= 1 with X_k < 0}`; runs of
/// negative grid points form the excursions. Not bias-corrected: the
/// occupation and first-passage errors are `O(sqrt(dt))`.
pub fn simulate_bm_path<R: Rng + ?Sized>(
    params: &BrownianParams,
    x: f64,
    t: f64,
    dt: f64,
    rng: &mut R,
) -> Result<PathSample> {
    check_inputs(x, t)?;
    if !(dt > 0.0 && dt <= t) {
        return Err(Error::Domain(format!("dt must be in (0, t], got {dt}")));
    }
    let n = (t / dt).round().max(1.0) as usize;
    let h = t / n as f64;
    let drift = params.c() * h;
    let vol = params.sigma() * h.sqrt();
    let mut path = PathSample {
        x,
        horizon: t,
        premium_rate: params.c(),
        jump_times: Vec::new(),
        jump_sizes: Vec::new(),
        excursions: Vec::new(),
    };
    let mut level = x;
    let mut run: Option<usize> = None;
    for k in 1..=n {
        let z: f64 = StandardNormal.sample(rng);
        level += drift + vol * z;
        if level < 0.0 {
            run.get_or_insert(k);
        } else if let Some(k1) = run.take() {
            path.excursions.push(Excursion {
                start: (k1 - 1) as f64 * h,
                end: (k - 1) as f64 * h,
                completed: true,
            });
        }
    }
    if let Some(k1) = run {
        path.excursions.push(Excursion {
            start: (k1 - 1) as f64 * h,
            end: t,
            completed: false,
        });
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::rng::StreamFamily;

    #[test]
    fn no_claims_no_occupation() {
        let m = CramerLundbergParams::new(2.0, 1e-9, 1.0).unwrap();
        let fam = StreamFamily::new(1);
        for i in 0..1000 {
            let p = simulate_cl_path(&m, 0.0, 1.0, &mut fam.path(i)).unwrap();
            assert_eq!(p.occupation_time(), 0.0);
            assert!(!p.ruined());
        }
    }

    #[test]
    fn excursions_follow_crossing_algebra() {
        let m = CramerLundbergParams::new(2.0, 1.0, 1.0).unwrap();
        let fam = StreamFamily::new(9);
        for i in 0..2000 {
            let p = simulate_cl_path(&m, 0.5, 3.0, &mut fam.path(i)).unwrap();
            let mut last_end = 0.0;
            for e in &p.excursions {
                assert!(e.start >= last_end && e.end >= e.start && e.end <= p.horizon);
                last_end = e.end;
                // Starts at a claim that takes the level below zero.
                let j = p
                    .jump_times
                    .iter()
                    .position(|&u| u == e.start)
                    .expect("excursion starts at a jump");
                assert!(
                    p.level_at(e.start) < 0.0
                        && (j == 0 || p.level_at(p.jump_times[j] - 1e-12) >= -1e-9)
                );
                if e.completed {
                    // Level at the end is zero to rounding.
                    assert!(
                        p.level_at(e.end).abs() < 1e-9,
                        "level {}",
                        p.level_at(e.end)
                    );
                }
            }
            assert!(p.occupation_time() >= 0.0 && p.occupation_time() <= p.horizon);
        }
    }

    #[test]
    fn single_claim_excursion_length() {
        // One claim to level y < 0 with recovery before the horizon lasts -y/c.
        let m = CramerLundbergParams::new(2.0, 0.5, 1.0).unwrap();
        let fam = StreamFamily::new(3);
        let mut seen = 0;
        for i in 0..20_000 {
            let p = simulate_cl_path(&m, 0.2, 5.0, &mut fam.path(i)).unwrap();
            if p.jump_times.len() == 1 && p.excursions.len() == 1 && p.excursions[0].completed {
                let y = p.level_at(p.jump_times[0]);
                assert!((p.occupation_time() - (-y / m.c())).abs() < 1e-12);
                seen += 1;
            }
        }
        assert!(seen > 100);
    }

    #[test]
    fn brownian_grid_occupation_counts_points() {
        let b = BrownianParams::new(0.0f64.max(1e-9), 1.0).unwrap();
        let fam = StreamFamily::new(5);
        let p = simulate_bm_path(&b, 0.0, 1.0, 1e-3, &mut fam.path(0)).unwrap();
        let occ = p.occupation_time();
        let steps = (occ / 1e-3).round();
        assert!((occ - steps * 1e-3).abs() < 1e-9);
        assert!(simulate_bm_path(&b, 0.0, 1.0, 0.0, &mut fam.path(0)).is_err());
    }
}
