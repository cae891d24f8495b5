//! Fixed Gauss rules and a globally adaptive Gauss–Kronrod integrator.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute error floor used by every adaptive routine.
pub const ABS_FLOOR: f64 = 1e-14;

/// Default node count for Chebyshev-weighted integrals.
pub const CHEBYSHEV_DEFAULT_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// Gauss–Chebyshev of the second kind, weight `sqrt(1 - u^2)` on `[-1, 1]`.
    Chebyshev2,
    /// Gauss–Legendre, unit weight on `[-1, 1]`.
    Legendre,
}

/// Nodes and weights on the canonical interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// `n`-point Gauss–Chebyshev rule of the second kind:
    /// `u_k = cos(k pi / (n+1))`, `w_k = pi / (n+1) sin^2(k pi / (n+1))`.
    pub fn chebyshev2(n: usize) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let h = PI / (n + 1) as f64;
        let (nodes, weights) = (1..=n)
            .map(|k| {
                let phi = k as f64 * h;
                (phi.cos(), h * phi.sin().powi(2))
            })
            .unzip();
        Self {
            kind: RuleKind::Chebyshev2,
            nodes,
            weights,
        }
    }

    /// `n`-point Gauss–Legendre rule, nodes from Newton iteration on `P_n`.
    pub fn legendre(n: usize) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            kind: RuleKind::Legendre,
            nodes,
            weights,
        }
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on `[-1, 1]`; the weight function is implied by the kind.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }

    /// Legendre rule mapped affinely onto `[a, b]`.
    pub fn integrate_on<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        debug_assert_eq!(self.kind, RuleKind::Legendre);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self.integrate(|u| f(mid + half * u))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// `int_{-1}^{1} sqrt(1-u^2) g(u) du` by Gauss–Chebyshev (second kind),
/// doubling the node count from `CHEBYSHEV_DEFAULT_NODES` until two
/// successive values agree to `rel_tol`.
pub fn chebyshev2_converged<F: Fn(f64) -> f64>(g: F, rel_tol: f64) -> Result<f64> {
    let mut n = CHEBYSHEV_DEFAULT_NODES;
    let mut prev = QuadratureRule::chebyshev2(n).integrate(&g);
    while n < 1 << 18 {
        n *= 2;
        let cur = QuadratureRule::chebyshev2(n).integrate(&g);
        if (cur - prev).abs() <= rel_tol * cur.abs() + ABS_FLOOR * 1e-3 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        name: "chebyshev2",
        estimate: prev,
        error: f64::NAN,
    })
}

/// `int_0^pi h(phi) dphi` by the trapezoid rule with endpoints, doubling
/// from `CHEBYSHEV_DEFAULT_NODES` panels and reusing earlier nodes.
///
/// With `h(phi) = sin^2(phi) g(cos phi)` this is the Chebyshev rule above,
/// but `h` may carry a finite endpoint value where `g` itself blows up.
pub fn angle_trapezoid_converged<F: Fn(f64) -> f64>(h: F, rel_tol: f64) -> Result<f64> {
    let mut n = CHEBYSHEV_DEFAULT_NODES;
    let mut step = PI / n as f64;
    let mut sum = 0.5 * (h(0.0) + h(PI)) + (1..n).map(|k| h(k as f64 * step)).sum::<f64>();
    let mut prev = sum * step;
    while n < 1 << 20 {
        sum += (0..n).map(|k| h((k as f64 + 0.5) * step)).sum::<f64>();
        n *= 2;
        step *= 0.5;
        let cur = sum * step;
        if (cur - prev).abs() <= rel_tol * cur.abs() + ABS_FLOOR * 1e-3 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        name: "angle_trapezoid",
        estimate: prev,
        error: f64::NAN,
    })
}

/// Value of an adaptive integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, v) in fv.iter_mut().enumerate() {
        let x = half * XGK[j];
        let (f1, f2) = (f(center - x), f(center + x));
        *v = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        a,
        b,
        value,
        error: err,
    }
}

/// Globally adaptive 15-point Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// Converges when the summed error estimate is at most
/// `rel_tol * |result| + ABS_FLOOR`. Otherwise returns
/// [`Error::Quadrature`] carrying the best estimate.
pub fn adaptive_integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<Integral> {
    adaptive_integrate_named("adaptive", f, a, b, rel_tol)
}

pub(crate) fn adaptive_integrate_named<F: FnMut(f64) -> f64>(
    name: &'static str,
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<Integral> {
    const MAX_PANELS: usize = 4000;
    if !(a < b) {
        if a == b {
            return Ok(Integral {
                value: 0.0,
                error: 0.0,
            });
        }
        return Err(Error::Domain(format!(
            "integration bounds must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Domain(format!("rel_tol must be > 0, got {rel_tol}")));
    }
    let first = kronrod15(&mut f, a, b);
    let (mut total, mut err) = (first.value, first.error);
    let mut heap = BinaryHeap::from([first]);
    while err > rel_tol * total.abs() + ABS_FLOOR {
        if heap.len() >= MAX_PANELS {
            return Err(Error::Quadrature {
                name,
                estimate: total,
                error: err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(Error::Quadrature {
                name,
                estimate: total,
                error: err,
            });
        }
        let left = kronrod15(&mut f, worst.a, mid);
        let right = kronrod15(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of incremental updates.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    if !f64::is_finite(value) {
        return Err(Error::Quadrature {
            name,
            estimate: value,
            error,
        });
    }
    Ok(Integral { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev2_constant_is_half_pi() {
        let r = QuadratureRule::chebyshev2(64);
        assert!((r.integrate(|_| 1.0) - PI / 2.0).abs() < 1e-14);
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn chebyshev2_polynomial_exactness() {
        // int sqrt(1-u^2) u^{2k} du = pi (2k)! / (2^{2k} k! (k+1)!) / 1 ... via Beta
        let exact = |k: i32| {
            // B(k+1/2, 3/2) = Gamma(k+1/2) Gamma(3/2) / Gamma(k+2)
            let mut g = PI.sqrt(); // Gamma(1/2)
            for j in 0..k {
                g *= j as f64 + 0.5;
            }
            let g32 = 0.5 * PI.sqrt();
            let mut gk2 = 1.0;
            for j in 1..=(k + 1) {
                gk2 *= j as f64;
            }
            g * g32 / gk2
        };
        for n in [3usize, 8, 17] {
            let r = QuadratureRule::chebyshev2(n);
            for k in 0..n as i32 {
                let v = r.integrate(|u| u.powi(2 * k));
                assert!((v - exact(k)).abs() < 1e-13, "n={n} k={k}");
                let odd = r.integrate(|u| u.powi(2 * k + 1));
                assert!(odd.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn legendre_polynomial_exactness() {
        for n in [1usize, 2, 5, 10, 21] {
            let r = QuadratureRule::legendre(n);
            assert!((r.weights().iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for d in 0..(2 * n) as i32 {
                let v = r.integrate(|u| u.powi(d));
                let exact = if d % 2 == 1 {
                    0.0
                } else {
                    2.0 / (d + 1) as f64
                };
                assert!((v - exact).abs() < 1e-13, "n={n} d={d}: {v}");
            }
        }
        let r = QuadratureRule::legendre(8);
        assert!((r.integrate_on(|x| x.exp(), 0.0, 2.0) - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn chebyshev2_rational_against_trapezoid_oracle() {
        // int sqrt(1-u^2)/(b + a u) du, oracle: u = cos(phi), trapezoid in phi
        // on a smooth periodic integrand with a very fine grid.
        let (b, a) = (2.0, 1.0);
        let m = 200_000;
        let h = PI / m as f64;
        let mut oracle = 0.0;
        for k in 1..m {
            let phi = k as f64 * h;
            oracle += phi.sin().powi(2) / (b + a * phi.cos());
        }
        oracle *= h;
        let closed = PI * (2.0 - 3f64.sqrt());
        assert!((oracle - closed).abs() < 1e-12);
        let v = QuadratureRule::chebyshev2(64).integrate(|u| 1.0 / (b + a * u));
        assert!((v - closed).abs() < 1e-12, "{v} vs {closed}");
    }

    #[test]
    fn chebyshev2_converged_handles_endpoint_pole() {
        // b == a: sqrt(1-u^2)/(1+u) = sqrt((1-u)/(1+u)), integral = pi.
        // In angle form the integrand is 1 - cos(phi).
        let v = angle_trapezoid_converged(|phi| 1.0 - phi.cos(), 1e-12).unwrap();
        assert!((v - PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn adaptive_examples() {
        let r = adaptive_integrate(|u| u * u, -1.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-14);
        assert!(r.error <= 1e-10 * r.value.abs() + ABS_FLOOR);
        let r = adaptive_integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            adaptive_integrate(|x| x, 1.0, 1.0, 1e-8).unwrap().value,
            0.0
        );
        assert!(adaptive_integrate(|x| x, 2.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn adaptive_reports_failure_with_estimate() {
        let e = adaptive_integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(e, Error::Quadrature { .. }));
    }
}
