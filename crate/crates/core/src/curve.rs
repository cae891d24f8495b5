/// Piecewise cubic Hermite interpolant on a uniform grid over `[0, end]`,
/// built from values and exact derivatives at the nodes.
#[derive(Debug, Clone)]
pub struct HermiteCurve {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteCurve {
    pub fn new(end: f64, values: Vec<f64>, slopes: Vec<f64>) -> Self {
        assert!(values.len() >= 2 && values.len() == slopes.len());
        let step = end / (values.len() - 1) as f64;
        Self {
            step,
            values,
            slopes,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn end(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Evaluates at `t`, clamped to the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let last = self.values.len() - 1;
        let pos = (t / self.step).max(0.0);
        let i = (pos.floor() as usize).min(last - 1);
        let u = (pos - i as f64).clamp(0.0, 1.0);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t - 0.1 * t * t * t;
        let df = |t: f64| -2.0 + t - 0.3 * t * t;
        let n = 11;
        let end = 3.0;
        let ts: Vec<f64> = (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect();
        let c = HermiteCurve::new(
            end,
            ts.iter().map(|&t| f(t)).collect(),
            ts.iter().map(|&t| df(t)).collect(),
        );
        for k in 0..=97 {
            let t = end * k as f64 / 97.0;
            assert!((c.eval(t) - f(t)).abs() < 1e-13);
        }
        assert_eq!(c.eval(-1.0), f(0.0));
        assert!((c.eval(end) - f(end)).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let ts: Vec<f64> = (0..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
            let c = HermiteCurve::new(
                2.0,
                ts.iter().map(|t| (-t).exp()).collect(),
                ts.iter().map(|t| -(-t).exp()).collect(),
            );
            (0..1000)
                .map(|k| {
                    let t = 2.0 * (k as f64 + 0.37) / 1000.0;
                    (c.eval(t) - (-t).exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(16) / err(32);
        assert!(ratio > 14.0, "ratio {ratio}");
    }
}
