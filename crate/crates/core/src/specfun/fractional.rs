//! Riemann-Liouville integral and Caputo derivative on uniform meshes.

use super::gamma::gamma_unchecked;
use crate::error::{Error, Result};

/// Samples `y[i] = f(t[i])` on strictly increasing nonnegative nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t: Vec<f64>,
    y: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::SizeMismatch { expected: t.len(), found: y.len() });
        }
        if let Some(&t0) = t.first() {
            if !(t0 >= 0.0) {
                return Err(Error::InvalidArgument(format!("first node {t0} is negative")));
            }
        }
        if let Some(i) = t.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(format!("nodes not increasing at index {}", i + 1)));
        }
        Ok(Self { t, y })
    }

    /// `n + 1` nodes `0, h, ..., n h` with values `f(t)`.
    pub fn uniform(h: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let t: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let y = t.iter().map(|&x| f(x)).collect();
        Self::new(t, y)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn step(&self) -> Result<f64> {
        if self.t.len() < 2 {
            return Err(Error::InvalidArgument("need at least two nodes".into()));
        }
        let h = self.t[1] - self.t[0];
        for (i, w) in self.t.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(w[1].abs() * 1e-6) {
                return Err(Error::NonuniformMesh { index: i + 1 });
            }
        }
        Ok(h)
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("fractional order {alpha} not in (0, 1)")))
    }
}

/// `(I^α y)(t_n) = ∫_{t_0}^{t_n} (t_n - s)^{α-1} / Γ(α) y(s) ds` with `y`
/// interpolated piecewise linearly (product trapezoidal rule).
pub fn rl_integral(series: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    check_order(alpha)?;
    let h = series.step()?;
    let y = series.y();
    let c = h.powf(alpha) / gamma_unchecked(alpha + 2.0);
    let p = |k: f64| k.powf(alpha + 1.0);
    let mut out = vec![0.0; y.len()];
    for n in 1..y.len() {
        let nf = n as f64;
        let mut acc = (p(nf - 1.0) - (nf - alpha - 1.0) * nf.powf(alpha)) * y[0];
        for (j, &yj) in y.iter().enumerate().take(n).skip(1) {
            let m = (n - j) as f64;
            acc += (p(m + 1.0) + p(m - 1.0) - 2.0 * p(m)) * yj;
        }
        acc += y[n];
        out[n] = c * acc;
    }
    TimeSeries::new(series.t().to_vec(), out)
}

/// L1 weights `b_j = (j+1)^{1-α} - j^{1-α}`, `j = 0..n`.
pub fn caputo_l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let e = 1.0 - alpha;
    // 0^0 = 1 in powf would zero b_0 at α = 1
    (0..n).map(|j| if j == 0 { 1.0 } else { ((j + 1) as f64).powf(e) - (j as f64).powf(e) }).collect()
}

/// L1 discretization of the Caputo derivative,
/// `h^{-α}/Γ(2-α) Σ_{j<n} b_j (y_{n-j} - y_{n-j-1})`; the first node is 0.
pub fn caputo_l1(series: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    check_order(alpha)?;
    let h = series.step()?;
    let y = series.y();
    let b = caputo_l1_weights(alpha, y.len());
    let c = h.powf(-alpha) / gamma_unchecked(2.0 - alpha);
    let mut out = vec![0.0; y.len()];
    for n in 1..y.len() {
        let mut acc = 0.0;
        for j in 0..n {
            acc += b[j] * (y[n - j] - y[n - j - 1]);
        }
        out[n] = c * acc;
    }
    TimeSeries::new(series.t().to_vec(), out)
}
