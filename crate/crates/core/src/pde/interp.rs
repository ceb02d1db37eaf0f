//! Monotone piecewise cubic Hermite interpolation.

use crate::error::{invalid, Result};
use crate::model::RadialField;

/// Shape-preserving cubic interpolant through strictly increasing nodes.
///
/// Slopes follow Fritsch-Carlson: a weighted harmonic mean of neighbouring
/// secants inside, zero at local extrema, and a limited three-point estimate
/// at the ends. Outside the node range the end values are held.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

impl Pchip {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(invalid("nodes", "need at least two nodes with one value each"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("nodes", "nodes must be strictly increasing"));
        }
        let k = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let m: Vec<f64> = (0..k - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; k];
        if k == 2 {
            ds[0] = m[0];
            ds[1] = m[0];
        } else {
            for i in 1..k - 1 {
                if m[i - 1] * m[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    ds[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
                }
            }
            ds[0] = end_slope(h[0], h[1], m[0], m[1]);
            ds[k - 1] = end_slope(h[k - 2], h[k - 3], m[k - 2], m[k - 3]);
        }
        Ok(Self { xs, ys, ds })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let last = self.xs.len() - 1;
        if x <= self.xs[0] || x >= self.xs[last] {
            return None;
        }
        Some(self.xs.partition_point(|&v| v <= x) - 1)
    }
}

impl RadialField for Pchip {
    fn value(&self, x: f64) -> f64 {
        let Some(i) = self.locate(x) else {
            return if x <= self.xs[0] { self.ys[0] } else { *self.ys.last().unwrap() };
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[i]
            + (t3 - 2.0 * t2 + t) * h * self.ds[i]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[i + 1]
            + (t3 - t2) * h * self.ds[i + 1]
    }

    fn derivative(&self, x: f64) -> f64 {
        let Some(i) = self.locate(x) else {
            return if x <= self.xs[0] { self.ds[0] } else { *self.ds.last().unwrap() };
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * self.ys[i] + (6.0 * t - 6.0 * t2) * self.ys[i + 1]) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.ds[i]
            + (3.0 * t2 - 2.0 * t) * self.ds[i + 1]
    }

    fn domain(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.xs.clone()
    }
}
