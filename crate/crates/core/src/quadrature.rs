//! Composite Gauss-Legendre rules on panels.

use gauss_quad::legendre::GaussLegendre;

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GlRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GlRule {
    pub fn new(order: usize) -> Self {
        let order = order.max(2);
        let pairs = GaussLegendre::new(order)
            .expect("order is at least two")
            .into_node_weight_pairs();
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (a + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Sum over consecutive panels `[breaks[i], breaks[i+1]]`.
    pub fn composite(&self, breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        breaks
            .windows(2)
            .map(|p| self.integrate(p[0], p[1], &mut f))
            .sum()
    }
}

/// Sorted, deduplicated panel breaks on `[a, b]` containing the interior
/// `extra` points, each panel further split into `split` equal pieces.
pub fn panel_breaks(a: f64, b: f64, extra: &[f64], split: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = extra.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
    let split = split.max(1);
    let mut out = Vec::with_capacity((pts.len() - 1) * split + 1);
    for w in pts.windows(2) {
        for k in 0..split {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / split as f64);
        }
    }
    out.push(b);
    out
}

/// Breaks on `[0, b]` refined geometrically towards the origin.
pub fn graded_from_origin(b: f64, levels: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..=levels).rev().map(|k| b * 0.5_f64.powi(k as i32)).collect();
    out.insert(0, 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let rule = GlRule::new(4);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(7));
        assert!((v - 2.0_f64.powi(8) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn composite_handles_kinks() {
        let rule = GlRule::new(8);
        let breaks = panel_breaks(-1.0, 2.0, &[0.0], 2);
        let v = rule.composite(&breaks, f64::abs);
        assert!((v - 2.5).abs() < 1e-14);
    }

    #[test]
    fn graded_breaks_are_increasing() {
        let b = graded_from_origin(1.0, 5);
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), 1.0);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
    }
}
