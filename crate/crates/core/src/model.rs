//! Shared domain types and the algebraic identities of the radial framework.
//!
//! A radial velocity field `u(x) = u(r) x/r` is described by the pair
//! `p = u_r` and `q = u/r`. Its gradient has eigenvalue `p` along `x/r`
//! and `q` with multiplicity `n - 1` on the orthogonal complement.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, CoreError, Result};

/// Which characteristic system a parameter set describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    EulerPoisson,
    EulerAlignment,
    InviscidBurgers,
    /// Damped Burgers with its own damping constant.
    DampedBurgers(f64),
}

/// Dimension, force strength, background and model selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: f64,
    pub kappa: f64,
    pub c: f64,
    pub model: ModelKind,
}

impl ModelParams {
    pub fn new(n: f64, kappa: f64, c: f64, model: ModelKind) -> Result<Self> {
        let params = Self { n, kappa, c, model };
        params.validate()?;
        Ok(params)
    }

    pub fn euler_poisson(n: f64, kappa: f64, c: f64) -> Result<Self> {
        Self::new(n, kappa, c, ModelKind::EulerPoisson)
    }

    pub fn damped_burgers(n: f64, damping: f64) -> Result<Self> {
        Self::new(n, 1.0, 0.0, ModelKind::DampedBurgers(damping))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 1.0) || !self.n.is_finite() {
            return Err(invalid("n", format!("dimension must be >= 1, got {}", self.n)));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(invalid("kappa", format!("must be > 0, got {}", self.kappa)));
        }
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return Err(invalid("c", format!("must be >= 0, got {}", self.c)));
        }
        if let ModelKind::DampedBurgers(d) = self.model {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(invalid("damping", format!("must be >= 0, got {d}")));
            }
        }
        Ok(())
    }

    /// Dimension as an integer, for solvers that need a lattice of directions.
    pub fn integer_dimension(&self) -> Result<usize> {
        if self.n.fract() != 0.0 {
            return Err(invalid("n", format!("integer dimension required, got {}", self.n)));
        }
        Ok(self.n as usize)
    }
}

/// Scalars carried along one characteristic path of the Euler-Poisson system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharState {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub rho: f64,
}

impl CharState {
    pub fn new(p: f64, q: f64, s: f64, rho: f64) -> Self {
        Self { p, q, s, rho }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.p, self.q, self.s, self.rho]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        Self::new(y[0], y[1], y[2], y[3])
    }
}

/// Surface measure of the unit `k`-sphere in `R^{k+1}`.
///
/// `k = 0` is the two-point set `{-1, 1}`.
pub fn sphere_measure(k: f64) -> f64 {
    let m = k + 1.0;
    2.0 * std::f64::consts::PI.powf(m / 2.0) / gamma(m / 2.0)
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: f64) -> f64 {
    sphere_measure(n - 1.0) / n
}

/// A radial function of `r >= 0`.
pub trait RadialField: Send + Sync {
    fn value(&self, r: f64) -> f64;

    fn derivative(&self, r: f64) -> f64 {
        let h = 1e-6 * r.abs().max(1.0);
        if r > h {
            (self.value(r + h) - self.value(r - h)) / (2.0 * h)
        } else {
            (self.value(r + h) - self.value(r)) / h
        }
    }

    /// Radius beyond which the field vanishes, or infinity.
    fn support(&self) -> f64 {
        f64::INFINITY
    }

    /// Radius up to which the field is defined.
    fn domain(&self) -> f64 {
        f64::INFINITY
    }

    /// Radii where the field is not smooth; quadrature splits panels there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// What a sampled radial profile represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Density,
    Velocity,
    PotentialSlope,
}

/// Radial function sampled on strictly increasing nodes starting at the origin.
///
/// Between nodes the profile is linear. A density profile vanishes beyond its
/// last node; other kinds hold their last value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    kind: ProfileKind,
}

const ORIGIN_VALUE_TOL: f64 = 1e-12;

impl RadialProfile {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(invalid("values", "one sample per node required"));
        }
        if nodes.len() < 2 {
            return Err(invalid("nodes", "at least two nodes required"));
        }
        if nodes[0] != 0.0 {
            return Err(invalid("nodes", "first node must be the origin"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("nodes", "nodes must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "samples must be finite"));
        }
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        match kind {
            ProfileKind::Velocity => {
                if values[0].abs() > ORIGIN_VALUE_TOL * scale {
                    return Err(invalid("values", "velocity must vanish at the origin"));
                }
            }
            ProfileKind::Density => {
                if values.iter().any(|&v| v < 0.0) {
                    return Err(invalid("values", "density must be non-negative"));
                }
                if nodes.len() >= 3 {
                    // A flat origin makes the first one-sided slope at most about
                    // half the next one; a cusp makes them comparable.
                    let s01 = (values[1] - values[0]) / nodes[1];
                    let s12 = (values[2] - values[1]) / (nodes[2] - nodes[1]);
                    if s01.abs() > 0.75 * s12.abs() + 1e-9 * scale {
                        return Err(invalid("values", "density slope at the origin must vanish"));
                    }
                }
            }
            ProfileKind::PotentialSlope => {}
        }
        Ok(Self {
            nodes,
            values,
            kind,
        })
    }

    /// Sample a field on `count` uniform nodes over `[0, radius]`.
    pub fn sample(
        field: &dyn RadialField,
        radius: f64,
        count: usize,
        kind: ProfileKind,
    ) -> Result<Self> {
        if count < 2 || !(radius > 0.0) {
            return Err(invalid("count", "need at least two nodes on a positive radius"));
        }
        let h = radius / (count - 1) as f64;
        let nodes: Vec<f64> = (0..count).map(|i| i as f64 * h).collect();
        let values = nodes.iter().map(|&r| field.value(r)).collect();
        Self::new(nodes, values, kind)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn last_node(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn locate(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.nodes.len() - 2),
        }
    }
}

impl RadialField for RadialProfile {
    fn value(&self, r: f64) -> f64 {
        let last = self.last_node();
        if r > last {
            return match self.kind {
                ProfileKind::Density => 0.0,
                _ => *self.values.last().unwrap(),
            };
        }
        let r = r.max(0.0);
        let i = self.locate(r);
        let (r0, r1) = (self.nodes[i], self.nodes[i + 1]);
        let t = (r - r0) / (r1 - r0);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    fn derivative(&self, r: f64) -> f64 {
        if r > self.last_node() {
            return 0.0;
        }
        let i = self.locate(r.max(0.0));
        (self.values[i + 1] - self.values[i]) / (self.nodes[i + 1] - self.nodes[i])
    }

    fn support(&self) -> f64 {
        match self.kind {
            ProfileKind::Density => self.last_node(),
            _ => f64::INFINITY,
        }
    }

    fn domain(&self) -> f64 {
        self.last_node()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.nodes.clone()
    }
}

/// Velocity gradient at one point, with its closed-form matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGradientSample {
    pub x: Vec<f64>,
    pub p: f64,
    pub q: f64,
    pub matrix: DMatrix<f64>,
}

impl VelocityGradientSample {
    pub fn new(x: &[f64], p: f64, q: f64) -> Result<Self> {
        let matrix = grad_u_matrix(x, p, q)?;
        Ok(Self {
            x: x.to_vec(),
            p,
            q,
            matrix,
        })
    }
}

/// Divergence of a radial field: `p + (n - 1) q`.
pub fn divergence(p: f64, q: f64, n: f64) -> f64 {
    p + (n - 1.0) * q
}

/// Spectral gap `(n - 1)(p - q)^2` of the radial velocity gradient.
///
/// This is half the sum of squared pairwise eigenvalue differences over the
/// multiset `{p, q, ..., q}`.
pub fn spectral_gap(p: f64, q: f64, n: f64) -> f64 {
    (n - 1.0) * (p - q) * (p - q)
}

/// Closed-form gradient matrix of a radial field at `x`.
pub fn grad_u_matrix(x: &[f64], p: f64, q: f64) -> Result<DMatrix<f64>> {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if !(r2 > 0.0) {
        return Err(CoreError::Domain(
            "gradient direction undefined at the origin".into(),
        ));
    }
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let proj = x[i] * x[j] / r2;
        let delta = if i == j { 1.0 } else { 0.0 };
        proj * p + (delta - proj) * q
    }))
}

/// Residual between two evaluations of `d^2 - tr((grad u)^2)`.
///
/// One side uses the `(p, q)` expansion, the other the divergence and the
/// spectral gap. Both are exact algebra, so the residual measures rounding.
pub fn gap_consistency_check(p: f64, q: f64, n: u32) -> f64 {
    let nf = n as f64;
    let lhs = 2.0 * (nf - 1.0) * p * q + (nf - 1.0) * (nf - 2.0) * q * q;
    let d = divergence(p, q, nf);
    let rhs = (nf - 1.0) / nf * d * d - spectral_gap(p, q, nf) / nf;
    (lhs - rhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn divergence_examples() {
        assert_eq!(divergence(2.0, 1.0, 3.0), 4.0);
        assert_eq!(divergence(0.7, 0.0, 1.0), 0.7);
        assert_eq!(divergence(1.0, 1.0, 5.0), 5.0);
    }

    #[test]
    fn spectral_gap_examples() {
        assert_eq!(spectral_gap(2.0, 1.0, 3.0), 2.0);
        assert_eq!(spectral_gap(1.3, 1.3, 4.0), 0.0);
        assert_eq!(spectral_gap(5.0, -2.0, 1.0), 0.0);
    }

    #[test]
    fn spectral_gap_matches_pairwise_sum() {
        for n in 2..=6 {
            let (p, q) = (1.7, -0.4);
            let mut eig = vec![q; n];
            eig[0] = p;
            let mut total = 0.0;
            for a in &eig {
                for b in &eig {
                    total += (a - b) * (a - b);
                }
            }
            assert_relative_eq!(total / 2.0, spectral_gap(p, q, n as f64), epsilon = 1e-12);
        }
    }

    #[test]
    fn grad_matrix_axis_aligned() {
        let m = grad_u_matrix(&[0.5, 0.0], 2.0, 1.0).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn grad_matrix_isotropic() {
        let m = grad_u_matrix(&[0.3, -1.2, 0.8], 0.9, 0.9).unwrap();
        let id = DMatrix::<f64>::identity(3, 3) * 0.9;
        assert!((m - id).abs().max() < 1e-15);
    }

    #[test]
    fn grad_matrix_rejects_origin() {
        assert!(matches!(
            grad_u_matrix(&[0.0, 0.0], 1.0, 1.0),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn grad_matrix_eigenvalues() {
        let m = grad_u_matrix(&[0.3, -1.1, 0.7], 2.0, 1.0).unwrap();
        let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert_relative_eq!(eig[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(eig[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(eig[2], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn gap_identity_examples() {
        // Both sides reduce to 4 at (2, 1) in three dimensions.
        let lhs = 2.0 * 2.0 * 2.0 * 1.0 + 2.0 * 1.0 * 1.0;
        assert_eq!(lhs, 10.0);
        assert!(gap_consistency_check(2.0, 1.0, 3) < 1e-12);
        assert_eq!(gap_consistency_check(0.0, 0.0, 4), 0.0);
        assert!(gap_consistency_check(1.0, 1.0, 2) < 1e-12);
    }

    #[test]
    fn sphere_measures() {
        assert_relative_eq!(sphere_measure(0.0), 2.0, epsilon = 1e-12);
        assert_relative_eq!(sphere_measure(1.0), 2.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_relative_eq!(sphere_measure(2.0), 4.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_relative_eq!(ball_volume(3.0), 4.0 / 3.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::euler_poisson(3.0, 1.0, 0.0).is_ok());
        assert!(ModelParams::euler_poisson(0.5, 1.0, 0.0).is_err());
        assert!(ModelParams::euler_poisson(2.0, 0.0, 0.0).is_err());
        assert!(ModelParams::euler_poisson(2.0, 1.0, -1.0).is_err());
        assert!(ModelParams::damped_burgers(2.0, -0.1).is_err());
        assert!(ModelParams::euler_poisson(2.5, 1.0, 0.0)
            .unwrap()
            .integer_dimension()
            .is_err());
    }

    #[test]
    fn profile_validation() {
        let nodes = vec![0.0, 0.1, 0.2, 0.3];
        assert!(RadialProfile::new(nodes.clone(), vec![0.0, 0.1, 0.2, 0.3], ProfileKind::Velocity).is_ok());
        assert!(RadialProfile::new(nodes.clone(), vec![0.1, 0.1, 0.2, 0.3], ProfileKind::Velocity).is_err());
        assert!(RadialProfile::new(nodes.clone(), vec![1.0, 0.99, 0.96, 0.91], ProfileKind::Density).is_ok());
        assert!(RadialProfile::new(nodes.clone(), vec![1.0, 0.9, 0.8, 0.7], ProfileKind::Density).is_err());
        assert!(RadialProfile::new(vec![0.0, 0.2, 0.1], vec![1.0; 3], ProfileKind::Density).is_err());
        assert!(RadialProfile::new(vec![0.1, 0.2], vec![1.0; 2], ProfileKind::Density).is_err());
    }

    #[test]
    fn profile_interpolation() {
        let p = RadialProfile::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 3.0], ProfileKind::Density).unwrap();
        assert_eq!(p.value(1.5), 2.0);
        assert_eq!(p.value(2.5), 0.0);
        assert_eq!(p.derivative(1.5), 2.0);
        assert_eq!(p.support(), 2.0);
    }
}
