//! Influence functions for the alignment force.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Family of the influence function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InfluenceKind {
    /// `phi(r) = value`.
    Constant { value: f64 },
    /// `phi(r) = (1 + r)^(-beta)`.
    Algebraic { beta: f64 },
    /// `phi(r) = (1 + r^2)^(-beta/2)`.
    CuckerSmale { beta: f64 },
    /// `phi(r) = exp(-rate r)`.
    Exponential { rate: f64 },
}

/// Influence function with its derivative and norm metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfluenceSpec {
    pub kind: InfluenceKind,
    /// Multiplicative strength applied to the family.
    pub scale: f64,
    pub sup_phi: f64,
    pub sup_phi_prime: f64,
    pub non_increasing: bool,
    /// Whether `integral^inf phi = inf`.
    pub slow_decay: bool,
}

impl InfluenceSpec {
    pub fn new(kind: InfluenceKind, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(invalid("scale", format!("must be positive, got {scale}")));
        }
        let (sup_phi, sup_phi_prime, slow_decay) = match kind {
            InfluenceKind::Constant { value } => {
                if !(value > 0.0) {
                    return Err(invalid("value", "constant influence must be positive"));
                }
                (value, 0.0, true)
            }
            InfluenceKind::Algebraic { beta } => {
                if !(beta > 0.0) {
                    return Err(invalid("beta", "must be positive"));
                }
                (1.0, beta, beta <= 1.0)
            }
            InfluenceKind::CuckerSmale { beta } => {
                if !(beta > 0.0) {
                    return Err(invalid("beta", "must be positive"));
                }
                let r = 1.0 / (beta + 1.0).sqrt();
                let peak = beta * r * (1.0 + r * r).powf(-beta / 2.0 - 1.0);
                (1.0, peak, beta <= 1.0)
            }
            InfluenceKind::Exponential { rate } => {
                if !(rate > 0.0) {
                    return Err(invalid("rate", "must be positive"));
                }
                (1.0, rate, false)
            }
        };
        Ok(Self {
            kind,
            scale,
            sup_phi: scale * sup_phi,
            sup_phi_prime: scale * sup_phi_prime,
            non_increasing: true,
            slow_decay,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self::new(InfluenceKind::Constant { value }, 1.0).expect("positive constant")
    }

    pub fn algebraic(beta: f64) -> Self {
        Self::new(InfluenceKind::Algebraic { beta }, 1.0).expect("positive exponent")
    }

    pub fn cucker_smale(beta: f64) -> Self {
        Self::new(InfluenceKind::CuckerSmale { beta }, 1.0).expect("positive exponent")
    }

    pub fn exponential(rate: f64) -> Self {
        Self::new(InfluenceKind::Exponential { rate }, 1.0).expect("positive rate")
    }

    #[inline]
    pub fn phi(&self, r: f64) -> f64 {
        self.scale
            * match self.kind {
                InfluenceKind::Constant { value } => value,
                InfluenceKind::Algebraic { beta } => (1.0 + r).powf(-beta),
                InfluenceKind::CuckerSmale { beta } => (1.0 + r * r).powf(-beta / 2.0),
                InfluenceKind::Exponential { rate } => (-rate * r).exp(),
            }
    }

    pub fn phi_prime(&self, r: f64) -> f64 {
        self.scale
            * match self.kind {
                InfluenceKind::Constant { .. } => 0.0,
                InfluenceKind::Algebraic { beta } => -beta * (1.0 + r).powf(-beta - 1.0),
                InfluenceKind::CuckerSmale { beta } => -beta * r * (1.0 + r * r).powf(-beta / 2.0 - 1.0),
                InfluenceKind::Exponential { rate } => -rate * (-rate * r).exp(),
            }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, InfluenceKind::Constant { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_bounds_hold_on_samples() {
        let specs = [
            InfluenceSpec::constant(0.7),
            InfluenceSpec::algebraic(0.5),
            InfluenceSpec::cucker_smale(2.0),
            InfluenceSpec::exponential(1.5),
        ];
        for spec in specs {
            for k in 0..2000 {
                let r = k as f64 * 0.005;
                assert!(spec.phi(r) >= 0.0);
                assert!(spec.phi(r) <= spec.sup_phi + 1e-15);
                assert!(spec.phi_prime(r).abs() <= spec.sup_phi_prime + 1e-12);
                assert!(spec.phi(r + 0.005) <= spec.phi(r) + 1e-15);
            }
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let spec = InfluenceSpec::cucker_smale(1.3);
        let h = 1e-6;
        for r in [0.2, 0.9, 2.5] {
            let fd = (spec.phi(r + h) - spec.phi(r - h)) / (2.0 * h);
            assert!((fd - spec.phi_prime(r)).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(InfluenceSpec::new(InfluenceKind::Algebraic { beta: -1.0 }, 1.0).is_err());
        assert!(InfluenceSpec::new(InfluenceKind::Constant { value: 1.0 }, 0.0).is_err());
    }
}
