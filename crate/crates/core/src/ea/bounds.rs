//! A-priori bounds on the alignment kernels and the rough threshold tests.

use serde::{Deserialize, Serialize};

use super::influence::InfluenceSpec;
use crate::error::{invalid, CoreError, Result};
use crate::model::RadialField;
use crate::profiles::mass_within;

/// Bounds on `psi` and on the decay envelope of `zeta / r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentBounds {
    pub mass: f64,
    pub u_max: f64,
    /// Radius containing the density support for all time.
    pub d: f64,
    /// Alignment rate `phi(2D) * mass`.
    pub nu: f64,
    pub psi_min: f64,
    pub psi_max: f64,
    /// Initial envelope `sup|phi'| * mass * u_max`.
    pub c0: f64,
}

impl AlignmentBounds {
    /// Bounds from the mass, the velocity amplitude and the flock radius.
    pub fn from_parts(mass: f64, u_max: f64, d: f64, phi: &InfluenceSpec) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(invalid("mass", format!("must be positive and finite, got {mass}")));
        }
        if !(u_max >= 0.0) || !(d > 0.0) {
            return Err(invalid("d", "need u_max >= 0 and D > 0"));
        }
        let floor = phi.phi(2.0 * d);
        if !(floor > 0.0) {
            return Err(CoreError::DegenerateRate);
        }
        let nu = floor * mass;
        Ok(Self {
            mass,
            u_max,
            d,
            nu,
            psi_min: nu,
            psi_max: phi.sup_phi * mass,
            c0: phi.sup_phi_prime * mass * u_max,
        })
    }

    /// Bounds given directly by their `psi` range and envelope, with `nu = psi_min`.
    pub fn from_psi(psi_min: f64, psi_max: f64, c0: f64) -> Result<Self> {
        if !(psi_min > 0.0 && psi_min <= psi_max) {
            return Err(invalid("psi_min", "need 0 < psi_min <= psi_max"));
        }
        if !(c0 >= 0.0) {
            return Err(invalid("c0", "must be non-negative"));
        }
        Ok(Self {
            mass: f64::NAN,
            u_max: f64::NAN,
            d: f64::NAN,
            nu: psi_min,
            psi_min,
            psi_max,
            c0,
        })
    }

    /// Same bounds with another initial envelope.
    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }
}

/// Compute the bounds for initial data supported in the ball of radius `d`.
pub fn compute_bounds(
    rho0: &dyn RadialField,
    u0: &dyn RadialField,
    phi: &InfluenceSpec,
    d: f64,
    n: usize,
) -> Result<AlignmentBounds> {
    if !(d > 0.0) {
        return Err(invalid("d", "flock radius must be positive"));
    }
    if rho0.support() > d {
        return Err(CoreError::Domain(format!(
            "density support {} exceeds the flock radius {d}",
            rho0.support()
        )));
    }
    let mass = mass_within(rho0, d, n as f64);
    const SAMPLES: usize = 4001;
    let mut u_max = (0..SAMPLES)
        .map(|k| u0.value(d * k as f64 / (SAMPLES - 1) as f64).abs())
        .fold(0.0, f64::max);
    for b in u0.breakpoints() {
        if b <= d {
            u_max = u_max.max(u0.value(b).abs());
        }
    }
    AlignmentBounds::from_parts(mass, u_max, d, phi)
}

/// Outcome of a one-sided threshold test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoughRegion {
    Subcritical,
    Supercritical,
    Gap,
}

/// Lower bound admitted by the rough subcritical test on `q`, when it exists.
pub fn rough_q_subcritical_bound(b: &AlignmentBounds) -> Option<f64> {
    let disc = b.psi_min * b.psi_min - 4.0 * b.c0;
    (disc >= 0.0).then(|| 0.5 * (-b.psi_min - disc.sqrt()))
}

/// Upper bound of the rough supercritical test on `q`.
pub fn rough_q_supercritical_bound(b: &AlignmentBounds) -> f64 {
    0.5 * (-b.psi_max - (b.psi_max * b.psi_max + 4.0 * b.c0).sqrt())
}

/// Lower bound admitted by the rough subcritical test on `G`, when it exists.
pub fn rough_g_subcritical_bound(b: &AlignmentBounds, n: f64) -> Option<f64> {
    let disc = b.psi_min * b.psi_min - 4.0 * (n - 1.0) * b.c0;
    (disc >= 0.0).then(|| 0.5 * (b.psi_min - disc.sqrt()))
}

/// Upper bound of the rough supercritical test on `G`.
pub fn rough_g_supercritical_bound(b: &AlignmentBounds, n: f64) -> f64 {
    0.5 * (b.psi_max - (b.psi_max * b.psi_max + 4.0 * (n - 1.0) * b.c0).sqrt())
}

/// Rough test on the initial `q = u/r`.
pub fn rough_threshold_q(q0: f64, b: &AlignmentBounds) -> RoughRegion {
    if rough_q_subcritical_bound(b).is_some_and(|lo| q0 >= lo) {
        RoughRegion::Subcritical
    } else if q0 < rough_q_supercritical_bound(b) {
        RoughRegion::Supercritical
    } else {
        RoughRegion::Gap
    }
}

/// Rough test on the initial `G = p + psi`.
pub fn rough_threshold_g(g0: f64, b: &AlignmentBounds, n: f64) -> RoughRegion {
    if rough_g_subcritical_bound(b, n).is_some_and(|lo| g0 >= lo) {
        RoughRegion::Subcritical
    } else if g0 < rough_g_supercritical_bound(b, n) {
        RoughRegion::Supercritical
    } else {
        RoughRegion::Gap
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{RadialVelocity, Shape};

    #[test]
    fn bounds_from_formulas() {
        let phi = InfluenceSpec::algebraic(0.5);
        let b = AlignmentBounds::from_parts(1.0, 0.0, 1.0, &phi).unwrap();
        assert!((b.nu - 3.0_f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(b.psi_max, 1.0);
        assert_eq!(b.psi_min, b.nu);
    }

    #[test]
    fn envelope_products() {
        let phi = InfluenceSpec::algebraic(0.5);
        let b = AlignmentBounds::from_parts(2.0, 3.0, 1.0, &phi).unwrap();
        assert_eq!(b.c0, 3.0);
        assert_eq!(b.psi_max, 2.0);
    }

    #[test]
    fn constant_influence_has_zero_envelope() {
        let rho = Shape::Indicator { amplitude: 1.0, radius: 1.0 };
        let u = RadialVelocity::new(Shape::Constant { amplitude: 0.3 });
        let b = compute_bounds(&rho, &u, &InfluenceSpec::constant(1.0), 1.0, 2).unwrap();
        assert_eq!(b.c0, 0.0);
        assert!((b.mass - std::f64::consts::PI).abs() < 1e-10);
        assert_eq!(b.psi_min, b.psi_max);
    }

    #[test]
    fn degenerate_rate() {
        let phi = InfluenceSpec::exponential(800.0);
        assert_eq!(
            AlignmentBounds::from_parts(1.0, 1.0, 1.0, &phi),
            Err(CoreError::DegenerateRate)
        );
    }

    #[test]
    fn rough_q_examples() {
        let b = AlignmentBounds::from_psi(0.8, 1.0, 0.15).unwrap();
        assert!((rough_q_subcritical_bound(&b).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(rough_threshold_q(-0.5, &b), RoughRegion::Subcritical);
        assert!((rough_q_supercritical_bound(&b) + 0.5 * (1.0 + 1.6_f64.sqrt())).abs() < 1e-15);
        assert_eq!(rough_threshold_q(-1.2, &b), RoughRegion::Supercritical);
        assert_eq!(rough_threshold_q(-1.0, &b), RoughRegion::Gap);
    }

    #[test]
    fn rough_thresholds_sharp_for_constant_influence() {
        let b = AlignmentBounds::from_psi(1.3, 1.3, 0.0).unwrap();
        assert_eq!(rough_q_subcritical_bound(&b), Some(-1.3));
        assert_eq!(rough_q_supercritical_bound(&b), -1.3);
        assert_eq!(rough_g_subcritical_bound(&b, 3.0), Some(0.0));
        assert_eq!(rough_g_supercritical_bound(&b, 3.0), 0.0);
    }

    #[test]
    fn rough_g_examples() {
        let b = AlignmentBounds::from_psi(0.8, 1.0, 0.16).unwrap();
        // The discriminant vanishes exactly; rounding leaves about 1e-16 under the root.
        assert!((rough_g_subcritical_bound(&b, 2.0).unwrap() - 0.4).abs() < 1e-7);
        let one_d = AlignmentBounds::from_psi(0.8, 1.0, 0.0).unwrap();
        assert_eq!(rough_threshold_g(0.0, &one_d, 1.0), RoughRegion::Subcritical);
        assert_eq!(rough_threshold_g(-1e-9, &one_d, 1.0), RoughRegion::Supercritical);
        // In one dimension the envelope drops out entirely.
        let one_d = one_d.with_c0(5.0);
        assert_eq!(rough_threshold_g(0.0, &one_d, 1.0), RoughRegion::Subcritical);
    }
}
