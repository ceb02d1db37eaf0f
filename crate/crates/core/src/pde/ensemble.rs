//! Characteristic ensembles and field reconstruction from them.

use serde::{Deserialize, Serialize};

use super::interp::Pchip;
use crate::ea::kernels::effective_support;
use crate::error::{invalid, CoreError, Result};
use crate::model::{divergence, sphere_measure, spectral_gap, CharState, ProfileKind, RadialField, RadialProfile};
use crate::quadrature::{panel_breaks, GlRule};

/// Radial paths with their velocities and conserved mass weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicEnsemble {
    pub n: usize,
    pub time: f64,
    pub radii: Vec<f64>,
    pub velocities: Vec<f64>,
    pub masses: Vec<f64>,
    /// Characteristic states, when the model evolves them along each path.
    pub states: Option<Vec<CharState>>,
}

impl CharacteristicEnsemble {
    /// Place `count` paths at the centres of equal-width shells covering
    /// `[0, radius]` and give each the mass of its shell.
    ///
    /// Without `radius` the density's support is used, or a radius beyond
    /// which it is negligible.
    pub fn from_profiles(
        rho0: &dyn RadialField,
        u0: &dyn RadialField,
        n: usize,
        count: usize,
        radius: Option<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::Domain("dimension must be at least 1".into()));
        }
        if count < 3 {
            return Err(invalid("paths", "need at least three paths"));
        }
        let radius = radius.unwrap_or_else(|| effective_support(rho0, n));
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", "must be positive and finite"));
        }
        let scale = u0.value(radius).abs().max(1.0);
        if u0.value(0.0).abs() > 1e-12 * scale {
            return Err(CoreError::Domain("velocity must vanish at the origin".into()));
        }
        let h = radius / count as f64;
        let nf = n as f64;
        let rule = GlRule::new(8);
        let omega = sphere_measure(nf - 1.0);
        let mut radii = Vec::with_capacity(count);
        let mut masses = Vec::with_capacity(count);
        let breaks = rho0.breakpoints();
        for i in 0..count {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let local: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
            let m = omega * rule.composite(&panel_breaks(a, b, &local, 2), |s| {
                let v = rho0.value(s);
                if v < 0.0 {
                    f64::NAN
                } else {
                    s.powi(n as i32 - 1) * v
                }
            });
            if !(m >= 0.0) {
                return Err(CoreError::Domain("density must be non-negative".into()));
            }
            radii.push(0.5 * (a + b));
            masses.push(m);
        }
        let velocities = radii.iter().map(|&r| u0.value(r)).collect();
        Ok(Self {
            n,
            time: 0.0,
            radii,
            velocities,
            masses,
            states: None,
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// First adjacent pair out of order, or a path reaching the origin.
    pub fn crossing(&self) -> Option<(usize, f64)> {
        if !(self.radii[0] > 0.0) {
            return Some((0, 0.0));
        }
        self.radii
            .windows(2)
            .position(|w| !(w[1] > w[0]))
            .map(|i| (i, 0.5 * (self.radii[i] + self.radii[i + 1])))
    }

    /// Radii of the shell edges: the origin, midpoints, and an outer edge
    /// extrapolated by half the last spacing.
    pub fn shell_edges(&self) -> Vec<f64> {
        let k = self.len();
        let mut edges = Vec::with_capacity(k + 1);
        edges.push(0.0);
        for w in self.radii.windows(2) {
            edges.push(0.5 * (w[0] + w[1]));
        }
        edges.push(self.radii[k - 1] + 0.5 * (self.radii[k - 1] - self.radii[k - 2]));
        edges
    }
}

/// Reconstructed fields at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub time: f64,
    pub n: usize,
    pub radii: Vec<f64>,
    pub velocity: Vec<f64>,
    pub density: Vec<f64>,
    /// Radial derivative of the velocity.
    pub p: Vec<f64>,
    /// Velocity over radius.
    pub q: Vec<f64>,
    /// Influence mass at each path, for alignment runs.
    pub psi: Option<Vec<f64>>,
    /// Characteristic states carried by the paths, when the model has them.
    pub path_states: Option<Vec<CharState>>,
    pub mass_total: f64,
}

impl FieldSnapshot {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn divergence(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.p.iter().zip(&self.q).map(|(&p, &q)| divergence(p, q, n)).collect()
    }

    pub fn spectral_gap(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.p.iter().zip(&self.q).map(|(&p, &q)| spectral_gap(p, q, n)).collect()
    }

    /// `G = p + psi`, for alignment runs.
    pub fn g(&self) -> Option<Vec<f64>> {
        self.psi
            .as_ref()
            .map(|psi| self.p.iter().zip(psi).map(|(p, s)| p + s).collect())
    }

    /// Largest eigenvalue magnitude of the velocity gradient.
    pub fn max_grad_u(&self) -> f64 {
        self.p
            .iter()
            .zip(&self.q)
            .fold(0.0_f64, |m, (p, q)| m.max(p.abs()).max(q.abs()))
    }

    /// Largest velocity difference between two points, `2 max |u|` for radial fields.
    pub fn velocity_oscillation(&self) -> f64 {
        2.0 * self.velocity.iter().fold(0.0_f64, |m, u| m.max(u.abs()))
    }

    pub fn support_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_radius(&self) -> f64 {
        self.radii.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Monotone cubic interpolant of the velocity, pinned to zero at the origin.
    pub fn velocity_profile(&self) -> Result<Pchip> {
        let mut xs = vec![0.0];
        xs.extend_from_slice(&self.radii);
        let mut ys = vec![0.0];
        ys.extend_from_slice(&self.velocity);
        Pchip::new(xs, ys)
    }

    /// Piecewise linear density, flat between the origin and the first path.
    pub fn density_profile(&self) -> Result<RadialProfile> {
        let mut xs = vec![0.0];
        xs.extend_from_slice(&self.radii);
        let mut ys = vec![self.density[0]];
        ys.extend_from_slice(&self.density);
        RadialProfile::new(xs, ys, ProfileKind::Density)
    }
}

/// Derivative of `u` at each path from three neighbouring samples, using the
/// origin with `u = 0` left of the first path and a one-sided stencil at the
/// last path.
pub fn difference_gradient(radii: &[f64], u: &[f64]) -> Vec<f64> {
    let k = radii.len();
    let at = |i: isize| -> (f64, f64) {
        if i < 0 {
            (0.0, 0.0)
        } else {
            (radii[i as usize], u[i as usize])
        }
    };
    (0..k as isize)
        .map(|i| {
            if i as usize == k - 1 {
                // One-sided second-order stencil on the last three paths.
                let ((x0, y0), (x1, y1), (x2, y2)) = (at(i - 2), at(i - 1), at(i));
                let (h1, h2) = (x1 - x0, x2 - x1);
                y0 * h2 / (h1 * (h1 + h2)) - y1 * (h1 + h2) / (h1 * h2) + y2 * (h1 + 2.0 * h2) / (h2 * (h1 + h2))
            } else {
                let ((x0, y0), (x1, y1), (x2, y2)) = (at(i - 1), at(i), at(i + 1));
                let (h1, h2) = (x1 - x0, x2 - x1);
                -y0 * h2 / (h1 * (h1 + h2)) + y1 * (h2 - h1) / (h1 * h2) + y2 * h1 / (h2 * (h1 + h2))
            }
        })
        .collect()
}

/// Smallest shell volume used when a shell has collapsed.
const VOLUME_FLOOR: f64 = 1e-300;

/// Rebuild density, velocity gradient and `q = u/r` from an ensemble.
pub fn reconstruct_fields(ens: &CharacteristicEnsemble) -> Result<FieldSnapshot> {
    if let Some((_, radius)) = ens.crossing() {
        return Err(CoreError::Crossing {
            time: ens.time,
            radius,
        });
    }
    let nf = ens.n as f64;
    let ball = sphere_measure(nf - 1.0) / nf;
    let edges = ens.shell_edges();
    let density = ens
        .masses
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let vol = ball * (edges[i + 1].powi(ens.n as i32) - edges[i].powi(ens.n as i32));
            m / vol.max(VOLUME_FLOOR)
        })
        .collect();
    let p = difference_gradient(&ens.radii, &ens.velocities);
    let q = ens.radii.iter().zip(&ens.velocities).map(|(r, u)| u / r).collect();
    Ok(FieldSnapshot {
        time: ens.time,
        n: ens.n,
        radii: ens.radii.clone(),
        velocity: ens.velocities.clone(),
        density,
        p,
        q,
        psi: None,
        path_states: ens.states.clone(),
        mass_total: ens.total_mass(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{RadialVelocity, Shape};

    #[test]
    fn uniform_density_is_recovered() {
        let rho = Shape::Indicator { amplitude: 1.0, radius: 1.0 };
        let u = RadialVelocity::new(Shape::Constant { amplitude: 0.0 });
        for n in 1..=3 {
            let ens = CharacteristicEnsemble::from_profiles(&rho, &u, n, 400, Some(1.0)).unwrap();
            let snap = reconstruct_fields(&ens).unwrap();
            for (r, d) in snap.radii.iter().zip(&snap.density) {
                if *r < 0.99 {
                    assert!((d - 1.0).abs() < 0.02, "n={n} r={r}: {d}");
                }
            }
        }
    }

    #[test]
    fn rigid_expansion_has_unit_rates() {
        let rho = Shape::Indicator { amplitude: 1.0, radius: 1.0 };
        let u = RadialVelocity::new(Shape::Constant { amplitude: 1.0 });
        let mut ens = CharacteristicEnsemble::from_profiles(&rho, &u, 2, 50, Some(1.0)).unwrap();
        // Non-uniform spacing exercises the general stencil.
        for (k, r) in ens.radii.iter_mut().enumerate() {
            *r *= 1.0 + 0.3 * (k as f64 / 50.0);
        }
        ens.velocities = ens.radii.clone();
        let snap = reconstruct_fields(&ens).unwrap();
        for (p, q) in snap.p.iter().zip(&snap.q) {
            assert!((p - 1.0).abs() < 1e-6 && (q - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn crossing_is_reported() {
        let rho = Shape::Indicator { amplitude: 1.0, radius: 1.0 };
        let u = RadialVelocity::new(Shape::Constant { amplitude: 0.0 });
        let mut ens = CharacteristicEnsemble::from_profiles(&rho, &u, 2, 10, Some(1.0)).unwrap();
        ens.radii.swap(3, 4);
        ens.time = 0.7;
        assert!(matches!(reconstruct_fields(&ens), Err(CoreError::Crossing { time, .. }) if time == 0.7));
    }

    #[test]
    fn masses_sum_to_total() {
        let rho = Shape::GaussianBump { amplitude: 1.0, width: 0.5 };
        let u = RadialVelocity::new(Shape::Constant { amplitude: 0.0 });
        let ens = CharacteristicEnsemble::from_profiles(&rho, &u, 3, 200, Some(4.0)).unwrap();
        let exact = rho.mass(3.0);
        assert!((ens.total_mass() - exact).abs() < 1e-9 * exact);
    }
}
