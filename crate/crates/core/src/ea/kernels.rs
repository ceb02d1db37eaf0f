//! Radial reductions of the nonlocal alignment integrals.
//!
//! For a radial density the influence mass `psi(r)` and the alignment force
//! `zeta(r)` reduce to a double integral over the radius `s` of the source
//! shell and its polar angle `theta` to the target direction.

use crate::error::{CoreError, Result};
use crate::model::{sphere_measure, RadialField};
use crate::quadrature::{panel_breaks, GlRule};

use super::influence::InfluenceSpec;

/// Quadrature settings for kernel evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadrature {
    /// Gauss-Legendre nodes per angular panel.
    pub angular_nodes: usize,
    /// Gauss-Legendre nodes per radial panel.
    pub radial_order: usize,
    /// Relative change between refinements at which radial doubling stops.
    pub rel_tol: f64,
    pub max_doublings: usize,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        Self {
            angular_nodes: 64,
            radial_order: 8,
            rel_tol: 1e-8,
            max_doublings: 8,
        }
    }
}

/// Angular part of the reduced kernels for a fixed dimension.
#[derive(Debug, Clone)]
pub struct ShellKernel {
    phi: InfluenceSpec,
    n: usize,
    rule: GlRule,
    /// Measure of the unit `(n-2)`-sphere of rotations about the target axis.
    omega: f64,
    /// Measure of the unit `(n-1)`-sphere.
    shell: f64,
    max_levels: i32,
}

/// Levels of geometric refinement towards `theta = 0` for nearby shells.
const MAX_ANGULAR_LEVELS: i32 = 40;

impl ShellKernel {
    pub fn new(phi: InfluenceSpec, n: usize, angular_nodes: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::Domain("dimension must be at least 1".into()));
        }
        let nf = n as f64;
        Ok(Self {
            phi,
            n,
            rule: GlRule::new(angular_nodes),
            omega: if n >= 2 { sphere_measure(nf - 2.0) } else { 0.0 },
            shell: sphere_measure(nf - 1.0),
            max_levels: MAX_ANGULAR_LEVELS,
        })
    }

    /// Cap the geometric refinement towards `theta = 0`, trading accuracy
    /// for speed in particle sums.
    pub fn with_max_levels(mut self, levels: u32) -> Self {
        self.max_levels = (levels as i32).clamp(1, MAX_ANGULAR_LEVELS);
        self
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn influence(&self) -> &InfluenceSpec {
        &self.phi
    }

    /// Measure of the unit `(n-1)`-sphere, the total weight of a shell.
    pub fn shell_measure(&self) -> f64 {
        self.shell
    }

    /// Angular integrals over the sphere of radius `s` seen from `r e1`, without
    /// the `s^{n-1}` factor: the plain kernel and the kernel weighted by the
    /// source direction's first component.
    pub fn angular(&self, r: f64, s: f64) -> (f64, f64) {
        let phi = &self.phi;
        if self.n == 1 {
            let near = phi.phi((r - s).abs());
            let far = phi.phi(r + s);
            return (near + far, near - far);
        }
        if r == 0.0 || s == 0.0 {
            return (self.shell * phi.phi(r.max(s)), 0.0);
        }
        let pi = std::f64::consts::PI;
        let delta = (r - s).abs() / r.max(s);
        let levels = if delta < 0.5 {
            ((pi / delta.max(1e-300)).log2().ceil() as i32).clamp(1, self.max_levels)
        } else {
            0
        };
        let mut breaks: Vec<f64> = (0..=levels).rev().map(|k| pi * 0.5_f64.powi(k)).collect();
        breaks.insert(0, 0.0);
        let power = self.n as i32 - 2;
        let (mut plain, mut cosw) = (0.0, 0.0);
        for w in breaks.windows(2) {
            for (theta, wt) in self.rule.mapped(w[0], w[1]) {
                let half = (0.5 * theta).sin();
                let d = ((r - s) * (r - s) + 4.0 * r * s * half * half).sqrt();
                let k = wt * phi.phi(d) * theta.sin().powi(power);
                plain += k;
                cosw += k * theta.cos();
            }
        }
        (self.omega * plain, self.omega * cosw)
    }

    /// Averages over the sphere of radius `s`: the contribution per unit mass
    /// of a uniformly spread shell to `psi(r)` and to `zeta(r) / u(s)`.
    pub fn shell_mean(&self, r: f64, s: f64) -> (f64, f64) {
        let (a, b) = self.angular(r, s);
        (a / self.shell, b / self.shell)
    }
}

/// Radius beyond which the density is negligible.
pub fn effective_support(rho: &dyn RadialField, n: usize) -> f64 {
    let sup = rho.support().min(rho.domain());
    if sup.is_finite() {
        return sup;
    }
    let peak = (0..=64).map(|k| rho.value(k as f64 * 0.125).abs()).fold(0.0, f64::max);
    let mut r = 1.0;
    while r < 1e6 && rho.value(r).abs() * r.powi(n as i32) > 1e-18 * peak.max(f64::MIN_POSITIVE) {
        r *= 1.25;
    }
    r
}

fn radial_integral(
    rho: &dyn RadialField,
    r: f64,
    n: usize,
    quad: &KernelQuadrature,
    mut integrand: impl FnMut(f64) -> f64,
) -> f64 {
    let outer = effective_support(rho, n);
    let mut extra = rho.breakpoints();
    if r > 0.0 && r < outer {
        extra.push(r);
        // Grade towards the shell through the target, where the angular
        // integral loses smoothness.
        for k in 1..=30 {
            let h = r * 0.5_f64.powi(k);
            extra.push(r - h);
            extra.push(r + h);
        }
    }
    let rule = GlRule::new(quad.radial_order);
    let mut split = 1;
    let mut prev = rule.composite(&panel_breaks(0.0, outer, &extra, split), &mut integrand);
    for _ in 0..quad.max_doublings {
        split *= 2;
        let next = rule.composite(&panel_breaks(0.0, outer, &extra, split), &mut integrand);
        let done = (next - prev).abs() <= quad.rel_tol * next.abs().max(1e-300);
        prev = next;
        if done {
            break;
        }
    }
    prev
}

/// Influence mass `psi(r) = integral phi(|r e1 - z|) rho(|z|) dz`.
pub fn eval_psi(rho: &dyn RadialField, phi: &InfluenceSpec, r: f64, n: usize, quad: &KernelQuadrature) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(CoreError::Domain(format!("radius must be non-negative, got {r}")));
    }
    let kernel = ShellKernel::new(*phi, n, quad.angular_nodes)?;
    let power = n as i32 - 1;
    Ok(radial_integral(rho, r, n, quad, |s| {
        let rho_s = rho.value(s);
        if rho_s == 0.0 {
            return 0.0;
        }
        s.powi(power) * rho_s * kernel.angular(r, s).0
    }))
}

/// Alignment force `zeta(r) = integral phi(|r e1 - z|) rho(|z|) (z_1/|z|) u(|z|) dz`.
pub fn eval_zeta(
    rho: &dyn RadialField,
    u: &dyn RadialField,
    phi: &InfluenceSpec,
    r: f64,
    n: usize,
    quad: &KernelQuadrature,
) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(CoreError::Domain(format!("radius must be non-negative, got {r}")));
    }
    let kernel = ShellKernel::new(*phi, n, quad.angular_nodes)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let power = n as i32 - 1;
    Ok(radial_integral(rho, r, n, quad, |s| {
        let rho_s = rho.value(s);
        if rho_s == 0.0 {
            return 0.0;
        }
        s.powi(power) * rho_s * u.value(s) * kernel.angular(r, s).1
    }))
}
