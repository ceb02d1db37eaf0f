//! Enhanced threshold curves and the frozen-coefficient comparison systems.
//!
//! Each curve is a separatrix of a planar system in `(y, B)` with `B' = -nu B`.
//! Written as a graph `y = sigma(B)` it solves a first-order ODE that is
//! singular at `B = 0`, so integration starts a small offset away from the
//! origin using the known slope there.

use serde::{Deserialize, Serialize};

use super::bounds::AlignmentBounds;
use crate::error::{invalid, CoreError, Result};
use crate::ode::{integrate, integrate_until_event, Direction, Event, FnSystem, IntegratorConfig, Termination};
use crate::outcome::{classify_stable, ClassificationOutcome};

/// Which enhanced threshold curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    /// Subcritical boundary for `q`.
    QPlus,
    /// Supercritical boundary for `q`.
    QMinus,
    /// Subcritical boundary for `G`.
    GPlus,
    /// Supercritical boundary for `G`.
    GMinus,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [CurveKind::QPlus, CurveKind::QMinus, CurveKind::GPlus, CurveKind::GMinus];

    pub fn name(&self) -> &'static str {
        match self {
            CurveKind::QPlus => "sigma_q_plus",
            CurveKind::QMinus => "sigma_q_minus",
            CurveKind::GPlus => "sigma_g_plus",
            CurveKind::GMinus => "sigma_g_minus",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| invalid("curve", format!("unknown curve `{name}`")))
    }

    /// Value and slope at the origin.
    pub fn origin(&self, b: &AlignmentBounds, n: f64) -> (f64, f64) {
        match self {
            CurveKind::QPlus => (-b.psi_min, 1.0 / (b.psi_min + b.nu)),
            CurveKind::QMinus => (-b.psi_max, -1.0 / (b.psi_max + b.nu)),
            CurveKind::GPlus => (0.0, (n - 1.0) / (b.psi_min + b.nu)),
            CurveKind::GMinus => (0.0, -(n - 1.0) / (b.psi_max + b.nu)),
        }
    }

    /// Right-hand side `d sigma / dx` for `x > 0`.
    pub fn slope(&self, b: &AlignmentBounds, n: f64, x: f64, sigma: f64) -> f64 {
        let numerator = match self {
            CurveKind::QPlus => {
                let c1 = if sigma < 0.0 { b.psi_min } else { b.psi_max };
                -sigma * sigma - c1 * sigma - x
            }
            CurveKind::QMinus => -sigma * sigma - b.psi_max * sigma + x,
            CurveKind::GPlus => -sigma * sigma + b.psi_min * sigma - (n - 1.0) * x,
            CurveKind::GMinus => -sigma * sigma + b.psi_max * sigma + (n - 1.0) * x,
        };
        numerator / (-b.nu * x)
    }
}

/// Sampled threshold curve on `[0, x_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub kind: CurveKind,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Start offset of the integration.
    pub offset: f64,
    /// Where the subcritical `q` curve crossed zero and changed branch.
    pub switch_at: Option<f64>,
    /// Where the curve escaped to infinity before `x_max`.
    pub truncated_at: Option<f64>,
}

impl ThresholdCurve {
    pub fn x_end(&self) -> f64 {
        *self.xs.last().expect("curve has samples")
    }

    /// Cubic Hermite interpolation between samples; `None` outside the range.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        if !(x >= 0.0) || x > self.x_end() {
            return None;
        }
        let k = match self.xs.partition_point(|&v| v <= x) {
            0 => return Some(self.values[0]),
            k if k >= self.xs.len() => return self.values.last().copied(),
            k => k - 1,
        };
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        Some(
            (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                + (s3 - 2.0 * s2 + s) * d0
                + (-2.0 * s3 + 3.0 * s2) * y1
                + (s3 - s2) * d1,
        )
    }
}

/// Default start offset for a curve.
pub fn default_offset(b: &AlignmentBounds) -> f64 {
    1e-6 * b.psi_min.powi(2).max(1.0)
}

/// Tolerance on the start-offset refinement check.
pub const OFFSET_REFINEMENT_TOL: f64 = 1e-7;

struct Segment {
    xs: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    termination: Termination,
}

#[allow(clippy::too_many_arguments)]
fn integrate_segment(
    kind: CurveKind,
    b: &AlignmentBounds,
    n: f64,
    x0: f64,
    y0: f64,
    x_max: f64,
    cfg: &IntegratorConfig,
    stop_at_zero: bool,
) -> Result<Segment> {
    let bb = *b;
    // Integrate in the shifted variable `x - x0`; the branch is fixed per segment.
    let branch_positive = y0 >= 0.0;
    let sys = FnSystem::new(1, move |tau: f64, y: &[f64], dy: &mut [f64]| {
        let x = x0 + tau;
        let sigma = if kind == CurveKind::QPlus {
            // Keep the branch fixed so the right-hand side is smooth within a phase.
            if branch_positive {
                y[0].max(0.0)
            } else {
                y[0].min(-0.0)
            }
        } else {
            y[0]
        };
        dy[0] = kind.slope(&bb, n, x, sigma);
    });
    let horizon = x_max - x0;
    let cfg = IntegratorConfig {
        h_init: cfg.h_init.min(0.1 * x0.max(1e-12)),
        ..cfg.with_horizon(horizon)
    };
    let rec = if stop_at_zero {
        integrate_until_event(&sys, &[y0], &cfg, Event::new("branch", Direction::Rising, true, |_, y| y[0]))?
    } else {
        integrate(&sys, &[y0], &cfg)?
    };
    let mut seg = Segment {
        xs: Vec::with_capacity(rec.len()),
        values: Vec::with_capacity(rec.len()),
        slopes: Vec::with_capacity(rec.len()),
        termination: rec.termination.clone(),
    };
    for k in 0..rec.len() {
        let x = x0 + rec.times()[k];
        let y = rec.state(k)[0];
        seg.xs.push(x);
        seg.values.push(y);
        seg.slopes.push(kind.slope(b, n, x, y));
    }
    Ok(seg)
}

fn integrate_curve(
    kind: CurveKind,
    b: &AlignmentBounds,
    n: f64,
    x_max: f64,
    offset: f64,
    cfg: &IntegratorConfig,
) -> Result<ThresholdCurve> {
    let (s0, d0) = kind.origin(b, n);
    let y_start = s0 + d0 * offset;
    let switching = kind == CurveKind::QPlus && y_start < 0.0;
    let first = integrate_segment(kind, b, n, offset, y_start, x_max, cfg, switching)?;
    let mut curve = ThresholdCurve {
        kind,
        xs: vec![0.0],
        values: vec![s0],
        slopes: vec![d0],
        offset,
        switch_at: None,
        truncated_at: None,
    };
    let append = |seg: &Segment, curve: &mut ThresholdCurve| {
        for k in 0..seg.xs.len() {
            if seg.xs[k] > *curve.xs.last().unwrap() {
                curve.xs.push(seg.xs[k]);
                curve.values.push(seg.values[k]);
                curve.slopes.push(seg.slopes[k]);
            }
        }
    };
    append(&first, &mut curve);
    let mut last = first;
    if let Termination::Event { t, .. } = last.termination {
        let xs = offset + t;
        curve.switch_at = Some(xs);
        if xs < x_max {
            let second = integrate_segment(kind, b, n, xs, 0.0, x_max, cfg, false)?;
            append(&second, &mut curve);
            last = second;
        }
    }
    match last.termination {
        Termination::ReachedHorizon | Termination::Event { .. } => {}
        _ => curve.truncated_at = Some(curve.x_end()),
    }
    Ok(curve)
}

/// Integrate an enhanced threshold curve on `(0, x_max]`.
///
/// The start offset is checked by repeating the first stretch from a ten
/// times smaller offset; a mismatch beyond [`OFFSET_REFINEMENT_TOL`] is a
/// refinement error.
pub fn enhanced_curve(
    kind: CurveKind,
    b: &AlignmentBounds,
    n: usize,
    x_max: f64,
    cfg: &IntegratorConfig,
) -> Result<ThresholdCurve> {
    enhanced_curve_with_offset(kind, b, n, x_max, default_offset(b), cfg)
}

pub fn enhanced_curve_with_offset(
    kind: CurveKind,
    b: &AlignmentBounds,
    n: usize,
    x_max: f64,
    offset: f64,
    cfg: &IntegratorConfig,
) -> Result<ThresholdCurve> {
    if !(b.psi_min > 0.0 && b.psi_max >= b.psi_min && b.nu > 0.0) {
        return Err(invalid("bounds", "need 0 < psi_min <= psi_max and nu > 0"));
    }
    if n == 0 {
        return Err(CoreError::Domain("dimension must be at least 1".into()));
    }
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(invalid("x_max", "must be positive and finite"));
    }
    if !(offset > 0.0) || offset >= x_max {
        return Err(invalid("offset", "must lie in (0, x_max)"));
    }
    let nf = n as f64;
    let curve = integrate_curve(kind, b, nf, x_max, offset, cfg)?;

    let x_check = (1e3 * offset).min(curve.x_end());
    if x_check > offset {
        let fine = integrate_curve(kind, b, nf, x_check, 0.1 * offset, cfg)?;
        if let (Some(a), Some(c)) = (curve.value_at(x_check), fine.value_at(x_check)) {
            let estimate = (a - c).abs();
            let tolerance = OFFSET_REFINEMENT_TOL * a.abs().max(1.0);
            if estimate > tolerance {
                return Err(CoreError::Refinement { estimate, tolerance });
            }
        }
    }
    Ok(curve)
}

/// Which frozen-coefficient comparison system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparisonKind {
    Q,
    G,
}

/// Worst-case frozen coefficients: the damping coefficient adversarial to the
/// sign of the state and the envelope pushing downward.
fn comparison_rhs(kind: ComparisonKind, b: &AlignmentBounds, n: f64, y: f64, env: f64) -> f64 {
    match kind {
        ComparisonKind::Q => {
            let c1 = if y < 0.0 { b.psi_min } else { b.psi_max };
            -y * y - c1 * y - env
        }
        ComparisonKind::G => {
            let c1 = if y < 0.0 { b.psi_max } else { b.psi_min };
            -y * y + c1 * y - (n - 1.0) * env
        }
    }
}

/// Classify `(y0, c0)` under the worst-case comparison system with `B' = -nu B`.
pub fn comparison_classify(
    kind: ComparisonKind,
    y0: f64,
    c0: f64,
    b: &AlignmentBounds,
    n: usize,
    cfg: &IntegratorConfig,
) -> Result<ClassificationOutcome> {
    if !(c0 >= 0.0) {
        return Err(invalid("c0", "must be non-negative"));
    }
    if !(b.nu > 0.0) {
        return Err(CoreError::DegenerateRate);
    }
    let bb = *b;
    let nf = n as f64;
    let sys = FnSystem::new(2, move |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = comparison_rhs(kind, &bb, nf, y[0], y[1]);
        dy[1] = -bb.nu * y[1];
    });
    classify_stable(cfg, &[], |c| integrate(&sys, &[y0, c0], c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ea::bounds::{rough_g_subcritical_bound, rough_q_subcritical_bound};

    fn bounds() -> AlignmentBounds {
        AlignmentBounds::from_psi(0.8, 1.0, 0.0).unwrap()
    }

    #[test]
    fn g_curves_start_at_zero() {
        for n in 1..=4 {
            for kind in [CurveKind::GPlus, CurveKind::GMinus] {
                let c = enhanced_curve(kind, &bounds(), n, 0.2, &IntegratorConfig::default()).unwrap();
                assert_eq!(c.values[0], 0.0);
                assert_eq!(c.value_at(0.0), Some(0.0));
            }
        }
    }

    #[test]
    fn one_dimensional_g_curves_vanish() {
        for kind in [CurveKind::GPlus, CurveKind::GMinus] {
            let c = enhanced_curve(kind, &bounds(), 1, 1.0, &IntegratorConfig::default()).unwrap();
            assert!(c.values.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn g_curves_separate_and_beat_rough_bounds() {
        let b = bounds();
        let cfg = IntegratorConfig::default();
        let plus = enhanced_curve(CurveKind::GPlus, &b, 2, 0.2, &cfg).unwrap();
        let minus = enhanced_curve(CurveKind::GMinus, &b, 2, 0.2, &cfg).unwrap();
        for k in 1..=40 {
            let x = 0.2 * k as f64 / 40.0;
            let (p, m) = (plus.value_at(x).unwrap(), minus.value_at(x).unwrap());
            assert!(p > 0.0 && m < 0.0, "x={x}: {p} {m}");
            if let Some(rough) = rough_g_subcritical_bound(&b.with_c0(x), 2.0) {
                assert!(p <= rough + 1e-12, "x={x}: {p} vs {rough}");
            }
        }
    }

    #[test]
    fn q_plus_switches_branch() {
        let b = bounds();
        let c = enhanced_curve(CurveKind::QPlus, &b, 2, 5.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(c.values[0], -0.8);
        if let Some(x) = c.switch_at {
            assert!(c.value_at(x).unwrap().abs() < 1e-8);
        }
        for k in 1..=50 {
            let x = 0.1 * k as f64;
            if let (Some(v), Some(rough)) = (c.value_at(x), rough_q_subcritical_bound(&b.with_c0(x))) {
                assert!(v <= rough + 1e-12);
            }
        }
    }

    #[test]
    fn origin_slope_matches_equation() {
        let b = bounds();
        for kind in CurveKind::ALL {
            let (s0, d0) = kind.origin(&b, 3.0);
            let x = 1e-7;
            let rhs = kind.slope(&b, 3.0, x, s0 + d0 * x);
            assert!((rhs - d0).abs() < 1e-5 * d0.abs().max(1.0), "{kind:?}: {rhs} vs {d0}");
        }
    }

    #[test]
    fn frozen_equilibrium_is_bounded() {
        let b = bounds();
        let out = comparison_classify(ComparisonKind::Q, -0.8, 0.0, &b, 2, &IntegratorConfig::default()).unwrap();
        assert!(out.verdict.is_bounded());
    }

    #[test]
    fn far_below_blows_up() {
        let b = bounds();
        let out = comparison_classify(ComparisonKind::Q, -5.0, 0.15, &b, 2, &IntegratorConfig::default()).unwrap();
        assert!(out.verdict.is_blowup());
        assert!(out.verdict.t_estimate().unwrap().is_finite());
    }

    #[test]
    fn curve_names_round_trip() {
        for kind in CurveKind::ALL {
            assert_eq!(CurveKind::from_name(kind.name()).unwrap(), kind);
        }
        assert!(CurveKind::from_name("sigma").is_err());
    }
}
