//! Classification of Euler-Poisson characteristic data.

use serde::{Deserialize, Serialize};

use super::systems::{BurgersSystem, EpCharSystem, SlabSystem};
use crate::error::{invalid, CoreError, Result};
use crate::model::{CharState, ModelKind, ModelParams, RadialField};
use crate::ode::{integrate, integrate_with_events, Direction, Event, IntegratorConfig};
use crate::outcome::{classify_stable, ClassificationOutcome};
use crate::quadrature::{graded_from_origin, panel_breaks, GlRule};

/// Radius of the `(q, s)` neighbourhood of the origin used for early exit.
pub const BASIN_RADIUS: f64 = 1e-3;
const BASIN_EVENT: &str = "basin";
const S_QUADRATURE_ORDER: usize = 16;

/// Membership in the explicit one-dimensional region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region1d {
    Subcritical,
    Supercritical,
}

/// Closed-form one-dimensional threshold.
///
/// Without background the region is `p0 > -sqrt(2 kappa rho0)`; with a
/// positive background it is `|p0| < sqrt(kappa (2 rho0 - c))`.
pub fn sigma_1d(p0: f64, rho0: f64, kappa: f64, c: f64) -> Region1d {
    let inside = if c == 0.0 {
        p0 > -(2.0 * kappa * rho0).sqrt()
    } else {
        let room = 2.0 * rho0 - c;
        room > 0.0 && p0.abs() < (kappa * room).sqrt()
    };
    if inside {
        Region1d::Subcritical
    } else {
        Region1d::Supercritical
    }
}

/// Boundary value of `p0` for the one-dimensional region, lower branch.
pub fn sigma_1d_lower(rho0: f64, kappa: f64, c: f64) -> Option<f64> {
    if c == 0.0 {
        Some(-(2.0 * kappa * rho0).sqrt())
    } else if 2.0 * rho0 > c {
        Some(-(kappa * (2.0 * rho0 - c)).sqrt())
    } else {
        None
    }
}

/// Mean excess charge inside radius `r`:
/// `r^{-n} * integral_0^r tau^{n-1} (rho0(tau) - c) dtau`.
pub fn initial_s_from_density(rho0: &dyn RadialField, c: f64, r: f64, n: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(CoreError::Domain(format!("radius must be positive, got {r}")));
    }
    if r > rho0.domain() {
        return Err(CoreError::Domain(format!(
            "radius {r} lies outside the profile domain {}",
            rho0.domain()
        )));
    }
    let rule = GlRule::new(S_QUADRATURE_ORDER);
    // Geometric grading resolves the tau^{n-1} weight near the origin for
    // non-integer n; profile nodes become panel breaks.
    let mut extra = graded_from_origin(r.min(first_break(rho0, r)), 24);
    extra.extend(rho0.breakpoints());
    let breaks = panel_breaks(0.0, r, &extra, 1);
    let integral = rule.composite(&breaks, |tau| tau.powf(n - 1.0) * rho0.value(tau));
    Ok(integral / r.powf(n) - c / n)
}

fn first_break(rho0: &dyn RadialField, r: f64) -> f64 {
    rho0.breakpoints()
        .into_iter()
        .find(|&b| b > 0.0)
        .unwrap_or(r)
}

fn validate_state(y0: &CharState, params: &ModelParams) -> Result<()> {
    if !(y0.rho >= 0.0) {
        return Err(invalid("rho", "density must be non-negative"));
    }
    if params.n > 1.0 && !(y0.s > -params.c / params.n) {
        return Err(invalid("s", "must exceed -c/n"));
    }
    if !y0.p.is_finite() || !y0.q.is_finite() || !y0.s.is_finite() || !y0.rho.is_finite() {
        return Err(invalid("state", "components must be finite"));
    }
    Ok(())
}

/// Classify characteristic data as globally bounded or finite-time blowup.
///
/// For `n = 1` only `(p, rho)` is integrated. For the Burgers limits `(p, q)`
/// is integrated and `s`, `rho` are ignored. Each classification runs twice,
/// the second time with tolerances tightened tenfold; disagreement is
/// reported as inconclusive.
pub fn classify_ep(y0: CharState, params: &ModelParams, config: &IntegratorConfig) -> Result<ClassificationOutcome> {
    params.validate()?;
    match params.model {
        ModelKind::DampedBurgers(d) => classify_burgers(y0, d, config),
        ModelKind::InviscidBurgers => classify_burgers(y0, 0.0, config),
        ModelKind::EulerAlignment => Err(CoreError::Unsupported(
            "alignment data is classified through the comparison systems".into(),
        )),
        ModelKind::EulerPoisson => {
            validate_state(&y0, params)?;
            if params.n == 1.0 {
                let sys = SlabSystem {
                    kappa: params.kappa,
                    c: params.c,
                };
                classify_stable(config, &[], |cfg| integrate(&sys, &[y0.p, y0.rho], cfg))
            } else {
                let sys = EpCharSystem {
                    n: params.n,
                    kappa: params.kappa,
                    c: params.c,
                };
                let y = y0.to_array();
                if params.c == 0.0 {
                    let (n, kappa) = (params.n, params.kappa);
                    classify_stable(config, &[BASIN_EVENT], |cfg| {
                        let basin = Event::new(BASIN_EVENT, Direction::Falling, true, move |_t, y: &[f64]| {
                            basin_indicator(y, n, kappa)
                        });
                        integrate_with_events(&sys, &y, cfg, std::slice::from_ref(&basin))
                    })
                } else {
                    classify_stable(config, &[], |cfg| integrate(&sys, &y, cfg))
                }
            }
        }
    }
}

/// Negative once `(q, s)` is inside the basin and `p` cannot start a
/// Riccati collapse: either `p >= 0` or `p' > 0`.
fn basin_indicator(y: &[f64], n: f64, kappa: f64) -> f64 {
    let (p, q, s, rho) = (y[0], y[1], y[2], y[3]);
    let near = q.abs() + s.abs() - BASIN_RADIUS;
    let unsafe_p = if p >= 0.0 {
        -1.0
    } else {
        p * p + kappa * (n - 1.0) * s - kappa * rho
    };
    near.max(unsafe_p)
}

fn classify_burgers(y0: CharState, damping: f64, config: &IntegratorConfig) -> Result<ClassificationOutcome> {
    let sys = BurgersSystem { damping };
    classify_stable(config, &[], |cfg| integrate(&sys, &[y0.p, y0.q], cfg))
}

/// Closed-form damped Burgers criterion: regular iff both rates stay above `-damping`.
pub fn damped_burgers_regular(p0: f64, q0: f64, damping: f64) -> bool {
    p0 >= -damping && q0 >= -damping
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ProfileKind, RadialProfile};

    fn ep(n: f64, kappa: f64, c: f64) -> ModelParams {
        ModelParams::euler_poisson(n, kappa, c).unwrap()
    }

    #[test]
    fn slab_examples() {
        let cfg = IntegratorConfig::default();
        let sub = classify_ep(CharState::new(-1.9, 0.0, 0.0, 2.0), &ep(1.0, 1.0, 0.0), &cfg).unwrap();
        assert!(sub.verdict.is_bounded(), "{sub:?}");
        let sup = classify_ep(CharState::new(-2.1, 0.0, 0.0, 2.0), &ep(1.0, 1.0, 0.0), &cfg).unwrap();
        assert!(sup.verdict.is_blowup(), "{sup:?}");
        let bg = classify_ep(CharState::new(1.5, 0.0, 0.0, 1.0), &ep(1.0, 1.0, 1.0), &cfg).unwrap();
        assert!(bg.verdict.is_blowup(), "{bg:?}");
    }

    #[test]
    fn slab_blowup_time_matches_quadratic_root() {
        // v(t) = v0 + w0 t + kappa t^2 / 2 with v = 1/rho, w = p/rho.
        let (p0, rho0) = (-3.0, 2.0);
        let (w0, v0) = (p0 / rho0, 1.0 / rho0);
        let disc: f64 = w0 * w0 - 2.0 * v0;
        let t_exact = -w0 - disc.sqrt();
        let out = classify_ep(CharState::new(p0, 0.0, 0.0, rho0), &ep(1.0, 1.0, 0.0), &IntegratorConfig::default()).unwrap();
        let te = out.verdict.t_estimate().unwrap();
        assert!((te - t_exact).abs() / t_exact < 1e-3, "{te} vs {t_exact}");
    }

    #[test]
    fn three_dimensional_qs_stays_bounded() {
        let cfg = IntegratorConfig::default();
        let out = classify_ep(CharState::new(0.0, -1.0, 0.1, 1.0), &ep(3.0, 1.0, 0.0), &cfg).unwrap();
        assert!(out.final_state[1].abs() < 10.0 && out.final_state[2].abs() < 10.0);
    }

    #[test]
    fn sigma_1d_examples() {
        assert_eq!(sigma_1d(-1.9, 2.0, 1.0, 0.0), Region1d::Subcritical);
        assert_eq!(sigma_1d(-2.0, 2.0, 1.0, 0.0), Region1d::Supercritical);
        assert_eq!(sigma_1d(0.0, 0.8, 1.0, 1.0), Region1d::Subcritical);
        assert_eq!(sigma_1d(1.5, 1.0, 1.0, 1.0), Region1d::Supercritical);
        assert_eq!(sigma_1d(0.0, 0.4, 1.0, 1.0), Region1d::Supercritical);
    }

    #[test]
    fn rejects_bad_state() {
        let cfg = IntegratorConfig::default();
        assert!(classify_ep(CharState::new(0.0, 0.0, -0.6, 1.0), &ep(2.0, 1.0, 1.0), &cfg).is_err());
        assert!(classify_ep(CharState::new(0.0, 0.0, 0.0, -1.0), &ep(2.0, 1.0, 0.0), &cfg).is_err());
    }

    #[test]
    fn damped_burgers_threshold() {
        let cfg = IntegratorConfig::default();
        let params = ModelParams::damped_burgers(2.0, 1.0).unwrap();
        let at = classify_ep(CharState::new(-1.0, 0.5, 0.0, 0.0), &params, &cfg).unwrap();
        assert!(at.verdict.is_bounded());
        let below = classify_ep(CharState::new(-1.05, 0.5, 0.0, 0.0), &params, &cfg).unwrap();
        assert!(below.verdict.is_blowup());
        let q_below = classify_ep(CharState::new(0.3, -1.05, 0.0, 0.0), &params, &cfg).unwrap();
        assert!(q_below.verdict.is_blowup());
    }

    #[test]
    fn s_from_constant_density() {
        let prof = RadialProfile::new(vec![0.0, 0.5, 1.0], vec![3.0; 3], ProfileKind::Density).unwrap();
        for n in [1.0, 2.0, 3.0, 2.5] {
            let s = initial_s_from_density(&prof, 0.0, 0.7, n).unwrap();
            assert!((s - 3.0 / n).abs() < 1e-12, "n = {n}: {s}");
            let matched = initial_s_from_density(&prof, 3.0, 0.7, n).unwrap();
            assert!(matched.abs() < 1e-12);
        }
    }

    #[test]
    fn s_outside_domain() {
        let prof = RadialProfile::new(vec![0.0, 1.0], vec![1.0; 2], ProfileKind::Density).unwrap();
        assert!(initial_s_from_density(&prof, 0.0, 1.5, 2.0).is_err());
        assert!(initial_s_from_density(&prof, 0.0, 0.0, 2.0).is_err());
    }
}
