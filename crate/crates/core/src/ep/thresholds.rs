//! Explicit subcritical bound for the multi-dimensional vacuum-background case.

use serde::{Deserialize, Serialize};

use super::phase::qshat_integrate;
use crate::error::{invalid, CoreError, Result};
use crate::model::ModelParams;
use crate::ode::IntegratorConfig;

/// Logarithmic-time horizon used for the rescaled run behind the constants.
pub const RESCALED_HORIZON: f64 = 40.0;
const DCRIT_TOL: f64 = 1e-12;

/// Constants controlling the decay envelopes of `q` and `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConstants {
    /// Supremum of `(t + 1) q(t)`.
    pub c_q: f64,
    /// Envelope constant with `s(t) <= c_s (t + 1)^{-n}`.
    pub c_s: f64,
    /// Upper bound on the growth of the weighted velocity ratio.
    pub c_qs: f64,
    /// Decay exponent offset `c_q (n - 1) - 2`.
    pub gamma: f64,
}

/// Compute the envelope constants from the rescaled `(q, s)` run.
pub fn compute_threshold_constants(
    params: &ModelParams,
    seed: (f64, f64),
    config: &IntegratorConfig,
) -> Result<ThresholdConstants> {
    let n = params.n;
    if !(n > 2.0) {
        return Err(CoreError::Unsupported(format!(
            "explicit constants need n > 2, got n = {n}"
        )));
    }
    let (q0, s0) = seed;
    if !(s0 > 0.0) {
        return Err(invalid("s0", "must be positive"));
    }
    let run = qshat_integrate(params, (q0, s0), &config.with_horizon(RESCALED_HORIZON))?;
    // The rescaled q exceeds 1 once it reaches 1 since its derivative there is
    // kappa * s_hat > 0; the clamp covers runs that approach from below.
    let c_q = run.q_hat_max.max(1.0);
    let c_s = run.s_hat_max * ((n - 2.0) * run.t_hat_star + n * (n - 2.0) / 2.0).exp();
    let c_qs = params.kappa / (n - 2.0) * (c_s / s0).powf((n - 1.0) / n);
    let gamma = c_q * (n - 1.0) - 2.0;
    Ok(ThresholdConstants { c_q, c_s, c_qs, gamma })
}

/// The auxiliary lower envelope `y(t)` whose positivity guarantees `v > 0`.
pub fn lower_envelope(t: f64, v0: f64, d: f64, gamma: f64, kappa: f64) -> f64 {
    v0 + (kappa / (gamma + 1.0) - d) * t - kappa / (gamma * (gamma + 1.0)) * (1.0 - (t + 1.0).powf(-gamma))
}

/// Minimum of the lower envelope as a function of `z = 1 - (gamma + 1) d / kappa`.
pub fn envelope_minimum(z: f64, v0: f64, gamma: f64, kappa: f64) -> f64 {
    v0 + kappa / gamma * z.powf(gamma / (gamma + 1.0)) - kappa / (gamma + 1.0) * (z + 1.0 / gamma)
}

/// Largest `d` for which the lower envelope stays positive for all time.
pub fn compute_dcrit(v0: f64, gamma: f64, kappa: f64) -> Result<f64> {
    for (name, v) in [("v0", v0), ("gamma", gamma), ("kappa", kappa)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(name, format!("must be positive and finite, got {v}")));
        }
    }
    let cap = kappa / (gamma + 1.0);
    if v0 >= kappa / (gamma * (gamma + 1.0)) {
        return Ok(cap);
    }
    // The minimum is increasing in z with a sign change on (0, 1).
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > DCRIT_TOL {
        let mid = 0.5 * (lo + hi);
        if envelope_minimum(mid, v0, gamma, kappa) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z_star = 0.5 * (lo + hi);
    Ok(cap * (1.0 - z_star))
}

/// Threshold on `w0 = p0/rho0`: data with `w0` above the returned value are
/// subcritical. `v0 = 1/rho0`.
pub fn explicit_sigma_plus(v0: f64, constants: &ThresholdConstants, kappa: f64, n: f64) -> Result<f64> {
    if !(n >= 3.0) {
        return Err(CoreError::Unsupported(format!(
            "closed-form bound needs n >= 3, got n = {n}"
        )));
    }
    let ThresholdConstants { c_s, c_qs, gamma, .. } = *constants;
    if !(c_s < n - 2.0) {
        return Err(CoreError::Unsupported(format!(
            "envelope constant {c_s} is not below n - 2 = {}",
            n - 2.0
        )));
    }
    let d_crit = compute_dcrit(v0, gamma, kappa)?;
    Ok((-d_crit + c_s * (v0 / (n - 1.0) + c_qs / (n - 2.0))) / (1.0 - c_s / (n - 2.0)))
}

/// Threshold on `w0` below which data are supercritical.
pub fn supercritical_w0(constants: &ThresholdConstants) -> f64 {
    -constants.c_qs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dcrit_saturated_branch() {
        assert_eq!(compute_dcrit(0.6, 1.0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn dcrit_root_branch() {
        let d = compute_dcrit(0.2, 1.0, 1.0).unwrap();
        let z = 1.0 - 2.0 * d;
        assert!((z - 0.13509).abs() < 1e-5, "z = {z}");
        assert!((d - 0.43246).abs() < 1e-5, "d = {d}");
        // The minimum of y over time vanishes at the critical value.
        let t_star = z.powf(-0.5) - 1.0;
        assert!(lower_envelope(t_star, 0.2, d, 1.0, 1.0).abs() < 1e-10);
    }

    #[test]
    fn above_cap_reaches_zero() {
        let d = 0.5 + 1e-3;
        let t = 1e4;
        assert!(lower_envelope(t, 10.0, d, 1.0, 1.0) < 0.0);
    }

    #[test]
    fn dcrit_rejects_bad_input() {
        assert!(compute_dcrit(0.0, 1.0, 1.0).is_err());
        assert!(compute_dcrit(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn constants_for_fast_expansion() {
        let params = ModelParams::euler_poisson(3.0, 1.0, 0.0).unwrap();
        let k = compute_threshold_constants(&params, (1.0, 0.1), &IntegratorConfig::default()).unwrap();
        assert!((k.c_s - 0.1 * 1.5_f64.exp()).abs() < 1e-12);
        assert!(k.c_q >= 1.0);
        assert!(k.gamma > 0.0 && k.c_qs.is_finite());
    }

    #[test]
    fn constants_need_three_dimensions() {
        let params = ModelParams::euler_poisson(2.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            compute_threshold_constants(&params, (1.0, 0.1), &IntegratorConfig::default()),
            Err(CoreError::Unsupported(_))
        ));
    }

    #[test]
    fn small_envelope_admits_negative_velocity() {
        let k = ThresholdConstants {
            c_q: 1.0,
            c_s: 1e-9,
            c_qs: 1.0,
            gamma: 1.0,
        };
        let th = explicit_sigma_plus(1.0, &k, 1.0, 3.0).unwrap();
        assert!(th < 0.0);
        assert!((th + compute_dcrit(1.0, 1.0, 1.0).unwrap()).abs() < 1e-8);
    }
}
