//! Phase-plane runs of the `(q, s)` subsystem and its rescaled form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::systems::{QsSystem, RescaledQsSystem, WvSystem};
use crate::error::{invalid, CoreError, Result};
use crate::model::ModelParams;
use crate::ode::{integrate, integrate_with_events, Direction, Event, IntegratorConfig, Termination, TrajectoryRecord};

/// Distance from the origin below which a vacuum-background orbit counts as converged.
pub const CONVERGENCE_RADIUS: f64 = 1e-2;
/// Phase-space distance within which an orbit counts as closed.
pub const CLOSURE_TOL: f64 = 1e-4;
const SECTION_EVENT: &str = "section";

/// Long-time behaviour of one phase-plane seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PortraitVerdict {
    ConvergesToOrigin { final_distance: f64 },
    Periodic { period: f64, return_distance: f64, start_return_distance: f64 },
    Bounded,
    Blowup { t_estimate: f64 },
    Invalid { reason: String },
}

/// One seed, its trajectory and verdict.
#[derive(Debug, Clone)]
pub struct PortraitTrajectory {
    pub seed: (f64, f64),
    pub record: Option<TrajectoryRecord>,
    pub verdict: PortraitVerdict,
}

fn qs_system(params: &ModelParams) -> QsSystem {
    QsSystem {
        n: params.n,
        kappa: params.kappa,
        c: params.c,
    }
}

/// Integrate `(q, s)` from one seed, recording upward crossings of `q = 0`.
///
/// On this section `s + c/n` reaches its maximum along the orbit.
pub fn qs_trajectory(params: &ModelParams, seed: (f64, f64), config: &IntegratorConfig) -> Result<TrajectoryRecord> {
    let sys = qs_system(params);
    let section = Event::new(SECTION_EVENT, Direction::Rising, false, |_t, y: &[f64]| y[0]);
    integrate_with_events(&sys, &[seed.0, seed.1], config, std::slice::from_ref(&section))
}

fn seed_error(params: &ModelParams, seed: (f64, f64)) -> Option<String> {
    let (q0, s0) = seed;
    if !q0.is_finite() || !s0.is_finite() {
        return Some("seed must be finite".into());
    }
    if params.c == 0.0 && !(s0 > 0.0) {
        return Some(format!("s0 = {s0} must be positive without background"));
    }
    if params.c > 0.0 && !(s0 > -params.c / params.n) {
        return Some(format!("s0 = {s0} must exceed -c/n"));
    }
    None
}

/// Classify one seed of the `(q, s)` phase plane.
pub fn classify_seed(params: &ModelParams, seed: (f64, f64), config: &IntegratorConfig) -> PortraitTrajectory {
    if let Some(reason) = seed_error(params, seed) {
        return PortraitTrajectory {
            seed,
            record: None,
            verdict: PortraitVerdict::Invalid { reason },
        };
    }
    let record = match qs_trajectory(params, seed, config) {
        Ok(r) => r,
        Err(e) => {
            return PortraitTrajectory {
                seed,
                record: None,
                verdict: PortraitVerdict::Invalid { reason: e.to_string() },
            }
        }
    };
    let verdict = verdict_for(params, seed, &record);
    PortraitTrajectory {
        seed,
        record: Some(record),
        verdict,
    }
}

fn verdict_for(params: &ModelParams, seed: (f64, f64), record: &TrajectoryRecord) -> PortraitVerdict {
    if let Termination::BlowupDetected { t_estimate, .. } = record.termination {
        return PortraitVerdict::Blowup { t_estimate };
    }
    if record.termination != Termination::ReachedHorizon {
        return PortraitVerdict::Invalid {
            reason: format!("integration stopped early: {:?}", record.termination),
        };
    }
    if params.c == 0.0 {
        let last = record.last_state();
        let d = last[0].hypot(last[1]);
        if d < CONVERGENCE_RADIUS {
            return PortraitVerdict::ConvergesToOrigin { final_distance: d };
        }
        return PortraitVerdict::Bounded;
    }
    match orbit_closure(record, seed) {
        Some((period, ret, start_ret)) if ret < CLOSURE_TOL => PortraitVerdict::Periodic {
            period,
            return_distance: ret,
            start_return_distance: start_ret,
        },
        _ => PortraitVerdict::Bounded,
    }
}

/// Period and closure distances from the first two section crossings.
pub fn orbit_closure(record: &TrajectoryRecord, seed: (f64, f64)) -> Option<(f64, f64, f64)> {
    let hits: Vec<_> = record.events.iter().filter(|h| h.name == SECTION_EVENT).collect();
    if hits.len() < 2 {
        return None;
    }
    let period = hits[1].t - hits[0].t;
    let ret = dist(&hits[1].state, &hits[0].state);
    let back = record.interpolate(period);
    let start_ret = (back[0] - seed.0).hypot(back[1] - seed.1);
    Some((period, ret, start_ret))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Trajectories and verdicts for a grid of seeds, in seed order.
pub fn qs_phase_portrait(params: &ModelParams, seeds: &[(f64, f64)], config: &IntegratorConfig) -> Vec<PortraitTrajectory> {
    seeds
        .par_iter()
        .map(|&seed| classify_seed(params, seed, config))
        .collect()
}

/// Rescaled run with the location and size of the `s` peak.
#[derive(Debug, Clone)]
pub struct RescaledRun {
    pub record: TrajectoryRecord,
    pub s_hat_max: f64,
    pub t_hat_star: f64,
    pub q_hat_max: f64,
}

/// Integrate the rescaled system in logarithmic time up to `config.t_max`.
///
/// The peak of the rescaled `s` is where the rescaled `q` first rises through
/// `2/n`; data already above that level peak at the start.
pub fn qshat_integrate(params: &ModelParams, seed: (f64, f64), config: &IntegratorConfig) -> Result<RescaledRun> {
    let (qh0, sh0) = seed;
    if !(sh0 > 0.0) {
        return Err(invalid("s_hat0", "must be positive"));
    }
    let sys = RescaledQsSystem {
        n: params.n,
        kappa: params.kappa,
    };
    let level = 2.0 / params.n;
    let peak = Event::new("peak", Direction::Rising, false, move |_t, y: &[f64]| y[0] - level);
    let record = integrate_with_events(&sys, &[qh0, sh0], config, std::slice::from_ref(&peak))?;
    if record.is_blowup() {
        return Err(CoreError::Domain("rescaled trajectory escaped".into()));
    }
    let (s_hat_max, t_hat_star) = if qh0 >= level {
        (sh0, 0.0)
    } else if let Some(hit) = record.events.first() {
        (hit.state[1], hit.t)
    } else {
        let (mut best, mut at) = (sh0, 0.0);
        for k in 0..record.len() {
            if record.state(k)[1] > best {
                best = record.state(k)[1];
                at = record.times()[k];
            }
        }
        (best, at)
    };
    let q_hat_max = (0..record.len()).fold(f64::NEG_INFINITY, |m, k| m.max(record.state(k)[0]));
    Ok(RescaledRun {
        record,
        s_hat_max,
        t_hat_star,
        q_hat_max,
    })
}

/// Integrate `(q, s)` and then the `(w, v)` system it drives.
pub fn integrate_wv(
    params: &ModelParams,
    qs0: (f64, f64),
    wv0: (f64, f64),
    config: &IntegratorConfig,
) -> Result<(TrajectoryRecord, TrajectoryRecord)> {
    let qs = integrate(&qs_system(params), &[qs0.0, qs0.1], config)?;
    if qs.termination != Termination::ReachedHorizon {
        return Err(CoreError::Domain(format!("(q, s) run ended early: {:?}", qs.termination)));
    }
    let sys = WvSystem {
        n: params.n,
        kappa: params.kappa,
        c: params.c,
        qs: &qs,
    };
    let wv = integrate(&sys, &[wv0.0, wv0.1], config)?;
    Ok((qs, wv))
}
