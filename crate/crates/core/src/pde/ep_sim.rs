//! Euler-Poisson runs: every path carries a closed characteristic system.

use rayon::prelude::*;

use super::ensemble::{reconstruct_fields, CharacteristicEnsemble, FieldSnapshot};
use super::{BlowupCause, PdeConfig, PdeOutcome, PdeRun};
use crate::ep::classify::initial_s_from_density;
use crate::ep::systems::EpCharSystem;
use crate::error::{CoreError, Result};
use crate::model::{CharState, ModelKind, ModelParams, RadialField};
use crate::ode::{integrate, OdeSystem, Termination, TrajectoryRecord};

/// Characteristic system in `(p, q, s, rho, r)` with `r' = r q`.
struct PathSystem(EpCharSystem);

impl OdeSystem for PathSystem {
    fn dim(&self) -> usize {
        5
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        self.0.rhs(t, &y[..4], &mut dy[..4]);
        dy[4] = y[4] * y[1];
    }
}

/// Initial characteristic state at radius `r`.
pub fn initial_path_state(
    rho0: &dyn RadialField,
    u0: &dyn RadialField,
    params: &ModelParams,
    r: f64,
) -> Result<CharState> {
    let s = initial_s_from_density(rho0, params.c, r, params.n)?;
    Ok(CharState::new(u0.derivative(r), u0.value(r) / r, s, rho0.value(r)))
}

fn snapshot_at(base: &CharacteristicEnsemble, records: &[TrajectoryRecord], t: f64) -> Result<FieldSnapshot> {
    let mut ens = base.clone();
    ens.time = t;
    let mut states = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let y = rec.interpolate(t);
        ens.radii[i] = y[4];
        ens.velocities[i] = y[4] * y[1];
        states.push(CharState::from_slice(&y[..4]));
    }
    ens.states = Some(states);
    let mut snap = reconstruct_fields(&ens)?;
    // Along characteristics the gradient is known exactly.
    let states = snap.path_states.as_ref().unwrap();
    snap.p = states.iter().map(|s| s.p).collect();
    snap.q = states.iter().map(|s| s.q).collect();
    Ok(snap)
}

/// Evolve an Euler-Poisson ensemble to `cfg.t_end` or the first blowup.
///
/// Paths are integrated independently in parallel. The run halts at the
/// earliest time any path stops; crossings are checked at every snapshot.
pub fn simulate_ep(
    rho0: &dyn RadialField,
    u0: &dyn RadialField,
    params: &ModelParams,
    cfg: &PdeConfig,
) -> Result<PdeRun> {
    params.validate()?;
    cfg.validate()?;
    if params.model != ModelKind::EulerPoisson {
        return Err(CoreError::Unsupported("simulate_ep needs the Euler-Poisson model".into()));
    }
    let n = params.integer_dimension()?;
    let mut base = CharacteristicEnsemble::from_profiles(rho0, u0, n, cfg.paths, cfg.radius)?;
    let starts = base
        .radii
        .iter()
        .map(|&r| initial_path_state(rho0, u0, params, r))
        .collect::<Result<Vec<_>>>()?;
    base.states = Some(starts.clone());
    let sys = PathSystem(EpCharSystem {
        n: params.n,
        kappa: params.kappa,
        c: params.c,
    });
    let icfg = cfg.integrator.with_horizon(cfg.t_end);
    let records = base
        .radii
        .par_iter()
        .zip(starts.par_iter())
        .map(|(&r, st)| {
            let [p, q, s, rho] = st.to_array();
            integrate(&sys, &[p, q, s, rho, r], &icfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let path_blowup_times: Vec<Option<f64>> = records.iter().map(|r| r.blowup_time()).collect();

    // Earliest stop among paths that did not reach the horizon.
    let halt = records
        .iter()
        .enumerate()
        .filter(|(_, r)| !matches!(r.termination, Termination::ReachedHorizon))
        .min_by(|a, b| a.1.last_time().total_cmp(&b.1.last_time()));

    let t_halt = halt.map_or(cfg.t_end, |(_, r)| r.last_time());
    if let Some((path, rec)) = halt {
        log::debug!("path {path} stopped at t = {t_halt:e}: {:?}", rec.termination);
    }
    let mut times: Vec<f64> = cfg.snapshot_times().into_iter().filter(|&t| t < t_halt).collect();
    times.push(t_halt);

    let mut snapshots = Vec::with_capacity(times.len());
    for &t in &times {
        match snapshot_at(&base, &records, t) {
            Ok(s) => snapshots.push(s),
            Err(CoreError::Crossing { time, radius }) => {
                let path = crossing_path(&base, &records, t);
                return Ok(PdeRun {
                    snapshots,
                    outcome: PdeOutcome::Blowup {
                        time,
                        radius,
                        path,
                        cause: BlowupCause::Crossing,
                    },
                    path_blowup_times,
                });
            }
            Err(e) => return Err(e),
        }
    }

    let outcome = match halt {
        None => PdeOutcome::Completed,
        Some((path, rec)) => {
            let radius = rec.last_state()[4];
            let first_blowup = path_blowup_times
                .iter()
                .enumerate()
                .filter_map(|(i, t)| t.map(|t| (i, t)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match (&rec.termination, first_blowup) {
                (Termination::BlowupDetected { .. }, Some((i, time))) => PdeOutcome::Blowup {
                    time,
                    radius: records[i].last_state()[4],
                    path: i,
                    cause: BlowupCause::PathEscape,
                },
                (term, _) => PdeOutcome::Inconclusive {
                    time: rec.last_time(),
                    reason: format!("path {path} at r = {radius:.6e} stopped: {term:?}"),
                },
            }
        }
    };
    Ok(PdeRun {
        snapshots,
        outcome,
        path_blowup_times,
    })
}

fn crossing_path(base: &CharacteristicEnsemble, records: &[TrajectoryRecord], t: f64) -> usize {
    let mut ens = base.clone();
    for (i, rec) in records.iter().enumerate() {
        ens.radii[i] = rec.interpolate(t)[4];
    }
    ens.crossing().map_or(0, |(i, _)| i)
}
