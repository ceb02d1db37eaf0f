//! Phase-plane trajectory bundles for the `(q, s)` subsystem.

use anyhow::{bail, Result};
use ct_core::ep::{qs_phase_portrait, qshat_integrate, PortraitVerdict};
use rayon::prelude::*;

use super::Context;
use crate::config::{ModelName, RunConfig};
use crate::output::{Cell, Table};

/// Long-format trajectories and a per-seed summary.
pub fn portrait(cfg: &RunConfig) -> Result<(Table, Table)> {
    if cfg.model.kind != ModelName::EulerPoisson {
        bail!("phase-portrait needs the euler-poisson model");
    }
    let section = cfg.portrait.clone().unwrap_or_default();
    if section.seeds.is_empty() {
        bail!("[portrait] seeds must not be empty");
    }
    let params = cfg.params()?;
    let icfg = cfg.integrator()?;
    let seeds: Vec<(f64, f64)> = section.seeds.iter().map(|s| (s[0], s[1])).collect();
    let mut summary = Table::new(["seed", "q0", "s0", "verdict", "value"]);

    if section.rescaled {
        let mut t = Table::new(["seed", "t", "q_hat", "s_hat"]);
        let runs: Vec<_> = seeds.par_iter().map(|&seed| qshat_integrate(&params, seed, &icfg)).collect();
        for (id, (seed, run)) in seeds.iter().zip(runs).enumerate() {
            let run = match run {
                Ok(run) => run,
                Err(e) => {
                    log::warn!("seed {id} {seed:?} skipped: {e}");
                    continue;
                }
            };
            for k in 0..run.record.len() {
                let y = run.record.state(k);
                t.push(vec![Cell::Int(id as i64), Cell::Num(run.record.times()[k]), Cell::Num(y[0]), Cell::Num(y[1])]);
            }
            summary.push(vec![
                Cell::Int(id as i64),
                Cell::Num(seed.0),
                Cell::Num(seed.1),
                Cell::Text("s_hat_max".into()),
                Cell::Num(run.s_hat_max),
            ]);
        }
        return Ok((t, summary));
    }

    let mut t = Table::new(["seed", "t", "q", "s"]);
    for (id, traj) in qs_phase_portrait(&params, &seeds, &icfg).into_iter().enumerate() {
        let (label, value) = match &traj.verdict {
            PortraitVerdict::Invalid { reason } => {
                log::warn!("seed {id} {:?} skipped: {reason}", traj.seed);
                continue;
            }
            PortraitVerdict::ConvergesToOrigin { final_distance } => ("converges", *final_distance),
            PortraitVerdict::Periodic { period, .. } => ("periodic", *period),
            PortraitVerdict::Bounded => ("bounded", f64::NAN),
            PortraitVerdict::Blowup { t_estimate } => ("blowup", *t_estimate),
        };
        if let Some(rec) = &traj.record {
            for k in 0..rec.len() {
                let y = rec.state(k);
                t.push(vec![Cell::Int(id as i64), Cell::Num(rec.times()[k]), Cell::Num(y[0]), Cell::Num(y[1])]);
            }
        }
        summary.push(vec![
            Cell::Int(id as i64),
            Cell::Num(traj.seed.0),
            Cell::Num(traj.seed.1),
            Cell::Text(label.into()),
            Cell::Num(value),
        ]);
    }
    Ok((t, summary))
}

pub fn run(ctx: &Context) -> Result<i32> {
    let (traj, summary) = portrait(&ctx.config)?;
    let ext = ctx.extension();
    ctx.sink.emit(&format!("portrait.{ext}"), &traj.render(ctx.format, &ctx.provenance)?)?;
    if ctx.sink.dir.is_some() {
        ctx.sink
            .emit(&format!("portrait_summary.{ext}"), &summary.render(ctx.format, &ctx.provenance)?)?;
    }
    Ok(0)
}
