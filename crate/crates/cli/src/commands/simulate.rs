//! Characteristic-ensemble PDE runs: snapshots, diagnostics and metadata.

use anyhow::{anyhow, bail, Result};
use ct_core::ea::AlignmentBounds;
use ct_core::pde::{
    diagnostics_series, estimate_flock_radius, simulate_ea, simulate_ep, BlowupCause, DiagnosticsSeries,
    FieldSnapshot, PdeOutcome, PdeRun,
};
use serde::Serialize;

use super::Context;
use crate::config::{ModelName, RunConfig};
use crate::output::{to_json_string, Cell, Fixed, Provenance, Table};

pub fn simulate(cfg: &RunConfig, base: &std::path::Path) -> Result<PdeRun> {
    let params = cfg.params()?;
    let pde = cfg.pde()?;
    let rho = cfg.density(base)?;
    let u = cfg.velocity(base)?;
    let run = match cfg.model.kind {
        ModelName::EulerPoisson => simulate_ep(rho.as_ref(), u.as_ref(), &params, &pde)?,
        ModelName::EulerAlignment => simulate_ea(rho.as_ref(), u.as_ref(), &params, &cfg.influence()?, &pde)?,
        _ => bail!("simulate needs the euler-poisson or euler-alignment model"),
    };
    Ok(run)
}

pub fn snapshot_table(s: &FieldSnapshot) -> Table {
    let g = s.g();
    let mut columns = vec!["r", "u", "rho", "p", "q", "divergence", "spectral_gap"];
    if g.is_some() {
        columns.extend(["psi", "g"]);
    }
    let mut t = Table::new(columns);
    let (div, gap) = (s.divergence(), s.spectral_gap());
    for i in 0..s.len() {
        let mut row = vec![
            Cell::Num(s.radii[i]),
            Cell::Num(s.velocity[i]),
            Cell::Num(s.density[i]),
            Cell::Num(s.p[i]),
            Cell::Num(s.q[i]),
            Cell::Num(div[i]),
            Cell::Num(gap[i]),
        ];
        if let (Some(psi), Some(g)) = (&s.psi, &g) {
            row.extend([Cell::Num(psi[i]), Cell::Num(g[i])]);
        }
        t.push(row);
    }
    t
}

pub fn diagnostics_table(d: &DiagnosticsSeries) -> Table {
    let mut t = Table::new([
        "t",
        "max_grad_u",
        "grad_u_integral",
        "velocity_oscillation",
        "log_velocity_oscillation",
        "support_radius",
        "min_radius",
        "mass",
    ]);
    for k in 0..d.len() {
        t.push(vec![
            Cell::Num(d.times[k]),
            Cell::Num(d.max_grad_u[k]),
            Cell::Num(d.grad_u_integral[k]),
            Cell::Num(d.velocity_oscillation[k]),
            Cell::Num(d.velocity_oscillation[k].ln()),
            Cell::Num(d.support_radius[k]),
            Cell::Num(d.min_radius[k]),
            Cell::Num(d.mass_total[k]),
        ]);
    }
    t
}

#[derive(Serialize)]
struct Metadata<'a> {
    provenance: &'a Provenance,
    status: &'static str,
    code: i32,
    time: Option<Fixed>,
    radius: Option<Fixed>,
    path: Option<usize>,
    cause: Option<&'static str>,
    reason: Option<String>,
    snapshots: usize,
    mass_drift: Fixed,
    /// Largest observed support radius and the alignment rate it implies.
    flock_radius: Option<Fixed>,
    alignment_rate: Option<Fixed>,
}

pub fn exit_code(outcome: &PdeOutcome) -> i32 {
    match outcome {
        PdeOutcome::Completed => 0,
        PdeOutcome::Blowup { .. } => 2,
        PdeOutcome::Inconclusive { .. } => 3,
    }
}

pub fn run(ctx: &Context) -> Result<i32> {
    if ctx.sink.dir.is_none() {
        bail!("simulate writes several files and needs --out <dir>");
    }
    let run = simulate(&ctx.config, &ctx.base)?;
    let ext = ctx.extension();
    for (k, snap) in run.snapshots.iter().enumerate() {
        let text = snapshot_table(snap).render(ctx.format, &ctx.provenance)?;
        ctx.sink.emit(&format!("snapshots/snapshot_{k:05}.{ext}"), &text)?;
    }
    let diag = diagnostics_series(&run.snapshots)?;
    let text = diagnostics_table(&diag).render(ctx.format, &ctx.provenance)?;
    ctx.sink.emit(&format!("diagnostics.{ext}"), &text)?;

    let (mut flock_radius, mut alignment_rate) = (None, None);
    if ctx.config.model.kind == ModelName::EulerAlignment {
        let d = estimate_flock_radius(&run.snapshots).ok_or_else(|| anyhow!("no snapshots"))?;
        flock_radius = Some(Fixed(d));
        if let Ok(b) = AlignmentBounds::from_parts(diag.mass_total[0], 0.0, d, &ctx.config.influence()?) {
            alignment_rate = Some(Fixed(b.nu));
        }
    }
    let mut meta = Metadata {
        provenance: &ctx.provenance,
        status: "completed",
        code: exit_code(&run.outcome),
        time: None,
        radius: None,
        path: None,
        cause: None,
        reason: None,
        snapshots: run.snapshots.len(),
        mass_drift: Fixed(diag.mass_drift()),
        flock_radius,
        alignment_rate,
    };
    match &run.outcome {
        PdeOutcome::Completed => {}
        PdeOutcome::Blowup { time, radius, path, cause } => {
            meta.status = "blowup";
            meta.time = Some(Fixed(*time));
            meta.radius = Some(Fixed(*radius));
            meta.path = Some(*path);
            meta.cause = Some(match cause {
                BlowupCause::PathEscape => "path-escape",
                BlowupCause::Crossing => "crossing",
            });
        }
        PdeOutcome::Inconclusive { time, reason } => {
            meta.status = "inconclusive";
            meta.time = Some(Fixed(*time));
            meta.reason = Some(reason.clone());
        }
    }
    ctx.sink.emit("metadata.json", &(to_json_string(&meta)? + "\n"))?;
    Ok(exit_code(&run.outcome))
}
