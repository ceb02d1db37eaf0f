//! Sampled threshold curves.

use anyhow::{bail, Result};
use ct_core::ea::{enhanced_curve, CurveKind};
use ct_core::ep::{compute_threshold_constants, explicit_sigma_plus, supercritical_w0};
use ct_core::CoreError;

use super::Context;
use crate::config::{ModelName, RunConfig};
use crate::output::{Cell, Table};

fn unsupported(t: &mut Table, curve: &str, reason: &str) {
    log::warn!("{curve}: {reason}");
    t.push(vec![Cell::Text(curve.into()), Cell::Text(String::new()), Cell::Text("unsupported".into())]);
}

/// Long-format table `curve, x, value`.
pub fn curves(cfg: &RunConfig, base: &std::path::Path) -> Result<Table> {
    let icfg = cfg.integrator()?;
    let c = &cfg.curves;
    if c.samples < 2 {
        bail!("[curves] samples must be at least 2");
    }
    let mut t = Table::new(["curve", "x", "value"]);
    match cfg.model.kind {
        ModelName::EulerAlignment => {
            let b = cfg.bounds(base)?;
            let n = cfg.dimension()?;
            for kind in CurveKind::ALL {
                let curve = match enhanced_curve(kind, &b, n, c.x_max, &icfg) {
                    Ok(curve) => curve,
                    Err(e) => {
                        unsupported(&mut t, kind.name(), &e.to_string());
                        continue;
                    }
                };
                if let Some(x) = curve.truncated_at {
                    log::info!("{} stops at x = {x:e}", kind.name());
                }
                let end = curve.x_end();
                for k in 0..c.samples {
                    let x = (end * k as f64 / (c.samples - 1) as f64).min(end);
                    let v = curve.value_at(x).unwrap_or(f64::NAN);
                    t.push(vec![Cell::Text(kind.name().into()), Cell::Num(x), Cell::Num(v)]);
                }
            }
        }
        ModelName::EulerPoisson => {
            let params = cfg.params()?;
            let constants = match compute_threshold_constants(&params, (c.q0, c.s0), &icfg) {
                Ok(k) => k,
                Err(CoreError::Unsupported(reason)) => {
                    unsupported(&mut t, "sigma_plus", &reason);
                    unsupported(&mut t, "supercritical_w0", &reason);
                    return Ok(t);
                }
                Err(e) => return Err(e.into()),
            };
            let v0s: Vec<f64> = (0..c.samples)
                .map(|k| c.v0_min + (c.v0_max - c.v0_min) * k as f64 / (c.samples - 1) as f64)
                .collect();
            let mut rows = Vec::new();
            for &v0 in &v0s {
                match explicit_sigma_plus(v0, &constants, params.kappa, params.n) {
                    Ok(w) => rows.push(vec![Cell::Text("sigma_plus".into()), Cell::Num(v0), Cell::Num(w)]),
                    Err(CoreError::Unsupported(reason)) => {
                        rows.clear();
                        unsupported(&mut t, "sigma_plus", &reason);
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            t.rows.extend(rows);
            let w = supercritical_w0(&constants);
            for &v0 in &v0s {
                t.push(vec![Cell::Text("supercritical_w0".into()), Cell::Num(v0), Cell::Num(w)]);
            }
        }
        _ => bail!("curves are defined for euler-alignment and euler-poisson models"),
    }
    Ok(t)
}

pub fn run(ctx: &Context) -> Result<i32> {
    let t = curves(&ctx.config, &ctx.base)?;
    let text = t.render(ctx.format, &ctx.provenance)?;
    ctx.sink.emit(&format!("curves.{}", ctx.extension()), &text)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_bound_unsupported_in_two_dimensions() {
        let cfg = RunConfig::parse("[model]\nkind = \"euler-poisson\"\nn = 2.0\n[curves]\nsamples = 3\n").unwrap();
        let t = curves(&cfg, std::path::Path::new(".")).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.rows.iter().all(|r| matches!(&r[2], Cell::Text(s) if s == "unsupported")));
    }
}
