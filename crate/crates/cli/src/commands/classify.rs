//! Classify one initial state.

use anyhow::Result;
use ct_core::ea::comparison_classify;
use ct_core::ep::classify_ep;
use ct_core::{ClassificationOutcome, Verdict};
use serde::Serialize;

use super::Context;
use crate::config::{ModelName, RunConfig};
use crate::output::{fixed_vec, to_json_string, Cell, Fixed, Format, Provenance, Table};

/// Run the classifier selected by the model kind.
pub fn classify_outcome(cfg: &RunConfig, base: &std::path::Path) -> Result<ClassificationOutcome> {
    let params = cfg.params()?;
    let icfg = cfg.integrator()?;
    if cfg.model.kind == ModelName::EulerAlignment {
        let a = cfg.alignment()?;
        let b = cfg.bounds(base)?;
        return Ok(comparison_classify(cfg.comparison_kind()?, a.y0, b.c0, &b, cfg.dimension()?, &icfg)?);
    }
    Ok(classify_ep(cfg.state()?, &params, &icfg)?)
}

#[derive(Serialize)]
struct Diagnostics {
    max_norm: Fixed,
    final_time: Fixed,
    final_state: Vec<Fixed>,
    reason: Option<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    provenance: &'a Provenance,
    verdict: &'static str,
    code: i32,
    t_estimate: Option<Fixed>,
    diagnostics: Diagnostics,
}

pub fn render(out: &ClassificationOutcome, format: Format, prov: &Provenance) -> Result<String> {
    let reason = match &out.verdict {
        Verdict::Inconclusive { reason } => Some(reason.clone()),
        _ => None,
    };
    match format {
        Format::Json => {
            let report = Report {
                provenance: prov,
                verdict: out.verdict.label(),
                code: out.verdict.code(),
                t_estimate: out.verdict.t_estimate().map(Fixed),
                diagnostics: Diagnostics {
                    max_norm: Fixed(out.max_norm),
                    final_time: Fixed(out.final_time),
                    final_state: fixed_vec(&out.final_state),
                    reason,
                },
            };
            Ok(to_json_string(&report)? + "\n")
        }
        Format::Csv => {
            let mut t = Table::new(["verdict", "code", "t_estimate", "max_norm", "final_time", "reason"]);
            t.push(vec![
                Cell::Text(out.verdict.label().into()),
                Cell::Int(out.verdict.code() as i64),
                Cell::Num(out.verdict.t_estimate().unwrap_or(f64::NAN)),
                Cell::Num(out.max_norm),
                Cell::Num(out.final_time),
                Cell::Text(reason.unwrap_or_default()),
            ]);
            t.to_csv(prov)
        }
    }
}

pub fn run(ctx: &Context) -> Result<i32> {
    let out = classify_outcome(&ctx.config, &ctx.base)?;
    let text = render(&out, ctx.format, &ctx.provenance)?;
    ctx.sink.emit(&format!("classify.{}", ctx.extension()), &text)?;
    Ok(out.verdict.code())
}
