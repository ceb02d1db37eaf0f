//! Verdict maps over a two-axis grid of initial data.

use anyhow::{bail, Result};
use ct_core::ea::comparison_classify;
use ct_core::ep::classify_ep;
use ct_core::CharState;
use rayon::prelude::*;
use serde::Serialize;

use super::Context;
use crate::config::{ModelName, RunConfig};
use crate::output::{fixed_vec, to_json_string, Cell, Fixed, Format, Provenance, Table};

/// Largest grid a sweep accepts.
pub const MAX_CELLS: usize = 1_000_000;

const STATE_AXES: [&str; 4] = ["p0", "q0", "s0", "rho0"];
const ALIGNMENT_AXES: [&str; 2] = ["y0", "c0"];

/// Axis names, axis values and the row-major verdict codes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub names: [String; 2],
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub codes: Vec<Vec<i32>>,
}

fn set_state(state: &mut CharState, axis: &str, v: f64) {
    match axis {
        "p0" => state.p = v,
        "q0" => state.q = v,
        "s0" => state.s = v,
        _ => state.rho = v,
    }
}

pub fn sweep(cfg: &RunConfig, base: &std::path::Path) -> Result<SweepResult> {
    let Some(grid) = &cfg.sweep else {
        bail!("missing [sweep] table");
    };
    let alignment = cfg.model.kind == ModelName::EulerAlignment;
    let allowed: &[&str] = if alignment { &ALIGNMENT_AXES } else { &STATE_AXES };
    for axis in [&grid.rows, &grid.cols] {
        if !allowed.contains(&axis.name.as_str()) {
            bail!("unknown sweep axis `{}`; expected one of {allowed:?}", axis.name);
        }
        if axis.count == 0 {
            bail!("sweep axis `{}` needs at least one value", axis.name);
        }
    }
    if grid.rows.name == grid.cols.name {
        bail!("sweep axes must differ");
    }
    let cells = grid.rows.count.saturating_mul(grid.cols.count);
    if cells > MAX_CELLS {
        bail!("sweep of {cells} cells exceeds the limit of {MAX_CELLS}");
    }
    let rows = grid.rows.values();
    let cols = grid.cols.values();
    let icfg = cfg.integrator()?;
    let params = cfg.params()?;

    let flat: Vec<i32> = if alignment {
        let a = cfg.alignment()?;
        let b = cfg.bounds(base)?;
        let kind = cfg.comparison_kind()?;
        let n = cfg.dimension()?;
        (0..cells)
            .into_par_iter()
            .map(|k| {
                let (mut y0, mut c0) = (a.y0, b.c0);
                for (axis, v) in [(&grid.rows.name, rows[k / cols.len()]), (&grid.cols.name, cols[k % cols.len()])] {
                    if axis == "y0" {
                        y0 = v;
                    } else {
                        c0 = v;
                    }
                }
                comparison_classify(kind, y0, c0, &b, n, &icfg).map(|o| o.verdict.code())
            })
            .collect::<Result<_, _>>()?
    } else {
        let start = cfg.state.clone().unwrap_or_default();
        let start = CharState::new(start.p0, start.q0, start.s0, start.rho0);
        (0..cells)
            .into_par_iter()
            .map(|k| {
                let mut state = start;
                set_state(&mut state, &grid.rows.name, rows[k / cols.len()]);
                set_state(&mut state, &grid.cols.name, cols[k % cols.len()]);
                classify_ep(state, &params, &icfg).map(|o| o.verdict.code())
            })
            .collect::<Result<_, _>>()?
    };
    let codes = flat.chunks(cols.len()).map(<[i32]>::to_vec).collect();
    Ok(SweepResult {
        names: [grid.rows.name.clone(), grid.cols.name.clone()],
        rows,
        cols,
        codes,
    })
}

#[derive(Serialize)]
struct AxisJson<'a> {
    name: &'a str,
    values: Vec<Fixed>,
}

#[derive(Serialize)]
struct SweepJson<'a> {
    provenance: &'a Provenance,
    axes: [AxisJson<'a>; 2],
    codes: &'a [Vec<i32>],
}

pub fn render(res: &SweepResult, format: Format, prov: &Provenance) -> Result<String> {
    match format {
        Format::Csv => {
            let corner = format!("{}\\{}", res.names[0], res.names[1]);
            let mut header = vec![corner];
            header.extend(res.cols.iter().map(|&v| crate::output::fmt_float(v)));
            let mut t = Table::new(header);
            for (r, row) in res.rows.iter().zip(&res.codes) {
                let mut cells = vec![Cell::Num(*r)];
                cells.extend(row.iter().map(|&c| Cell::Int(c as i64)));
                t.push(cells);
            }
            t.to_csv(prov)
        }
        Format::Json => {
            let doc = SweepJson {
                provenance: prov,
                axes: [
                    AxisJson {
                        name: &res.names[0],
                        values: fixed_vec(&res.rows),
                    },
                    AxisJson {
                        name: &res.names[1],
                        values: fixed_vec(&res.cols),
                    },
                ],
                codes: &res.codes,
            };
            Ok(to_json_string(&doc)? + "\n")
        }
    }
}

pub fn run(ctx: &Context) -> Result<i32> {
    let res = sweep(&ctx.config, &ctx.base)?;
    let text = render(&res, ctx.format, &ctx.provenance)?;
    ctx.sink.emit(&format!("sweep.{}", ctx.extension()), &text)?;
    Ok(0)
}
