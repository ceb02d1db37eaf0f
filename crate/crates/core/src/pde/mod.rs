//! Characteristic-ensemble solver for the radial PDE systems.
//!
//! Mass is carried by radial paths that move with the fluid. Fields are
//! rebuilt from the paths at snapshot times; a shock shows up as two paths
//! crossing.

pub mod diagnostics;
pub mod ea_sim;
pub mod ensemble;
pub mod ep_sim;
pub mod interp;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ode::IntegratorConfig;

pub use diagnostics::{diagnostics_series, estimate_flock_radius, DiagnosticsSeries};
pub use ea_sim::simulate_ea;
pub use ensemble::{difference_gradient, reconstruct_fields, CharacteristicEnsemble, FieldSnapshot};
pub use ep_sim::simulate_ep;
pub use interp::Pchip;

/// Resolution and horizon of a PDE run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeConfig {
    pub paths: usize,
    pub t_end: f64,
    /// Number of equal intervals between snapshots.
    pub snapshots: usize,
    /// Outer radius of the initial ensemble; defaults to the density support.
    pub radius: Option<f64>,
    pub integrator: IntegratorConfig,
    /// Upper bound on the alignment time step.
    pub max_dt: Option<f64>,
    /// Gauss-Legendre nodes per angular panel in alignment kernel sums.
    pub angular_nodes: usize,
    /// Geometric refinement levels near coincident shells in kernel sums.
    pub angular_levels: u32,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            paths: 200,
            t_end: 10.0,
            snapshots: 100,
            radius: None,
            integrator: IntegratorConfig::default(),
            max_dt: None,
            angular_nodes: 16,
            angular_levels: 6,
        }
    }
}

impl PdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths < 3 {
            return Err(invalid("paths", "need at least three paths"));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(invalid("t_end", "must be positive and finite"));
        }
        if self.snapshots == 0 {
            return Err(invalid("snapshots", "need at least one snapshot interval"));
        }
        if let Some(dt) = self.max_dt {
            if !(dt > 0.0) {
                return Err(invalid("max_dt", "must be positive"));
            }
        }
        if self.angular_nodes == 0 {
            return Err(invalid("angular_nodes", "must be positive"));
        }
        self.integrator.validate()
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        (0..=self.snapshots)
            .map(|k| self.t_end * k as f64 / self.snapshots as f64)
            .collect()
    }
}

/// How a PDE run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PdeOutcome {
    Completed,
    /// A path escaped or two paths crossed.
    Blowup { time: f64, radius: f64, path: usize, cause: BlowupCause },
    Inconclusive { time: f64, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupCause {
    PathEscape,
    Crossing,
}

/// Snapshots of a run together with how it ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeRun {
    pub snapshots: Vec<FieldSnapshot>,
    pub outcome: PdeOutcome,
    /// Per-path blowup estimates, for runs that integrate paths independently.
    pub path_blowup_times: Vec<Option<f64>>,
}

impl PdeRun {
    pub fn blowup_time(&self) -> Option<f64> {
        match self.outcome {
            PdeOutcome::Blowup { time, .. } => Some(time),
            _ => None,
        }
    }
}
