//! Time series derived from snapshots.

use serde::{Deserialize, Serialize};

use super::ensemble::FieldSnapshot;
use crate::error::{invalid, Result};

/// Regularity, flocking and conservation monitors over a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    pub max_grad_u: Vec<f64>,
    /// Running integral of `max |grad u|` by the trapezoid rule.
    pub grad_u_integral: Vec<f64>,
    pub velocity_oscillation: Vec<f64>,
    pub support_radius: Vec<f64>,
    pub min_radius: Vec<f64>,
    pub mass_total: Vec<f64>,
}

impl DiagnosticsSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest deviation of the mass total from its initial value.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass_total[0];
        self.mass_total.iter().fold(0.0_f64, |d, m| d.max((m - m0).abs()))
    }
}

pub fn diagnostics_series(snapshots: &[FieldSnapshot]) -> Result<DiagnosticsSeries> {
    if snapshots.is_empty() {
        return Err(invalid("snapshots", "need at least one snapshot"));
    }
    let times: Vec<f64> = snapshots.iter().map(|s| s.time).collect();
    let max_grad_u: Vec<f64> = snapshots.iter().map(FieldSnapshot::max_grad_u).collect();
    let mut grad_u_integral = vec![0.0; snapshots.len()];
    for k in 1..snapshots.len() {
        grad_u_integral[k] =
            grad_u_integral[k - 1] + 0.5 * (times[k] - times[k - 1]) * (max_grad_u[k] + max_grad_u[k - 1]);
    }
    Ok(DiagnosticsSeries {
        max_grad_u,
        grad_u_integral,
        velocity_oscillation: snapshots.iter().map(FieldSnapshot::velocity_oscillation).collect(),
        support_radius: snapshots.iter().map(FieldSnapshot::support_radius).collect(),
        min_radius: snapshots.iter().map(FieldSnapshot::min_radius).collect(),
        mass_total: snapshots.iter().map(|s| s.mass_total).collect(),
        times,
    })
}

/// Estimate of the flock radius: the largest support radius observed.
pub fn estimate_flock_radius(snapshots: &[FieldSnapshot]) -> Option<f64> {
    snapshots
        .iter()
        .map(FieldSnapshot::support_radius)
        .reduce(f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(t: f64, g: f64) -> FieldSnapshot {
        FieldSnapshot {
            time: t,
            n: 1,
            radii: vec![0.5, 1.0 + t],
            velocity: vec![0.1, -0.3],
            density: vec![1.0, 1.0],
            p: vec![g, 0.0],
            q: vec![0.2, 0.0],
            psi: None,
            path_states: None,
            mass_total: 2.0,
        }
    }

    #[test]
    fn series_fields() {
        let d = diagnostics_series(&[snap(0.0, 1.0), snap(1.0, 3.0)]).unwrap();
        assert_eq!(d.grad_u_integral, vec![0.0, 2.0]);
        assert_eq!(d.velocity_oscillation[0], 0.6);
        assert_eq!(d.mass_drift(), 0.0);
        assert_eq!(estimate_flock_radius(&[snap(0.0, 1.0), snap(1.0, 3.0)]), Some(2.0));
        assert!(diagnostics_series(&[]).is_err());
    }
}
