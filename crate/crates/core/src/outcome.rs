//! Classification results shared by every threshold decision.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ode::{IntegratorConfig, Termination, TrajectoryRecord};

/// Verdict for one initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    GlobalBounded,
    FiniteTimeBlowup { t_estimate: f64 },
    Inconclusive { reason: String },
}

impl Verdict {
    /// Process exit code for this verdict.
    pub fn code(&self) -> i32 {
        match self {
            Verdict::GlobalBounded => 0,
            Verdict::FiniteTimeBlowup { .. } => 2,
            Verdict::Inconclusive { .. } => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::GlobalBounded => "GlobalBounded",
            Verdict::FiniteTimeBlowup { .. } => "FiniteTimeBlowup",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Verdict::GlobalBounded)
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, Verdict::FiniteTimeBlowup { .. })
    }

    pub fn t_estimate(&self) -> Option<f64> {
        match self {
            Verdict::FiniteTimeBlowup { t_estimate } => Some(*t_estimate),
            _ => None,
        }
    }
}

/// Verdict plus the diagnostics of the run that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationOutcome {
    pub verdict: Verdict,
    pub max_norm: f64,
    pub final_time: f64,
    pub final_state: Vec<f64>,
}

impl ClassificationOutcome {
    pub fn from_record(record: &TrajectoryRecord, bounded_events: &[&str]) -> Self {
        let verdict = match &record.termination {
            Termination::ReachedHorizon => Verdict::GlobalBounded,
            Termination::Event { name, .. } if bounded_events.contains(&name.as_str()) => {
                Verdict::GlobalBounded
            }
            Termination::Event { name, t } => Verdict::Inconclusive {
                reason: format!("stopped at event `{name}` at t = {t:.6e}"),
            },
            Termination::BlowupDetected { t_estimate, .. } => Verdict::FiniteTimeBlowup {
                t_estimate: *t_estimate,
            },
            Termination::CapExceeded { t, component } => Verdict::Inconclusive {
                reason: format!(
                    "component {component} exceeded the cap at t = {t:.6e} without finite-time escape"
                ),
            },
            Termination::StepCollapse { t, reason } => Verdict::Inconclusive {
                reason: format!("step collapse at t = {t:.6e}: {reason}"),
            },
        };
        Self {
            verdict,
            max_norm: record.max_norm(),
            final_time: record.last_time(),
            final_state: record.last_state().to_vec(),
        }
    }
}

/// Factor by which tolerances are tightened for the boundary-band check.
pub const TIGHTENING: f64 = 10.0;

/// Classify with `config` and again with tolerances tightened tenfold.
///
/// When the two runs disagree the state sits in the numerical boundary band
/// and the result is reported as inconclusive.
pub fn classify_stable<F>(config: &IntegratorConfig, bounded_events: &[&str], run: F) -> Result<ClassificationOutcome>
where
    F: Fn(&IntegratorConfig) -> Result<TrajectoryRecord>,
{
    let coarse = ClassificationOutcome::from_record(&run(config)?, bounded_events);
    let fine = ClassificationOutcome::from_record(&run(&config.tightened(TIGHTENING))?, bounded_events);
    if std::mem::discriminant(&coarse.verdict) != std::mem::discriminant(&fine.verdict) {
        log::debug!(
            "verdict flip: {} at rel_tol {:e}, {} when tightened",
            coarse.verdict.label(),
            config.rel_tol,
            fine.verdict.label()
        );
        return Ok(ClassificationOutcome {
            verdict: Verdict::Inconclusive {
                reason: format!(
                    "verdict flips under tolerance tightening ({} vs {})",
                    coarse.verdict.label(),
                    fine.verdict.label()
                ),
            },
            ..fine
        });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Verdict::GlobalBounded.code(), 0);
        assert_eq!(Verdict::FiniteTimeBlowup { t_estimate: 1.0 }.code(), 2);
        assert_eq!(
            Verdict::Inconclusive {
                reason: String::new()
            }
            .code(),
            3
        );
    }
}
