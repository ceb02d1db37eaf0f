//! Critical-threshold analysis for radially symmetric pressureless Euler
//! dynamics with Poisson forcing or nonlocal alignment.
//!
//! The crate integrates the characteristic ODE systems along radial paths,
//! classifies initial data as globally bounded or finite-time blowup,
//! computes explicit and ODE-defined threshold curves, and cross-checks them
//! with a characteristic-ensemble PDE solver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ea;
pub mod ep;
pub mod error;
pub mod model;
pub mod ode;
pub mod outcome;
pub mod pde;
pub mod profiles;
pub mod quadrature;

pub use error::{CoreError, Result};
pub use model::{
    divergence, gap_consistency_check, grad_u_matrix, spectral_gap, CharState, ModelKind, ModelParams, ProfileKind,
    RadialField, RadialProfile, VelocityGradientSample,
};
pub use ode::{IntegratorConfig, Termination, TrajectoryRecord};
pub use outcome::{ClassificationOutcome, Verdict};
