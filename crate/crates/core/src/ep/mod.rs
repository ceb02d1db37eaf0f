//! Radial Euler-Poisson dynamics: the closed characteristic system, the
//! `(q, s)` phase plane, the `(w, v)` transform and explicit thresholds.

pub mod classify;
pub mod phase;
pub mod systems;
pub mod thresholds;

pub use classify::{classify_ep, damped_burgers_regular, initial_s_from_density, sigma_1d, sigma_1d_lower, Region1d};
pub use phase::{
    classify_seed, integrate_wv, orbit_closure, qs_phase_portrait, qs_trajectory, qshat_integrate, PortraitTrajectory,
    PortraitVerdict, RescaledRun,
};
pub use systems::{BurgersSystem, EpCharSystem, QsSystem, RescaledQsSystem, SlabSystem, WvSystem};
pub use thresholds::{
    compute_dcrit, compute_threshold_constants, explicit_sigma_plus, lower_envelope, supercritical_w0,
    ThresholdConstants,
};
