//! Euler-alignment: nonlocal kernels, a-priori bounds and threshold conditions.

pub mod bounds;
pub mod curves;
pub mod influence;
pub mod kernels;

pub use bounds::{
    compute_bounds, rough_g_subcritical_bound, rough_g_supercritical_bound, rough_q_subcritical_bound,
    rough_q_supercritical_bound, rough_threshold_g, rough_threshold_q, AlignmentBounds, RoughRegion,
};
pub use curves::{
    comparison_classify, default_offset, enhanced_curve, enhanced_curve_with_offset, ComparisonKind, CurveKind,
    ThresholdCurve,
};
pub use influence::{InfluenceKind, InfluenceSpec};
pub use kernels::{eval_psi, eval_zeta, KernelQuadrature, ShellKernel};
