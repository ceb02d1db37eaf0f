//! Shared fixtures for the engine benchmarks.

use ct_core::ea::{AlignmentBounds, InfluenceSpec};
use ct_core::pde::PdeConfig;
use ct_core::profiles::{RadialVelocity, Shape};
use ct_core::{CharState, ModelParams};

/// Subcritical and supercritical Euler-Poisson states in three dimensions.
pub fn ep_states() -> (ModelParams, [CharState; 2]) {
    let params = ModelParams::euler_poisson(3.0, 1.0, 1.0).expect("valid parameters");
    let states = [CharState::new(0.2, 0.1, 0.3, 1.0), CharState::new(-3.0, -1.0, 0.1, 2.0)];
    (params, states)
}

pub fn alignment_bounds() -> AlignmentBounds {
    AlignmentBounds::from_psi(0.8, 1.0, 0.0).expect("valid bounds")
}

pub fn influence() -> InfluenceSpec {
    InfluenceSpec::algebraic(0.5)
}

pub fn density() -> Shape {
    Shape::Indicator { amplitude: 1.0, radius: 1.0 }
}

/// Gaussian density with a compressive velocity that blows up before `t = 5`.
pub fn collapsing_profiles() -> (Shape, RadialVelocity) {
    (
        Shape::GaussianBump { amplitude: 1.0, width: 1.0 },
        RadialVelocity::new(Shape::GaussianBump { amplitude: -2.5, width: 1.0 }),
    )
}

pub fn pde_config(paths: usize) -> PdeConfig {
    PdeConfig {
        paths,
        t_end: 5.0,
        snapshots: 10,
        radius: Some(3.0),
        ..PdeConfig::default()
    }
}
