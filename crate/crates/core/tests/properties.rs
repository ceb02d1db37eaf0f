//! Property tests for structural invariants of the solvers.

use approx::assert_relative_eq;
use ct_core::ea::{
    eval_psi, eval_zeta, rough_g_subcritical_bound, rough_g_supercritical_bound, rough_q_subcritical_bound,
    rough_q_supercritical_bound, enhanced_curve, AlignmentBounds, CurveKind, InfluenceSpec, KernelQuadrature,
    ShellKernel, compute_bounds,
};
use ct_core::ep::{classify_ep, sigma_1d, sigma_1d_lower, EpCharSystem};
use ct_core::ode::integrate;
use ct_core::pde::ep_sim::initial_path_state;
use ct_core::pde::{reconstruct_fields, simulate_ep, CharacteristicEnsemble, PdeConfig};
use ct_core::profiles::{RadialVelocity, Shape};
use ct_core::{divergence, grad_u_matrix, spectral_gap, CharState, IntegratorConfig, ModelParams, RadialField};
use proptest::prelude::*;

fn influence(kind: u8, param: f64) -> InfluenceSpec {
    match kind % 3 {
        0 => InfluenceSpec::algebraic(param),
        1 => InfluenceSpec::cucker_smale(param),
        _ => InfluenceSpec::exponential(param),
    }
}

proptest! {
    #[test]
    fn gradient_trace_and_gap(n in 1usize..8, p in -10.0..10.0f64, q in -10.0..10.0f64, seed in prop::collection::vec(-3.0..3.0f64, 8)) {
        let x = &seed[..n];
        let m = grad_u_matrix(x, p, q).unwrap();
        let nf = n as f64;
        let scale = 1.0 + p.abs() + q.abs();
        prop_assert!((m.trace() - divergence(p, q, nf)).abs() <= 1e-12 * nf * scale);
        let eig = m.symmetric_eigen().eigenvalues;
        let mut gap = 0.0;
        for a in eig.iter() {
            for b in eig.iter() {
                gap += 0.5 * (a - b) * (a - b);
            }
        }
        prop_assert!((gap - spectral_gap(p, q, nf)).abs() <= 1e-11 * nf * nf * scale * scale);
    }

    #[test]
    fn shell_kernel_is_symmetric(n in 1usize..5, kind in 0u8..3, param in 0.2..3.0f64, r in 0.01..3.0f64, s in 0.01..3.0f64) {
        let k = ShellKernel::new(influence(kind, param), n, 64).unwrap();
        let (a, _) = k.shell_mean(r, s);
        let (b, _) = k.shell_mean(s, r);
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn one_dimensional_region_threshold(rho0 in 0.05..5.0f64, c in 0.0..2.0f64) {
        let kappa = 1.0;
        if let Some(lo) = sigma_1d_lower(rho0, kappa, c) {
            prop_assert_eq!(sigma_1d(lo + 1e-9, rho0, kappa, c), ct_core::ep::Region1d::Subcritical);
            prop_assert_eq!(sigma_1d(lo - 1e-6, rho0, kappa, c), ct_core::ep::Region1d::Supercritical);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_bounds_hold(n in 1usize..3, kind in 0u8..3, param in 0.3..2.0f64, amp in 0.2..3.0f64, radius in 0.3..1.5f64, frac in 0.0..1.0f64) {
        let phi = influence(kind, param);
        let rho = Shape::Indicator { amplitude: amp, radius };
        let u = RadialVelocity::new(Shape::GaussianBump { amplitude: 1.0, width: 0.8 });
        let b = compute_bounds(&rho, &u, &phi, radius, n).unwrap();
        let quad = KernelQuadrature::default();
        let r = frac * radius;
        let psi = eval_psi(&rho, &phi, r, n, &quad).unwrap();
        prop_assert!(psi >= b.psi_min - 1e-10 && psi <= b.psi_max + 1e-10);
        let r = 0.05 + 2.0 * frac;
        let zeta = eval_zeta(&rho, &u, &phi, r, n, &quad).unwrap();
        prop_assert!((zeta / r).abs() <= b.c0 + 1e-10);
    }

    #[test]
    fn enhanced_curves_beat_rough_bounds(psi_min in 0.3..1.2f64, spread in 0.0..1.0f64, n in 2usize..4) {
        let psi_max = psi_min + spread;
        let b = AlignmentBounds::from_psi(psi_min, psi_max, 0.0).unwrap();
        let cfg = IntegratorConfig::default();
        let x_max = 0.2 * psi_min * psi_min;
        for kind in CurveKind::ALL {
            let curve = enhanced_curve(kind, &b, n, x_max, &cfg).unwrap();
            for k in 1..=10 {
                let x = (curve.x_end() * k as f64 / 10.0).min(curve.x_end());
                let sigma = curve.value_at(x).unwrap();
                let env = b.with_c0(x);
                let nf = n as f64;
                let slack = 1e-8;
                match kind {
                    CurveKind::QPlus => {
                        if let Some(rough) = rough_q_subcritical_bound(&env) {
                            prop_assert!(sigma <= rough + slack, "q+ at {x}: {sigma} vs {rough}");
                        }
                    }
                    CurveKind::QMinus => {
                        let rough = rough_q_supercritical_bound(&env);
                        prop_assert!(sigma >= rough - slack, "q- at {x}: {sigma} vs {rough}");
                    }
                    CurveKind::GPlus => {
                        if let Some(rough) = rough_g_subcritical_bound(&env, nf) {
                            prop_assert!(sigma <= rough + slack, "G+ at {x}: {sigma} vs {rough}");
                        }
                    }
                    CurveKind::GMinus => {
                        let rough = rough_g_supercritical_bound(&env, nf);
                        prop_assert!(sigma >= rough - slack, "G- at {x}: {sigma} vs {rough}");
                    }
                }
            }
        }
    }

    #[test]
    fn verdict_stable_under_tolerance_halving(p0 in -4.0..4.0f64, rho0 in 0.1..4.0f64) {
        let params = ModelParams::euler_poisson(1.0, 1.0, 0.0).unwrap();
        let lo = sigma_1d_lower(rho0, 1.0, 0.0).unwrap_or(f64::NEG_INFINITY);
        prop_assume!((p0 - lo).abs() > 0.05);
        let cfg = IntegratorConfig::default();
        let fine = cfg.with_tolerances(cfg.rel_tol / 2.0, cfg.abs_tol / 2.0);
        let state = CharState::new(p0, 0.0, 0.0, rho0);
        let a = classify_ep(state, &params, &cfg).unwrap().verdict;
        let b = classify_ep(state, &params, &fine).unwrap().verdict;
        prop_assert_eq!(a.label(), b.label());
        if let (Some(ta), Some(tb)) = (a.t_estimate(), b.t_estimate()) {
            prop_assert!((ta - tb).abs() <= 1e-3 * ta.max(1e-3));
        }
    }
}

fn gaussian_density_error(n: usize, paths: usize) -> f64 {
    let rho = Shape::GaussianBump { amplitude: 1.0, width: 1.0 };
    let u = RadialVelocity::new(Shape::Constant { amplitude: 0.0 });
    let ens = CharacteristicEnsemble::from_profiles(&rho, &u, n, paths, Some(2.0)).unwrap();
    let snap = reconstruct_fields(&ens).unwrap();
    snap.radii
        .iter()
        .zip(&snap.density)
        .map(|(&r, &d)| (d - rho.value(r)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn density_reconstruction_is_second_order() {
    for n in 1..=3 {
        let coarse = gaussian_density_error(n, 100);
        let fine = gaussian_density_error(n, 200);
        let order = (coarse / fine).log2();
        assert!(order > 1.8, "n={n}: observed order {order:.3} ({coarse:e} -> {fine:e})");
    }
}

#[test]
fn euler_poisson_paths_evolve_independently() {
    let rho = Shape::GaussianBump { amplitude: 1.0, width: 1.0 };
    let u = RadialVelocity::new(Shape::GaussianBump { amplitude: 0.4, width: 1.0 });
    let params = ModelParams::euler_poisson(3.0, 1.0, 0.0).unwrap();
    let cfg = PdeConfig {
        paths: 30,
        t_end: 1.0,
        snapshots: 2,
        ..PdeConfig::default()
    };
    let run = simulate_ep(&rho, &u, &params, &cfg).unwrap();
    let last = run.snapshots.last().unwrap();
    let states = last.path_states.as_ref().unwrap();
    let ens = CharacteristicEnsemble::from_profiles(&rho, &u, 3, cfg.paths, cfg.radius).unwrap();
    let sys = EpCharSystem {
        n: 3.0,
        kappa: 1.0,
        c: 0.0,
    };
    for (i, &r) in ens.radii.iter().enumerate().step_by(7) {
        let start = initial_path_state(&rho, &u, &params, r).unwrap();
        let rec = integrate(&sys, &start.to_array(), &cfg.integrator.with_horizon(cfg.t_end)).unwrap();
        let alone = rec.interpolate(last.time);
        assert_relative_eq!(states[i].p, alone[0], max_relative = 1e-6, epsilon = 1e-10);
        assert_relative_eq!(states[i].q, alone[1], max_relative = 1e-6, epsilon = 1e-10);
        assert_relative_eq!(states[i].rho, alone[3], max_relative = 1e-6, epsilon = 1e-10);
    }
}
