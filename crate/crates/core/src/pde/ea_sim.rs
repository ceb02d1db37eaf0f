//! Euler-alignment runs: paths interact through mass-weighted kernel sums.

use rayon::prelude::*;

use super::ensemble::{reconstruct_fields, CharacteristicEnsemble, FieldSnapshot};
use super::{BlowupCause, PdeConfig, PdeOutcome, PdeRun};
use crate::ea::influence::InfluenceSpec;
use crate::ea::kernels::ShellKernel;
use crate::error::Result;
use crate::model::{ModelParams, RadialField};

/// Influence mass and alignment force at every path.
pub fn ensemble_forces(kernel: &ShellKernel, radii: &[f64], velocities: &[f64], masses: &[f64]) -> (Vec<f64>, Vec<f64>) {
    radii
        .par_iter()
        .map(|&r| {
            let (mut psi, mut zeta) = (0.0, 0.0);
            for ((&s, &u), &m) in radii.iter().zip(velocities).zip(masses) {
                if m == 0.0 {
                    continue;
                }
                let (a, b) = kernel.shell_mean(r, s);
                psi += m * a;
                zeta += m * u * b;
            }
            (psi, zeta)
        })
        .unzip()
}

fn rhs(kernel: &ShellKernel, masses: &[f64], y: &[f64], dy: &mut [f64]) {
    let k = masses.len();
    let (r, u) = y.split_at(k);
    let (psi, zeta) = ensemble_forces(kernel, r, u, masses);
    for i in 0..k {
        dy[i] = u[i];
        dy[k + i] = zeta[i] - psi[i] * u[i];
    }
}

fn rk4_step(kernel: &ShellKernel, masses: &[f64], y: &mut [f64], dt: f64) {
    let m = y.len();
    let mut k1 = vec![0.0; m];
    let mut k2 = vec![0.0; m];
    let mut k3 = vec![0.0; m];
    let mut k4 = vec![0.0; m];
    let mut tmp = vec![0.0; m];
    rhs(kernel, masses, y, &mut k1);
    for j in 0..m {
        tmp[j] = y[j] + 0.5 * dt * k1[j];
    }
    rhs(kernel, masses, &tmp, &mut k2);
    for j in 0..m {
        tmp[j] = y[j] + 0.5 * dt * k2[j];
    }
    rhs(kernel, masses, &tmp, &mut k3);
    for j in 0..m {
        tmp[j] = y[j] + dt * k3[j];
    }
    rhs(kernel, masses, &tmp, &mut k4);
    for j in 0..m {
        y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
}

fn snapshot(kernel: &ShellKernel, ens: &CharacteristicEnsemble) -> Result<FieldSnapshot> {
    let mut snap = reconstruct_fields(ens)?;
    let (psi, _) = ensemble_forces(kernel, &ens.radii, &ens.velocities, &ens.masses);
    snap.psi = Some(psi);
    Ok(snap)
}

/// Evolve an Euler-alignment ensemble with classical RK4.
///
/// The step is at most `0.1 / psi_max`, with kernels re-evaluated at every
/// stage. The run stops at the first crossing.
pub fn simulate_ea(
    rho0: &dyn RadialField,
    u0: &dyn RadialField,
    params: &ModelParams,
    phi: &InfluenceSpec,
    cfg: &PdeConfig,
) -> Result<PdeRun> {
    params.validate()?;
    cfg.validate()?;
    let n = params.integer_dimension()?;
    let mut ens = CharacteristicEnsemble::from_profiles(rho0, u0, n, cfg.paths, cfg.radius)?;
    let kernel = ShellKernel::new(*phi, n, cfg.angular_nodes)?.with_max_levels(cfg.angular_levels);
    let psi_max = phi.sup_phi * ens.total_mass();
    let mut dt_max = 0.1 / psi_max.max(f64::MIN_POSITIVE);
    if let Some(d) = cfg.max_dt {
        dt_max = dt_max.min(d);
    }
    let interval = cfg.t_end / cfg.snapshots as f64;
    let substeps = (interval / dt_max).ceil().max(1.0) as usize;
    let dt = interval / substeps as f64;

    let k = ens.len();
    let masses = ens.masses.clone();
    let mut y: Vec<f64> = ens.radii.iter().chain(&ens.velocities).copied().collect();
    let mut snapshots = vec![snapshot(&kernel, &ens)?];
    for step in 0..cfg.snapshots {
        for sub in 0..substeps {
            rk4_step(&kernel, &masses, &mut y, dt);
            let t = (step * substeps + sub + 1) as f64 * dt;
            ens.time = t;
            ens.radii.copy_from_slice(&y[..k]);
            ens.velocities.copy_from_slice(&y[k..]);
            if y.iter().any(|v| !v.is_finite()) {
                return Ok(PdeRun {
                    snapshots,
                    outcome: PdeOutcome::Inconclusive {
                        time: t,
                        reason: "non-finite path state".into(),
                    },
                    path_blowup_times: Vec::new(),
                });
            }
            if let Some((path, radius)) = ens.crossing() {
                return Ok(PdeRun {
                    snapshots,
                    outcome: PdeOutcome::Blowup {
                        time: t,
                        radius,
                        path,
                        cause: BlowupCause::Crossing,
                    },
                    path_blowup_times: Vec::new(),
                });
            }
        }
        snapshots.push(snapshot(&kernel, &ens)?);
    }
    Ok(PdeRun {
        snapshots,
        outcome: PdeOutcome::Completed,
        path_blowup_times: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;
    use crate::profiles::{RadialVelocity, Shape};

    #[test]
    fn constant_influence_damps_velocity() {
        let rho = Shape::Indicator { amplitude: 1.0, radius: 1.0 };
        let u = RadialVelocity::new(Shape::Constant { amplitude: 0.2 });
        let params = ModelParams::new(1.0, 1.0, 0.0, ModelKind::EulerAlignment).unwrap();
        let phi = InfluenceSpec::constant(0.5);
        let cfg = PdeConfig {
            paths: 20,
            t_end: 1.0,
            snapshots: 2,
            ..PdeConfig::default()
        };
        let run = simulate_ea(&rho, &u, &params, &phi, &cfg).unwrap();
        assert_eq!(run.outcome, PdeOutcome::Completed);
        // Mass 2 so the damping rate is 1 and u decays like e^{-t}, up to RK4 error.
        let first = &run.snapshots[0];
        let last = run.snapshots.last().unwrap();
        for (u0, u1) in first.velocity.iter().zip(&last.velocity) {
            assert!((u1 - u0 * (-1.0_f64).exp()).abs() < 2e-6 * u0.abs());
        }
    }
}
