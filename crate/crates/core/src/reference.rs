//! Conventional PIC pusher for the stiff radial system, resolving the
//! 1/epsilon fast scale. Used as the ground-truth comparator for the
//! two-scale solver.

use crate::config::ScenarioConfig;
use crate::ensemble::{ParticleEnsemble, Representation};
use crate::error::{Error, Result};
use crate::field::{deposit, eval_field_many, solve_field, FieldTable, RadialGrid};

/// Explicit RK4 stays stable for the unit-frequency fast rotation as long as
/// dt_ref / epsilon <= 2 sqrt 2; enforced with a small margin.
pub const STABILITY_FACTOR: f64 = 2.5;

/// External focusing force (-H0/eps + H1(omega1 t/eps)) r with H0 = 1.
pub fn external_force(t: f64, r: f64, config: &ScenarioConfig) -> f64 {
    (-1.0 / config.epsilon + config.h1_kind.eval(t / config.epsilon)) * r
}

struct Stage {
    dr: Vec<f64>,
    dv: Vec<f64>,
    overflow: u64,
}

fn stage_derivative(
    pos: &[f64],
    vel: &[f64],
    weight: &[f64],
    t: f64,
    grid: &RadialGrid,
    config: &ScenarioConfig,
) -> Stage {
    let n = pos.len();
    let inv_eps = 1.0 / config.epsilon;
    let mut dr = vec![0.0; n];
    for (d, v) in dr.iter_mut().zip(vel) {
        *d = v * inv_eps;
    }

    let mut dv = vec![0.0; n];
    let mut overflow = 0;
    if config.self_field {
        let density = deposit(pos, weight, grid);
        overflow = density.overflow_count;
        let field: FieldTable = solve_field(&density);
        eval_field_many(&field, pos, &mut dv);
    }
    let h1 = config.h1_kind.eval(t * inv_eps);
    let ext = -inv_eps + h1;
    for (d, r) in dv.iter_mut().zip(pos) {
        *d += ext * r;
    }
    Stage { dr, dv, overflow }
}

fn check_finite(pos: &[f64], vel: &[f64], t: f64, stage: u8) -> Result<()> {
    if pos
        .iter()
        .zip(vel)
        .any(|(r, v)| !r.is_finite() || !v.is_finite())
    {
        return Err(Error::Instability { t, step: 0, stage });
    }
    Ok(())
}

/// One classical RK4 step of the stiff characteristics
/// dr/dt = v/eps, dv/dt = E_r(r) + Xi_r(t, r), with the deposit, field solve
/// and interpolation refreshed at every stage from that stage's positions.
pub fn reference_step(
    ensemble: &ParticleEnsemble,
    t: f64,
    dt_ref: f64,
    grid: &RadialGrid,
    config: &ScenarioConfig,
) -> Result<(ParticleEnsemble, u64)> {
    debug_assert_eq!(ensemble.label, Representation::PhysicalF);
    if !(dt_ref > 0.0) || dt_ref > STABILITY_FACTOR * config.epsilon {
        return Err(Error::config(format!(
            "dt_ref = {dt_ref} violates the RK4 stability bound {} * epsilon",
            STABILITY_FACTOR
        )));
    }

    let n = ensemble.len();
    let advance = |dr: &[f64], dv: &[f64], factor: f64| -> (Vec<f64>, Vec<f64>) {
        let mut pos = vec![0.0; n];
        let mut vel = vec![0.0; n];
        for k in 0..n {
            pos[k] = ensemble.pos[k] + factor * dr[k];
            vel[k] = ensemble.vel[k] + factor * dv[k];
        }
        (pos, vel)
    };

    let k1 = stage_derivative(
        &ensemble.pos,
        &ensemble.vel,
        &ensemble.weight,
        t,
        grid,
        config,
    );
    let (p2, v2) = advance(&k1.dr, &k1.dv, 0.5 * dt_ref);
    check_finite(&p2, &v2, t, 1)?;
    let k2 = stage_derivative(&p2, &v2, &ensemble.weight, t + 0.5 * dt_ref, grid, config);
    let (p3, v3) = advance(&k2.dr, &k2.dv, 0.5 * dt_ref);
    check_finite(&p3, &v3, t, 2)?;
    let k3 = stage_derivative(&p3, &v3, &ensemble.weight, t + 0.5 * dt_ref, grid, config);
    let (p4, v4) = advance(&k3.dr, &k3.dv, dt_ref);
    check_finite(&p4, &v4, t, 3)?;
    let k4 = stage_derivative(&p4, &v4, &ensemble.weight, t + dt_ref, grid, config);

    let sixth = dt_ref / 6.0;
    let mut pos = vec![0.0; n];
    let mut vel = vec![0.0; n];
    for k in 0..n {
        pos[k] = ensemble.pos[k] + sixth * (k1.dr[k] + 2.0 * k2.dr[k] + 2.0 * k3.dr[k] + k4.dr[k]);
        vel[k] = ensemble.vel[k] + sixth * (k1.dv[k] + 2.0 * k2.dv[k] + 2.0 * k3.dv[k] + k4.dv[k]);
    }
    check_finite(&pos, &vel, t, 4)?;
    let out = ParticleEnsemble {
        pos,
        vel,
        weight: ensemble.weight.clone(),
        label: Representation::PhysicalF,
    };
    let overflow = k1.overflow + k2.overflow + k3.overflow + k4.overflow;
    Ok((out, overflow))
}
