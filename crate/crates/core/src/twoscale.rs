//! The two-scale PIC pusher: averaged drift evaluation and the four-stage
//! RK4 step.
//!
//! The slow profile G evolves along characteristics whose right-hand side is
//! a fast-angle average: at every quadrature node the ensemble is rotated,
//! deposited, the radial Poisson problem solved, and the field interpolated
//! back to the rotated particle positions. The resonant external-field mean
//! term is added on top. Because nothing here oscillates at the 1/epsilon
//! frequency, the slow step can be epsilon times larger than the step a
//! conventional solver needs.

use crate::config::{H1Kind, ScenarioConfig};
use crate::ensemble::{ParticleEnsemble, Representation};
use crate::error::{Error, Result};
use crate::field::{eval_field_many, solve_field, RadialGrid};
use crate::quadrature::PeriodicQuadrature;
use crate::resonance::{classify_resonance, ResonanceClass};

/// How the fast-angle integrals are normalized.
///
/// `PerPeriod` initializes G-particles directly from f0 (total weight equal
/// to the beam intensity) and divides every sigma-integral by the fast
/// period, so reconstruction can use particle weights as physical charge
/// with no bookkeeping factor. `Literal` carries the G(0) = f0 / T scaling
/// with un-normalized field integrals instead. The two produce identical
/// trajectories; a dedicated test asserts it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftScaling {
    PerPeriod,
    Literal,
}

/// Everything a drift evaluation needs besides the ensemble itself.
#[derive(Debug, Clone)]
pub struct PushContext {
    pub grid: RadialGrid,
    pub quad: PeriodicQuadrature,
    pub resonance: ResonanceClass,
    pub h1_kind: H1Kind,
    pub self_field: bool,
    pub scaling: DriftScaling,
}

impl PushContext {
    /// Build the grid, the quadrature over the fast period dictated by the
    /// resonance class, and the drift bookkeeping from a validated config.
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let resonance = classify_resonance(&config.h1_kind)?;
        let grid = RadialGrid::new(config.grid_nodes, config.grid_extent)?;
        let quad = PeriodicQuadrature::build(config.quad_nodes, resonance.fast_period())?;
        Ok(PushContext {
            grid,
            quad,
            resonance,
            h1_kind: config.h1_kind,
            self_field: config.self_field,
            scaling: DriftScaling::PerPeriod,
        })
    }

    pub fn with_scaling(mut self, scaling: DriftScaling) -> Self {
        self.scaling = scaling;
        self
    }
}

/// Per-particle time derivatives of the slow characteristics.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftField {
    pub dq: Vec<f64>,
    pub du: Vec<f64>,
    /// Particles clamped to the grid boundary during rotated deposits.
    pub overflow_count: u64,
}

/// Mean drift contributed by the oscillating external field for one particle.
///
/// dq = (1/T) sum_m gamma_m (-sin sigma_m) H1(omega1 sigma_m) (cos sigma_m q + sin sigma_m u)
/// du = (1/T) sum_m gamma_m ( cos sigma_m) H1(omega1 sigma_m) (cos sigma_m q + sin sigma_m u)
///
/// Zero for the non-resonant and H1 = 0 cases. The -sin/cos prefactors fix
/// the sign convention; the resonant linear characteristics
/// Q(t) = Q0 cos(t/4) - U0 sin(t/4) pin it independently (dQ/dt = -U/4).
pub fn h1_mean_drift(
    h1_kind: &H1Kind,
    q: f64,
    u: f64,
    quad: &PeriodicQuadrature,
    resonance: &ResonanceClass,
) -> (f64, f64) {
    let ResonanceClass::Resonant { h1_factor, .. } = resonance else {
        return (0.0, 0.0);
    };
    if matches!(h1_kind, H1Kind::Zero) {
        return (0.0, 0.0);
    }
    debug_assert!(
        (quad.period() - resonance.fast_period()).abs() <= 1e-12 * resonance.fast_period(),
        "quadrature period must match the effective fast period"
    );
    let mut acc_q = 0.0;
    let mut acc_u = 0.0;
    for (&sigma, &gamma) in quad.nodes().iter().zip(quad.weights()) {
        let (sin_s, cos_s) = sigma.sin_cos();
        let line = cos_s * q + sin_s * u;
        let h = h1_kind.eval(sigma);
        acc_q += gamma * (-sin_s) * h * line;
        acc_u += gamma * cos_s * h * line;
    }
    (acc_q * h1_factor, acc_u * h1_factor)
}

fn self_field_node_contribution(
    ensemble: &ParticleEnsemble,
    sigma: f64,
    grid: &RadialGrid,
) -> (Vec<f64>, u64) {
    let (sin_s, cos_s) = sigma.sin_cos();
    let rotated: Vec<f64> = ensemble
        .pos
        .iter()
        .zip(&ensemble.vel)
        .map(|(q, u)| cos_s * q + sin_s * u)
        .collect();
    let density = crate::field::deposit(&rotated, &ensemble.weight, grid);
    let overflow = density.overflow_count;
    let field = solve_field(&density);
    let mut e = vec![0.0; rotated.len()];
    eval_field_many(&field, &rotated, &mut e);
    (e, overflow)
}

/// Averaged drift for the whole ensemble: self-field average over the fast
/// angle plus the resonant external mean term.
///
/// Quadrature nodes are processed independently (in parallel when enabled)
/// and merged in ascending node order, so the result is bit-identical for
/// any thread count.
pub fn eval_drift(ensemble: &ParticleEnsemble, ctx: &PushContext) -> DriftField {
    debug_assert_eq!(ensemble.label, Representation::SlowProfileG);
    let n = ensemble.len();
    let mut dq = vec![0.0; n];
    let mut du = vec![0.0; n];
    let mut overflow_count = 0u64;

    if ctx.self_field {
        let field_factor = match ctx.scaling {
            DriftScaling::PerPeriod => 1.0 / ctx.quad.period(),
            DriftScaling::Literal => 1.0,
        };
        let per_node: Vec<(Vec<f64>, u64)> = {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                ctx.quad
                    .nodes()
                    .par_iter()
                    .map(|&sigma| self_field_node_contribution(ensemble, sigma, &ctx.grid))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                ctx.quad
                    .nodes()
                    .iter()
                    .map(|&sigma| self_field_node_contribution(ensemble, sigma, &ctx.grid))
                    .collect()
            }
        };
        for (m, (e, overflow)) in per_node.iter().enumerate() {
            let sigma = ctx.quad.nodes()[m];
            let gamma = ctx.quad.weights()[m];
            let (sin_s, cos_s) = sigma.sin_cos();
            let coef_q = gamma * (-sin_s) * field_factor;
            let coef_u = gamma * cos_s * field_factor;
            for k in 0..n {
                dq[k] += coef_q * e[k];
                du[k] += coef_u * e[k];
            }
            overflow_count += overflow;
        }
    }

    if ctx.resonance.is_resonant() && !matches!(ctx.h1_kind, H1Kind::Zero) {
        for k in 0..n {
            let (hq, hu) = h1_mean_drift(
                &ctx.h1_kind,
                ensemble.pos[k],
                ensemble.vel[k],
                &ctx.quad,
                &ctx.resonance,
            );
            dq[k] += hq;
            du[k] += hu;
        }
    }

    DriftField {
        dq,
        du,
        overflow_count,
    }
}

fn advanced(base: &ParticleEnsemble, drift: &DriftField, factor: f64) -> ParticleEnsemble {
    let n = base.len();
    let mut pos = vec![0.0; n];
    let mut vel = vec![0.0; n];
    for k in 0..n {
        pos[k] = base.pos[k] + factor * drift.dq[k];
        vel[k] = base.vel[k] + factor * drift.du[k];
    }
    ParticleEnsemble {
        pos,
        vel,
        weight: base.weight.clone(),
        label: base.label,
    }
}

fn check_finite(ens: &ParticleEnsemble, t: f64, stage: u8) -> Result<()> {
    if ens.first_non_finite().is_some() {
        return Err(Error::Instability { t, step: 0, stage });
    }
    Ok(())
}

/// One classical RK4 step of the slow characteristics.
///
/// Each stage triggers fresh rotated deposits and field solves from that
/// stage's particle positions. Weights are untouched, so the charge sum and
/// the mirror-pair structure are preserved bit-exactly. The averaged system
/// is autonomous (the field depends on the ensemble state, not on t); `t` is
/// carried for diagnostics only.
pub fn rk4_step(
    ensemble: &ParticleEnsemble,
    t: f64,
    dt: f64,
    ctx: &PushContext,
) -> Result<(ParticleEnsemble, u64)> {
    let k1 = eval_drift(ensemble, ctx);
    let y2 = advanced(ensemble, &k1, 0.5 * dt);
    check_finite(&y2, t, 1)?;
    let k2 = eval_drift(&y2, ctx);
    let y3 = advanced(ensemble, &k2, 0.5 * dt);
    check_finite(&y3, t, 2)?;
    let k3 = eval_drift(&y3, ctx);
    let y4 = advanced(ensemble, &k3, dt);
    check_finite(&y4, t, 3)?;
    let k4 = eval_drift(&y4, ctx);

    let n = ensemble.len();
    let sixth = dt / 6.0;
    let mut pos = vec![0.0; n];
    let mut vel = vec![0.0; n];
    for k in 0..n {
        pos[k] = ensemble.pos[k] + sixth * (k1.dq[k] + 2.0 * k2.dq[k] + 2.0 * k3.dq[k] + k4.dq[k]);
        vel[k] = ensemble.vel[k] + sixth * (k1.du[k] + 2.0 * k2.du[k] + 2.0 * k3.du[k] + k4.du[k]);
    }
    let out = ParticleEnsemble {
        pos,
        vel,
        weight: ensemble.weight.clone(),
        label: ensemble.label,
    };
    check_finite(&out, t, 4)?;
    let overflow = k1.overflow_count + k2.overflow_count + k3.overflow_count + k4.overflow_count;
    Ok((out, overflow))
}
