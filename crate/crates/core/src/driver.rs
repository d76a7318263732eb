//! Run loops for both solvers: snapshot scheduling, moment recording, NaN
//! diagnostics and step accounting.
//!
//! Both solvers integrate segment-by-segment between snapshot breakpoints,
//! so they reach every snapshot time exactly and the comparison reconstructs
//! the two-scale beam at the identical fast phase t/epsilon. The reference
//! solver executes a fixed number of substeps per slow step, which makes the
//! step-count ratio between the solvers exact by construction.

use std::time::Instant;

use crate::analysis::{moments, reconstruct, BeamMoments};
use crate::config::ScenarioConfig;
use crate::ensemble::{sample_initial, sampling_rng, ParticleEnsemble, Representation};
use crate::error::{Error, Result};
use crate::field::RadialGrid;
use crate::reference::reference_step;
use crate::twoscale::{rk4_step, PushContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    TwoScale,
    Reference,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::TwoScale => "two-scale",
            SolverKind::Reference => "reference",
        }
    }
}

/// Beam state recorded at one snapshot time, always in physical coordinates
/// (the two-scale run reconstructs at tau = t / epsilon).
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub tau: f64,
    pub ensemble: ParticleEnsemble,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub solver: SolverKind,
    pub steps: u64,
    pub wall_seconds: f64,
    pub overflow_count: u64,
    /// (t, moments) series, recorded once per slow step.
    pub moments: Vec<(f64, BeamMoments)>,
    /// Snapshots at the configured times plus the final time.
    pub snapshots: Vec<Snapshot>,
    /// Final state in the solver's own representation (slow profile for the
    /// two-scale run, physical for the reference run).
    pub final_ensemble: ParticleEnsemble,
}

/// Snapshot breakpoints: configured times snapped into (0, t_end], ascending,
/// deduplicated, with t_end always included.
fn breakpoints(config: &ScenarioConfig) -> Vec<f64> {
    let mut times: Vec<f64> = config
        .snapshots
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t <= config.t_end + 1e-12)
        .collect();
    times.push(config.t_end);
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    times
}

/// Substeps the reference solver takes per slow step (the paper's ratio
/// dt_ref = epsilon * dt by default).
pub fn reference_substeps(config: &ScenarioConfig) -> Result<u64> {
    let dt_ref = config.dt_ref();
    let bound = crate::reference::STABILITY_FACTOR * config.epsilon;
    if !(dt_ref > 0.0) {
        return Err(Error::config("dt_ref must be > 0"));
    }
    let sub = (config.dt / dt_ref).round().max(1.0);
    let actual = config.dt / sub;
    if dt_ref > bound || actual > bound {
        return Err(Error::config(format!(
            "dt_ref = {} violates the RK4 stability bound {} * epsilon",
            dt_ref.max(actual),
            crate::reference::STABILITY_FACTOR
        )));
    }
    Ok(sub as u64)
}

fn locate_step_error(err: Error, step: u64) -> Error {
    match err {
        Error::Instability { t, stage, .. } => Error::Instability { t, step, stage },
        other => other,
    }
}

/// Integrate the slow profile to t_end with the two-scale pusher.
pub fn run_two_scale(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    let ctx = PushContext::new(config)?;
    let mut ensemble = sample_initial(config, &mut sampling_rng(config.seed))?;
    let start = Instant::now();

    let mut t = 0.0;
    let mut steps = 0u64;
    let mut overflow_count = 0u64;
    let mut series = vec![(0.0, moments(&reconstruct(&ensemble, 0.0)))];
    let mut snapshots = Vec::new();

    for bp in breakpoints(config) {
        while bp - t > 1e-12 {
            let h = config.dt.min(bp - t);
            let (next, overflow) =
                rk4_step(&ensemble, t, h, &ctx).map_err(|e| locate_step_error(e, steps))?;
            ensemble = next;
            overflow_count += overflow;
            steps += 1;
            t = if (bp - t) - h <= 1e-12 { bp } else { t + h };
            series.push((t, moments(&reconstruct(&ensemble, t / config.epsilon))));
        }
        let tau = bp / config.epsilon;
        snapshots.push(Snapshot {
            t: bp,
            tau,
            ensemble: reconstruct(&ensemble, tau),
        });
    }

    Ok(RunOutput {
        solver: SolverKind::TwoScale,
        steps,
        wall_seconds: start.elapsed().as_secs_f64(),
        overflow_count,
        moments: series,
        snapshots,
        final_ensemble: ensemble,
    })
}

/// Integrate the physical beam to t_end with the conventional fine-step
/// pusher. Moments are recorded on the slow-step cadence to match the
/// two-scale series.
pub fn run_reference(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    let grid = RadialGrid::new(config.grid_nodes, config.grid_extent)?;
    let substeps = reference_substeps(config)?;
    let mut ensemble = sample_initial(config, &mut sampling_rng(config.seed))?;
    ensemble.label = Representation::PhysicalF;
    let start = Instant::now();

    let mut t = 0.0;
    let mut steps = 0u64;
    let mut overflow_count = 0u64;
    let mut series = vec![(0.0, moments(&ensemble))];
    let mut snapshots = Vec::new();

    for bp in breakpoints(config) {
        while bp - t > 1e-12 {
            let h = config.dt.min(bp - t);
            let dt_ref = h / substeps as f64;
            for s in 0..substeps {
                let t_sub = t + s as f64 * dt_ref;
                let (next, overflow) = reference_step(&ensemble, t_sub, dt_ref, &grid, config)
                    .map_err(|e| locate_step_error(e, steps))?;
                ensemble = next;
                overflow_count += overflow;
                steps += 1;
            }
            t = if (bp - t) - h <= 1e-12 { bp } else { t + h };
            series.push((t, moments(&ensemble)));
        }
        snapshots.push(Snapshot {
            t: bp,
            tau: bp / config.epsilon,
            ensemble: ensemble.clone(),
        });
    }

    Ok(RunOutput {
        solver: SolverKind::Reference,
        steps,
        wall_seconds: start.elapsed().as_secs_f64(),
        overflow_count,
        moments: series,
        snapshots,
        final_ensemble: ensemble,
    })
}
