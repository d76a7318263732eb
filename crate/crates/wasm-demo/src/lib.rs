//! Interactive browser demo of the two-scale beam solver.
//!
//! Exposes three operations to a static page: an animated beam evolution
//! (slow profile stepped with the two-scale pusher, physical beam
//! reconstructed at the fast phase), the radial self-field profile, and the
//! quadrature-exactness explorer for the resonant mean drift. Rendering is
//! plain canvas JavaScript; this crate only moves numbers.

// range checks use `!(x > 0.0)` on purpose: NaN must be rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use wasm_bindgen::prelude::*;

use twoscale_pic::config::{H1Kind, Ratio, SamplingMeasure, ScenarioConfig};
use twoscale_pic::ensemble::{sample_initial, sampling_rng, ParticleEnsemble};
use twoscale_pic::field::{rotated_deposit, solve_field};
use twoscale_pic::quadrature::PeriodicQuadrature;
use twoscale_pic::resonance::classify_resonance;
use twoscale_pic::twoscale::{h1_mean_drift, rk4_step, PushContext};
use twoscale_pic::{moments, reconstruct};

fn h1_from_choice(kind: &str, harmonic: u32) -> Result<H1Kind, String> {
    match kind {
        "zero" => Ok(H1Kind::Zero),
        "cos" => Ok(H1Kind::Cos(
            Ratio::new(harmonic, 1).map_err(|e| e.to_string())?,
        )),
        "cos2" => Ok(H1Kind::CosSquared(
            Ratio::new(harmonic, 1).map_err(|e| e.to_string())?,
        )),
        "irrational" => Ok(H1Kind::Irrational(4.0 * std::f64::consts::SQRT_2)),
        other => Err(format!("unknown field kind `{other}`")),
    }
}

#[allow(clippy::too_many_arguments)]
fn demo_config(
    epsilon: f64,
    kind: &str,
    harmonic: u32,
    self_field: bool,
    intensity: f64,
    n_particles: usize,
    quad_nodes: usize,
    seed: u64,
) -> Result<ScenarioConfig, String> {
    let config = ScenarioConfig {
        epsilon,
        h1_kind: h1_from_choice(kind, harmonic)?,
        intensity,
        vth: 0.0727518214392,
        half_width: 0.75,
        n_particles,
        grid_nodes: 129,
        grid_extent: 3.0,
        quad_nodes,
        dt: 0.05,
        t_end: 1.0,
        seed,
        self_field,
        sampling: SamplingMeasure::Radial,
        snapshots: vec![],
        dt_ref: None,
    };
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn interleave(pos: &[f64], vel: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(pos.len() * 2);
    for (p, v) in pos.iter().zip(vel) {
        out.push(*p);
        out.push(*v);
    }
    out
}

/// Animated two-scale beam: the slow profile advances with the averaged
/// pusher while the physical beam is read off by rotation at tau = t/eps.
#[wasm_bindgen]
pub struct BeamSim {
    config: ScenarioConfig,
    ctx: PushContext,
    ensemble: ParticleEnsemble,
    t: f64,
}

#[wasm_bindgen]
impl BeamSim {
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        epsilon: f64,
        kind: String,
        harmonic: u32,
        self_field: bool,
        intensity: f64,
        n_particles: usize,
        quad_nodes: usize,
        seed: u64,
    ) -> Result<BeamSim, JsValue> {
        let config = demo_config(
            epsilon,
            &kind,
            harmonic,
            self_field,
            intensity,
            n_particles,
            quad_nodes,
            seed,
        )
        .map_err(|e| JsValue::from_str(&e))?;
        let ctx = PushContext::new(&config).map_err(|e| JsValue::from_str(&e.to_string()))?;
        let ensemble = sample_initial(&config, &mut sampling_rng(config.seed))
            .map_err(|e| JsValue::from_str(&e.to_string()))?;
        Ok(BeamSim {
            config,
            ctx,
            ensemble,
            t: 0.0,
        })
    }

    /// Advance the slow profile by `steps` slow steps of size `dt`.
    pub fn advance(&mut self, steps: usize, dt: f64) -> Result<(), JsValue> {
        for _ in 0..steps {
            let (next, _) = rk4_step(&self.ensemble, self.t, dt, &self.ctx)
                .map_err(|e| JsValue::from_str(&e.to_string()))?;
            self.ensemble = next;
            self.t += dt;
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn fast_phase(&self) -> f64 {
        self.t / self.config.epsilon
    }

    /// Physical beam (r, v) pairs, reconstructed at tau = t / eps.
    pub fn physical_beam(&self) -> js_sys::Float64Array {
        let beam = reconstruct(&self.ensemble, self.fast_phase());
        js_sys::Float64Array::from(interleave(&beam.pos, &beam.vel).as_slice())
    }

    /// Slow profile (q, u) pairs, the non-oscillating object being stepped.
    pub fn slow_profile(&self) -> js_sys::Float64Array {
        js_sys::Float64Array::from(interleave(&self.ensemble.pos, &self.ensemble.vel).as_slice())
    }

    /// Radial self-field profile (q, E) at the current state (fast angle 0).
    pub fn field_profile(&self) -> js_sys::Float64Array {
        let density = rotated_deposit(&self.ensemble, 0.0, &self.ctx.grid);
        let field = solve_field(&density);
        let qs: Vec<f64> = self.ctx.grid.nodes().collect();
        js_sys::Float64Array::from(interleave(&qs, &field.values).as_slice())
    }

    pub fn rms_radius(&self) -> f64 {
        moments(&reconstruct(&self.ensemble, self.fast_phase()))
            .r2
            .sqrt()
    }

    pub fn second_moment(&self) -> f64 {
        moments(&self.ensemble).second_moment_sum
    }
}

/// Mean-drift error against a dense rule for H1 = cos^2(n sigma) as a
/// function of the node count p = 1..=max_p. Shows where the trapezoidal
/// rule becomes exact (p = 2n + 3).
#[wasm_bindgen]
pub fn quadrature_errors(harmonic: u32, max_p: usize) -> Result<js_sys::Float64Array, JsValue> {
    let values = quadrature_error_table(harmonic, max_p).map_err(|e| JsValue::from_str(&e))?;
    Ok(js_sys::Float64Array::from(values.as_slice()))
}

fn quadrature_error_table(harmonic: u32, max_p: usize) -> Result<Vec<f64>, String> {
    let h1 = H1Kind::CosSquared(Ratio::new(harmonic, 1).map_err(|e| e.to_string())?);
    let res = classify_resonance(&h1).map_err(|e| e.to_string())?;
    let period = res.fast_period();
    let dense = PeriodicQuadrature::build(1024, period).map_err(|e| e.to_string())?;
    let probes = [(1.0, 0.0), (0.0, 1.0), (0.6, -0.8)];
    let mut out = Vec::with_capacity(max_p);
    for p in 1..=max_p {
        let quad = PeriodicQuadrature::build(p, period).map_err(|e| e.to_string())?;
        let mut err: f64 = 0.0;
        for &(q, u) in &probes {
            let got = h1_mean_drift(&h1, q, u, &quad, &res);
            let want = h1_mean_drift(&h1, q, u, &dense, &res);
            err = err.max((got.0 - want.0).abs()).max((got.1 - want.1).abs());
        }
        out.push(err);
    }
    Ok(out)
}

/// Averaged external-field drift (dq, du) sampled on a square lattice of
/// side `side` spanning [-extent, extent]^2, interleaved as
/// (q, u, dq, du) per lattice point. Visualizes the focusing, defocusing or
/// null mean effect of the oscillating field.
#[wasm_bindgen]
pub fn mean_drift_field(
    kind: String,
    harmonic: u32,
    side: usize,
    extent: f64,
) -> Result<js_sys::Float64Array, JsValue> {
    let values =
        mean_drift_lattice(&kind, harmonic, side, extent).map_err(|e| JsValue::from_str(&e))?;
    Ok(js_sys::Float64Array::from(values.as_slice()))
}

fn mean_drift_lattice(
    kind: &str,
    harmonic: u32,
    side: usize,
    extent: f64,
) -> Result<Vec<f64>, String> {
    if side < 2 || !(extent > 0.0) {
        return Err("lattice needs side >= 2 and a positive extent".to_string());
    }
    let h1 = h1_from_choice(kind, harmonic)?;
    let res = classify_resonance(&h1).map_err(|e| e.to_string())?;
    let quad = PeriodicQuadrature::build(64, res.fast_period()).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(side * side * 4);
    for i in 0..side {
        for j in 0..side {
            let q = -extent + 2.0 * extent * i as f64 / (side - 1) as f64;
            let u = -extent + 2.0 * extent * j as f64 / (side - 1) as f64;
            let (dq, du) = h1_mean_drift(&h1, q, u, &quad, &res);
            out.extend_from_slice(&[q, u, dq, du]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_builder_accepts_the_demo_presets() {
        for kind in ["zero", "cos", "cos2", "irrational"] {
            let config = demo_config(0.01, kind, 2, true, 1.0, 1000, 15, 1).unwrap();
            assert!(config.validate().is_ok());
        }
        assert!(demo_config(0.01, "nope", 1, true, 1.0, 1000, 15, 1).is_err());
    }

    #[test]
    fn quadrature_table_shows_the_exactness_threshold() {
        let table = quadrature_error_table(2, 12).unwrap();
        assert!(table[5] > 1e-6); // p = 6 aliases
        for &err in &table[6..] {
            assert!(err <= 1e-12); // p >= 7 exact
        }
    }

    #[test]
    fn drift_lattice_reports_defocusing_geometry() {
        // cos(2 tau): dq = u/4, du = q/4 on the lattice
        let values = mean_drift_lattice("cos", 2, 5, 2.0).unwrap();
        for chunk in values.chunks_exact(4) {
            let (q, u, dq, du) = (chunk[0], chunk[1], chunk[2], chunk[3]);
            assert!((dq - u / 4.0).abs() <= 1e-12);
            assert!((du - q / 4.0).abs() <= 1e-12);
        }
        // cos(tau): no mean effect
        let values = mean_drift_lattice("cos", 1, 5, 2.0).unwrap();
        for chunk in values.chunks_exact(4) {
            assert!(chunk[2].abs() <= 1e-13 && chunk[3].abs() <= 1e-13);
        }
    }
}
