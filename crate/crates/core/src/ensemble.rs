//! Macro-particle ensemble: the Dirac-sum representation of either the slow
//! profile G or the physical distribution f.
//!
//! The radial problem lives on r >= 0 but is extended to the whole line with
//! the convention f(t, r, v) = f(t, -r, -v). Ensembles are built as mirrored
//! pairs stored adjacently — particle 2j+1 is the exact negation of particle
//! 2j — so the convention holds at machine precision and every push that
//! commutes with negation preserves it bit-exactly.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::config::{SamplingMeasure, ScenarioConfig};
use crate::error::{Error, Result};

/// Which distribution the phase-space coordinates refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Slow profile coordinates (q, u): non-oscillating.
    SlowProfileG,
    /// Physical coordinates (r, v_r).
    PhysicalF,
}

/// Flat arrays of phase-space coordinates and constant weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    /// First phase-space coordinate: q (slow profile) or r (physical).
    pub pos: Vec<f64>,
    /// Second coordinate: u or v_r.
    pub vel: Vec<f64>,
    /// Non-negative macro-particle charges, untouched by every push.
    pub weight: Vec<f64>,
    pub label: Representation,
}

impl ParticleEnsemble {
    pub fn new(pos: Vec<f64>, vel: Vec<f64>, weight: Vec<f64>, label: Representation) -> Self {
        assert_eq!(pos.len(), vel.len());
        assert_eq!(pos.len(), weight.len());
        ParticleEnsemble {
            pos,
            vel,
            weight,
            label,
        }
    }

    /// Build mirrored pairs from one half of the ensemble: each (x, v, w)
    /// spawns (x, v, w) and (-x, -v, w) at adjacent indices.
    pub fn from_mirror_pairs(half: &[(f64, f64, f64)], label: Representation) -> Self {
        let n = half.len() * 2;
        let mut pos = Vec::with_capacity(n);
        let mut vel = Vec::with_capacity(n);
        let mut weight = Vec::with_capacity(n);
        for &(x, v, w) in half {
            pos.push(x);
            vel.push(v);
            weight.push(w);
            pos.push(-x);
            vel.push(-v);
            weight.push(w);
        }
        ParticleEnsemble {
            pos,
            vel,
            weight,
            label,
        }
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// Total charge, summed pair-by-pair in index order (fixed order for bit
    /// reproducibility).
    pub fn weight_sum(&self) -> f64 {
        let mut acc = 0.0;
        let mut i = 0;
        while i + 1 < self.weight.len() {
            acc += self.weight[i] + self.weight[i + 1];
            i += 2;
        }
        if i < self.weight.len() {
            acc += self.weight[i];
        }
        acc
    }

    /// True when every even-indexed particle is exactly negated by its
    /// successor, with equal weights. Any NaN breaks the pairing.
    pub fn is_mirror_paired(&self) -> bool {
        if !self.len().is_multiple_of(2) {
            return false;
        }
        self.pos
            .chunks_exact(2)
            .zip(self.vel.chunks_exact(2))
            .zip(self.weight.chunks_exact(2))
            .all(|((p, v), w)| p[1] == -p[0] && v[1] == -v[0] && w[1] == w[0])
    }

    /// Rotate every particle by `angle` in the (pos, vel) plane:
    /// (x, v) -> (cos a * x + sin a * v, -sin a * x + cos a * v).
    /// The label is unchanged; mirror pairing is preserved exactly.
    pub fn rotated(&self, angle: f64) -> ParticleEnsemble {
        let (sin_a, cos_a) = angle.sin_cos();
        let n = self.len();
        let mut pos = vec![0.0; n];
        let mut vel = vec![0.0; n];
        for k in 0..n {
            let (x, v) = (self.pos[k], self.vel[k]);
            pos[k] = cos_a * x + sin_a * v;
            vel[k] = -sin_a * x + cos_a * v;
        }
        ParticleEnsemble {
            pos,
            vel,
            weight: self.weight.clone(),
            label: self.label,
        }
    }

    /// First non-finite coordinate index, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.pos
            .iter()
            .zip(&self.vel)
            .position(|(x, v)| !x.is_finite() || !v.is_finite())
    }
}

/// Uniform in [0, 1) with 53-bit resolution from a seeded stream.
fn uniform_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller on the same stream.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // guard the log against u = 0
    let u = loop {
        let u = uniform_f64(rng);
        if u > 0.0 {
            break u;
        }
    };
    let v = uniform_f64(rng);
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Deterministic RNG for initial sampling; seeded from the config.
pub fn sampling_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw the initial semi-Gaussian beam as N/2 mirrored pairs.
///
/// |r| is drawn on [0, half_width] proportionally to r (radial area measure)
/// or uniformly (planar), per the config; v is centered Gaussian with
/// standard deviation vth; all weights equal intensity / N. Deterministic
/// given the rng state.
pub fn sample_initial(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<ParticleEnsemble> {
    config.validate()?;
    let n = config.n_particles;
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::config("n_particles must be even and non-zero"));
    }
    let w = config.intensity / n as f64;
    let a = config.half_width;
    let mut half = Vec::with_capacity(n / 2);
    for _ in 0..n / 2 {
        let u = uniform_f64(rng);
        let r = match config.sampling {
            // inverse CDF of the density 2r/a^2 on [0, a]
            SamplingMeasure::Radial => a * u.sqrt(),
            SamplingMeasure::Planar => a * u,
        };
        let v = if config.vth > 0.0 {
            config.vth * standard_normal(rng)
        } else {
            0.0
        };
        half.push((r, v, w));
    }
    Ok(ParticleEnsemble::from_mirror_pairs(
        &half,
        Representation::SlowProfileG,
    ))
}
