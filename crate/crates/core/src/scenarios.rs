//! Named scenario presets, one per validation experiment, so tests and the
//! CLI reference them unambiguously.

use crate::config::{defaults, H1Kind, Ratio, SamplingMeasure, ScenarioConfig};
use crate::error::{Error, Result};

/// What the scenario is expected to do, used by tests and reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpectedBehavior {
    /// Slow profile is a fixed point; the beam only rotates.
    StationaryG,
    /// Slow profile rotates rigidly at the given rate.
    ExactRotation(f64),
    /// Oscillating field leaves no mean effect.
    MeanZero,
    /// Mean effect contracts the beam envelope.
    Focusing,
    /// Mean effect grows the beam envelope.
    Defocusing,
    /// No analytic solution; validated against the reference solver.
    NonlinearCompare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub config: ScenarioConfig,
    pub behavior: ExpectedBehavior,
}

pub const PRESET_NAMES: [&str; 6] = [
    "linear-nonresonant",
    "linear-resonant-n2",
    "semi-gaussian-eps001",
    "mean-zero-eps01",
    "focusing-cos2",
    "defocusing-cos2t",
];

fn base_config(epsilon: f64, h1_kind: H1Kind, t_end: f64) -> ScenarioConfig {
    ScenarioConfig {
        epsilon,
        h1_kind,
        intensity: defaults::INTENSITY,
        vth: defaults::VTH,
        half_width: defaults::HALF_WIDTH,
        n_particles: defaults::N_PARTICLES,
        grid_nodes: defaults::GRID_NODES,
        grid_extent: defaults::GRID_EXTENT_FACTOR * defaults::HALF_WIDTH,
        quad_nodes: defaults::QUAD_NODES,
        dt: defaults::DT,
        t_end,
        seed: defaults::SEED,
        self_field: true,
        sampling: SamplingMeasure::Radial,
        snapshots: vec![],
        dt_ref: None,
    }
}

/// Support half-width of the wider test beam used in the eps = 0.1 runs.
const WIDE_HALF_WIDTH: f64 = 1.83271471003;

fn wide_config(h1_kind: H1Kind, t_end: f64, snapshots: Vec<f64>) -> ScenarioConfig {
    let mut config = base_config(0.1, h1_kind, t_end);
    config.half_width = WIDE_HALF_WIDTH;
    config.grid_extent = defaults::GRID_EXTENT_FACTOR * WIDE_HALF_WIDTH;
    config.snapshots = snapshots;
    config
}

/// Look up a preset by name; unknown names are config errors.
// 6.28 is the experiments' stated horizon, not an approximation of 2 pi.
#[allow(clippy::approx_constant)]
pub fn preset(name: &str) -> Result<ScenarioPreset> {
    let ratio = |num, den| Ratio::new(num, den).expect("static ratio");
    let p = match name {
        "linear-nonresonant" => {
            let mut config = base_config(
                0.01,
                H1Kind::Irrational(4.0 * std::f64::consts::SQRT_2),
                6.28,
            );
            config.self_field = false;
            ScenarioPreset {
                name: "linear-nonresonant",
                config,
                behavior: ExpectedBehavior::StationaryG,
            }
        }
        "linear-resonant-n2" => {
            let mut config = base_config(0.01, H1Kind::CosSquared(ratio(2, 1)), 6.28);
            config.self_field = false;
            ScenarioPreset {
                name: "linear-resonant-n2",
                config,
                behavior: ExpectedBehavior::ExactRotation(0.25),
            }
        }
        "semi-gaussian-eps001" => {
            let mut config = base_config(0.01, H1Kind::Zero, 69.115);
            config.snapshots = vec![0.031, 34.558, 69.115];
            ScenarioPreset {
                name: "semi-gaussian-eps001",
                config,
                behavior: ExpectedBehavior::NonlinearCompare,
            }
        }
        "mean-zero-eps01" => ScenarioPreset {
            name: "mean-zero-eps01",
            config: wide_config(H1Kind::Cos(ratio(1, 1)), 9.52, vec![9.30, 9.52]),
            behavior: ExpectedBehavior::MeanZero,
        },
        "focusing-cos2" => ScenarioPreset {
            name: "focusing-cos2",
            config: wide_config(
                H1Kind::CosSquared(ratio(1, 1)),
                72.26,
                vec![6.26, 18.85, 31.42, 72.26],
            ),
            behavior: ExpectedBehavior::Focusing,
        },
        "defocusing-cos2t" => ScenarioPreset {
            name: "defocusing-cos2t",
            config: wide_config(H1Kind::Cos(ratio(2, 1)), 2.20, vec![2.20]),
            behavior: ExpectedBehavior::Defocusing,
        },
        _ => {
            return Err(Error::config(format!(
                "unknown preset `{name}`; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(p)
}
