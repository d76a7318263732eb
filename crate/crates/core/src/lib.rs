//! Two-scale particle-in-cell solver for an axisymmetric charged beam in a
//! rapidly oscillating periodic focusing channel.
//!
//! The beam's distribution oscillates at the fast focusing frequency
//! 1/epsilon, which forces a conventional PIC solver onto a time step of
//! order epsilon. This crate instead evolves the slow profile G, whose
//! characteristics involve only fast-angle averages of the self-consistent
//! field and of the oscillating external field, and reconstructs the
//! physical beam by a phase-space rotation at the fast phase t/epsilon. A
//! conventional fine-step solver is included as the ground-truth comparator,
//! together with diagnostics and named validation scenarios.

// Validation uses `!(x > 0.0)`-style comparisons on purpose: they reject
// NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod driver;
pub mod ensemble;
pub mod error;
pub mod field;
pub mod output;
pub mod quadrature;
pub mod reference;
pub mod resonance;
pub mod scenarios;
pub mod twoscale;

pub use analysis::{density_discrepancy, moments, reconstruct, BeamMoments};
pub use config::{parse_config, serialize_config, H1Kind, Ratio, SamplingMeasure, ScenarioConfig};
pub use driver::{run_reference, run_two_scale, RunOutput, Snapshot, SolverKind};
pub use ensemble::{sample_initial, sampling_rng, ParticleEnsemble, Representation};
pub use error::{Error, Result};
pub use field::{deposit, rotated_deposit, solve_field, DensityTable, FieldTable, RadialGrid};
pub use quadrature::PeriodicQuadrature;
pub use reference::{external_force, reference_step};
pub use resonance::{classify_resonance, ResonanceClass};
pub use scenarios::{preset, ExpectedBehavior, ScenarioPreset, PRESET_NAMES};
pub use twoscale::{eval_drift, h1_mean_drift, rk4_step, DriftField, DriftScaling, PushContext};
