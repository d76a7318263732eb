//! Resonance classification of the fast-field frequency against omega0 = 1.

use std::f64::consts::TAU;

use crate::config::H1Kind;
use crate::error::{Error, Result};

/// Whether the oscillating field leaves a mean drift in the homogenized
/// equations, and over which fast-angle interval averages are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResonanceClass {
    /// omega1 declared irrational, or H1 = 0: no H1 mean term survives.
    NonResonant,
    /// omega1 = l/k rational: the H1 mean term survives, averaged over
    /// `effective_period` = 2 pi k with normalization `h1_factor` = 1/(2 pi k).
    Resonant {
        effective_period: f64,
        h1_factor: f64,
    },
}

impl ResonanceClass {
    /// Fast-angle period used for quadrature: 2 pi in the non-resonant case,
    /// the effective period otherwise.
    pub fn fast_period(&self) -> f64 {
        match self {
            ResonanceClass::NonResonant => TAU,
            ResonanceClass::Resonant {
                effective_period, ..
            } => *effective_period,
        }
    }

    pub fn is_resonant(&self) -> bool {
        matches!(self, ResonanceClass::Resonant { .. })
    }
}

/// Classify the fast field against omega0 = 1.
///
/// Rationality comes from the config tag, never from a float: `Cos`/
/// `CosSquared` carry an exact rational l/k (in lowest terms) and map to
/// `Resonant` with effective period 2 pi k; `Irrational` and `Zero` map to
/// `NonResonant`.
pub fn classify_resonance(h1_kind: &H1Kind) -> Result<ResonanceClass> {
    match h1_kind {
        H1Kind::Zero => Ok(ResonanceClass::NonResonant),
        H1Kind::Irrational(w) => {
            if !(*w > 0.0) {
                return Err(Error::config("omega1 must be > 0"));
            }
            Ok(ResonanceClass::NonResonant)
        }
        H1Kind::Cos(w) | H1Kind::CosSquared(w) => {
            let effective_period = TAU * f64::from(w.den());
            Ok(ResonanceClass::Resonant {
                effective_period,
                h1_factor: 1.0 / effective_period,
            })
        }
    }
}
