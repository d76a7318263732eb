//! Equispaced periodic trapezoidal quadrature over the fast angle.
//!
//! On a periodic integrand the trapezoidal rule with merged endpoints is
//! spectrally accurate: it integrates every harmonic below the node count
//! exactly, so resolved oscillations cost no accuracy at all.

use crate::error::{Error, Result};

/// Nodes sigma_m = m T / p and equal weights gamma_m = T / p on [0, T).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    period: f64,
}

/// Above this node count sums are compensated to preserve spectral exactness.
const COMPENSATED_THRESHOLD: usize = 64;

impl PeriodicQuadrature {
    /// Equispaced rule with `p` nodes on one period `T`. Left endpoints;
    /// the right endpoint is merged by periodicity.
    pub fn build(p: usize, period: f64) -> Result<Self> {
        if p < 1 {
            return Err(Error::config("quadrature needs at least one node"));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::config("quadrature period must be positive"));
        }
        let w = period / p as f64;
        let nodes = (0..p).map(|m| m as f64 * period / p as f64).collect();
        Ok(PeriodicQuadrature {
            nodes,
            weights: vec![w; p],
            period,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Sum of gamma_m * samples_m in ascending node order.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(Error::config(format!(
                "integrate: expected {} samples, got {}",
                self.nodes.len(),
                samples.len()
            )));
        }
        if self.nodes.len() > COMPENSATED_THRESHOLD {
            Ok(neumaier_sum(
                self.weights.iter().zip(samples).map(|(g, s)| g * s),
            ))
        } else {
            let mut acc = 0.0;
            for (g, s) in self.weights.iter().zip(samples) {
                acc += g * s;
            }
            Ok(acc)
        }
    }
}

/// Compensated (Neumaier) summation in iteration order.
fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
