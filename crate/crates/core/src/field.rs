//! Radial grid, charge deposition and the radial Poisson solve.
//!
//! The field solve uses the enclosed-charge form E(r) = S(r)/r, where S(r)
//! accumulates the symmetrized line charge over [-r, r] (each mirrored pair
//! contributes its full physical weight once). This avoids the r = 0
//! singularity of dividing node charge by |q| dq and conserves charge
//! exactly; particle weights carry the r dr measure, so S is a plain weight
//! sum.

use crate::ensemble::{ParticleEnsemble, Representation};
use crate::error::{Error, Result};

/// Deposit work is split into fixed-size chunks merged in index order, so the
/// result is bit-identical for any thread count (and for the serial path).
const DEPOSIT_CHUNK: usize = 16_384;

/// Symmetric equispaced node set q_i over [-extent, extent], odd count so
/// that 0 is a node. Nodes are derived from the center index, which makes
/// node(c + m) == -node(c - m) bit-exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    len: usize,
    extent: f64,
    spacing: f64,
}

impl RadialGrid {
    pub fn new(nodes: usize, extent: f64) -> Result<Self> {
        if nodes < 3 || nodes.is_multiple_of(2) {
            return Err(Error::config("grid needs an odd node count >= 3"));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::config("grid extent must be positive"));
        }
        Ok(RadialGrid {
            len: nodes,
            extent,
            spacing: 2.0 * extent / (nodes - 1) as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> usize {
        (self.len - 1) / 2
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as isize - self.center() as isize) as f64 * self.spacing
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.node(i))
    }
}

/// Line charge per node (cell charge / dq), symmetrized about the center.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub grid: RadialGrid,
    /// lambda_i, even about the center node.
    pub values: Vec<f64>,
    /// Number of particles clamped to a boundary node.
    pub overflow_count: u64,
    /// Total weight clamped to a boundary node.
    pub overflow_weight: f64,
}

impl DensityTable {
    /// Integral of the line charge over the whole grid, dq * sum(lambda_i).
    pub fn total_weight(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }
}

/// Radial electric field at the nodes, odd about the center, with the total
/// enclosed charge for the point-charge far-field tail.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTable {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub total_charge: f64,
}

fn accumulate_cell(values: &mut [f64], grid: &RadialGrid, x: f64, w: f64) -> bool {
    let last = grid.len() - 1;
    if x <= -grid.extent() {
        values[0] += w;
        return x < -grid.extent();
    }
    if x >= grid.extent() {
        values[last] += w;
        return x > grid.extent();
    }
    let s = (x + grid.extent()) / grid.spacing();
    let i = (s.floor() as usize).min(last - 1);
    let frac = s - i as f64;
    values[i] += w * (1.0 - frac);
    values[i + 1] += w * frac;
    false
}

fn deposit_chunk(grid: &RadialGrid, positions: &[f64], weights: &[f64]) -> (Vec<f64>, u64, f64) {
    let mut values = vec![0.0; grid.len()];
    let mut overflow_count = 0u64;
    let mut overflow_weight = 0.0;
    for (&x, &w) in positions.iter().zip(weights) {
        if accumulate_cell(&mut values, grid, x, w) {
            overflow_count += 1;
            overflow_weight += w;
        }
    }
    (values, overflow_count, overflow_weight)
}

/// Cloud-in-cell (linear hat) deposition followed by mirror symmetrization.
///
/// Particles beyond the grid are assigned to the boundary node and tallied
/// rather than rejected; long defocusing runs may eject a few particles and
/// the tally keeps that observable.
pub fn deposit(positions: &[f64], weights: &[f64], grid: &RadialGrid) -> DensityTable {
    assert_eq!(positions.len(), weights.len());

    let chunks: Vec<(Vec<f64>, u64, f64)> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            positions
                .par_chunks(DEPOSIT_CHUNK)
                .zip(weights.par_chunks(DEPOSIT_CHUNK))
                .map(|(p, w)| deposit_chunk(grid, p, w))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            positions
                .chunks(DEPOSIT_CHUNK)
                .zip(weights.chunks(DEPOSIT_CHUNK))
                .map(|(p, w)| deposit_chunk(grid, p, w))
                .collect()
        }
    };

    let mut values = vec![0.0; grid.len()];
    let mut overflow_count = 0u64;
    let mut overflow_weight = 0.0;
    for (chunk, count, weight) in chunks {
        for (acc, v) in values.iter_mut().zip(&chunk) {
            *acc += v;
        }
        overflow_count += count;
        overflow_weight += weight;
    }

    // cell charge -> line density
    let inv_dq = 1.0 / grid.spacing();
    for v in &mut values {
        *v *= inv_dq;
    }

    // enforce exact evenness about the center node
    let c = grid.center();
    for m in 1..=c {
        let avg = 0.5 * (values[c - m] + values[c + m]);
        values[c - m] = avg;
        values[c + m] = avg;
    }

    DensityTable {
        grid: *grid,
        values,
        overflow_count,
        overflow_weight,
    }
}

/// Deposit the slow profile along the fast-angle-rotated line: each particle
/// lands at a_k = cos(sigma) q_k + sin(sigma) u_k. This realizes the source
/// of the averaged Poisson equation at fast angle sigma.
pub fn rotated_deposit(ensemble: &ParticleEnsemble, sigma: f64, grid: &RadialGrid) -> DensityTable {
    debug_assert_eq!(ensemble.label, Representation::SlowProfileG);
    let (sin_s, cos_s) = sigma.sin_cos();
    let rotated: Vec<f64> = ensemble
        .pos
        .iter()
        .zip(&ensemble.vel)
        .map(|(q, u)| cos_s * q + sin_s * u)
        .collect();
    deposit(&rotated, &ensemble.weight, grid)
}

/// Solve (1/r) d(r E)/dr = source for the node field via enclosed charge.
///
/// S(q_i) integrates the symmetrized line charge over [-q_i, q_i] with the
/// trapezoid rule (twice the one-sided cumulative sum); E_i = S(q_i)/q_i for
/// positive nodes, E(0) = 0, negative nodes by odd extension.
#[allow(clippy::needless_range_loop)] // prefix sum touching i-1, i and node(i)
pub fn solve_field(density: &DensityTable) -> FieldTable {
    let grid = density.grid;
    let c = grid.center();
    let mut values = vec![0.0; grid.len()];
    let half_dq = 0.5 * grid.spacing();
    let mut cum = 0.0;
    for i in c + 1..grid.len() {
        cum += half_dq * (density.values[i - 1] + density.values[i]);
        values[i] = 2.0 * cum / grid.node(i);
    }
    for m in 1..=c {
        values[c - m] = -values[c + m];
    }
    FieldTable {
        grid,
        values,
        total_charge: 2.0 * cum,
    }
}

impl FieldTable {
    /// Field at an arbitrary coordinate: linear interpolation inside the
    /// grid, point-charge tail sign(x) * Q_tot / |x| outside. Exactly odd by
    /// construction.
    pub fn eval(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let mag = self.eval_positive(x.abs());
        if x < 0.0 {
            -mag
        } else {
            mag
        }
    }

    fn eval_positive(&self, ax: f64) -> f64 {
        let grid = &self.grid;
        if ax >= grid.extent() {
            return self.total_charge / ax;
        }
        let s = ax / grid.spacing();
        let j = (s.floor() as usize).min(grid.len() - grid.center() - 2);
        let frac = s - j as f64;
        let c = grid.center();
        self.values[c + j] * (1.0 - frac) + self.values[c + j + 1] * frac
    }
}

/// Convenience for the pushers: field evaluated at many points, parallel
/// over fixed chunks.
pub fn eval_field_many(field: &FieldTable, xs: &[f64], out: &mut [f64]) {
    assert_eq!(xs.len(), out.len());
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(DEPOSIT_CHUNK)
            .zip(xs.par_chunks(DEPOSIT_CHUNK))
            .for_each(|(o, x)| {
                for (oi, xi) in o.iter_mut().zip(x) {
                    *oi = field.eval(*xi);
                }
            });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (oi, xi) in out.iter_mut().zip(xs) {
            *oi = field.eval(*xi);
        }
    }
}
