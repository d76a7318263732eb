//! Reconstruction of the physical beam from the slow profile, beam moment
//! diagnostics, and the gridded-density comparison metric.

use crate::ensemble::{ParticleEnsemble, Representation};
use crate::error::{Error, Result};
use crate::field::{deposit, RadialGrid};

/// Weighted phase-space moments of an ensemble.
///
/// `second_moment_sum` is the monitored quantity |r|^2 f + |v|^2 f whose
/// boundedness controls the solution norm; for mirrored ensembles the means
/// vanish exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamMoments {
    pub mean_r: f64,
    pub mean_v: f64,
    pub r2: f64,
    pub v2: f64,
    pub rv: f64,
    pub emittance: f64,
    pub second_moment_sum: f64,
    pub weight_sum: f64,
}

/// Map the slow profile to the physical beam at fast phase `tau`:
/// (r, v) = (cos tau q + sin tau u, -sin tau q + cos tau u).
/// Used with tau = t / epsilon. Weights are unchanged; the rotation is an
/// isometry, so the second moments and the emittance are preserved.
pub fn reconstruct(g_ensemble: &ParticleEnsemble, tau: f64) -> ParticleEnsemble {
    assert_eq!(
        g_ensemble.label,
        Representation::SlowProfileG,
        "reconstruct expects a slow-profile ensemble"
    );
    let mut out = g_ensemble.rotated(tau);
    out.label = Representation::PhysicalF;
    out
}

/// Weighted moments with a fixed pairwise summation order: terms are added
/// pair by pair, so mirrored contributions cancel exactly and reruns are
/// bit-identical.
pub fn moments(ensemble: &ParticleEnsemble) -> BeamMoments {
    let n = ensemble.len();
    let mut w_sum = 0.0;
    let mut m_r = 0.0;
    let mut m_v = 0.0;
    let mut m_rr = 0.0;
    let mut m_vv = 0.0;
    let mut m_rv = 0.0;

    let term = |k: usize| -> (f64, f64, f64, f64, f64, f64) {
        let (r, v, w) = (ensemble.pos[k], ensemble.vel[k], ensemble.weight[k]);
        (w, w * r, w * v, w * r * r, w * v * v, w * r * v)
    };
    let mut k = 0;
    while k + 1 < n {
        let a = term(k);
        let b = term(k + 1);
        w_sum += a.0 + b.0;
        m_r += a.1 + b.1;
        m_v += a.2 + b.2;
        m_rr += a.3 + b.3;
        m_vv += a.4 + b.4;
        m_rv += a.5 + b.5;
        k += 2;
    }
    if k < n {
        let a = term(k);
        w_sum += a.0;
        m_r += a.1;
        m_v += a.2;
        m_rr += a.3;
        m_vv += a.4;
        m_rv += a.5;
    }

    let inv = if w_sum != 0.0 { 1.0 / w_sum } else { 0.0 };
    let r2 = m_rr * inv;
    let v2 = m_vv * inv;
    let rv = m_rv * inv;
    BeamMoments {
        mean_r: m_r * inv,
        mean_v: m_v * inv,
        r2,
        v2,
        rv,
        emittance: (r2 * v2 - rv * rv).max(0.0).sqrt(),
        second_moment_sum: r2 + v2,
        weight_sum: w_sum,
    }
}

/// Relative L2 distance between the gridded spatial densities of two
/// physical ensembles: ||lambda_a - lambda_b||_2 / ||lambda_a||_2.
///
/// Particle identities differ across solvers, so densities are the
/// physically comparable object.
pub fn density_discrepancy(
    ens_a: &ParticleEnsemble,
    ens_b: &ParticleEnsemble,
    grid: &RadialGrid,
) -> Result<f64> {
    debug_assert_eq!(ens_a.label, Representation::PhysicalF);
    debug_assert_eq!(ens_b.label, Representation::PhysicalF);
    let da = deposit(&ens_a.pos, &ens_a.weight, grid);
    let db = deposit(&ens_b.pos, &ens_b.weight, grid);
    let mut diff2 = 0.0;
    let mut ref2 = 0.0;
    for (a, b) in da.values.iter().zip(&db.values) {
        diff2 += (a - b) * (a - b);
        ref2 += a * a;
    }
    if ref2 == 0.0 {
        return Err(Error::config(
            "density_discrepancy: reference density has zero norm",
        ));
    }
    Ok((diff2 / ref2).sqrt())
}
