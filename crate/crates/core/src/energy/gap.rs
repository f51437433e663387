//! Ladder experiments: energies of u_eps and b_delta against F(v), L2
//! distances, and integrability of the H-term of v near its singular sets.

use serde::Serialize;

use super::quad::{integrate, QuadSpec};
use super::target::{region_domain, AnyMap};
use super::{energy, region_slot, EnergyReport, HParams};
use crate::dipole::singular_inverse_norm;
use crate::error::{Error, Result};
use crate::geom::{AxiMap, HalfPlanePoint, RegionTag};

#[derive(Clone, Debug, Serialize)]
pub struct LadderRow {
    /// eps for u_eps rows, delta for b_delta rows
    pub param: f64,
    pub energy: f64,
    pub error_est: f64,
    pub converged: bool,
    /// E - F(v)
    pub deviation: f64,
    pub runtime_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapLedger {
    pub energy_v: EnergyReport,
    pub singular_norm: f64,
    pub relaxed_v: f64,
    pub ueps: Vec<LadderRow>,
    pub bdelta: Vec<LadderRow>,
    pub ueps_spread: f64,
    pub bdelta_spread: f64,
    /// b_delta energies strictly increase as delta decreases, with spread >= 2
    pub bdelta_monotone_blowup: bool,
    /// |E(u_eps) - F(v)| strictly decreasing along the ladder (eps decreasing)
    pub deviation_decreasing: bool,
    pub final_deviation: f64,
}

fn spread(xs: &[f64]) -> f64 {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi / lo
}

fn row(map: &AnyMap, param: f64, quad: &QuadSpec, h: &HParams, relaxed: f64) -> LadderRow {
    let r = energy(map, quad, h);
    LadderRow {
        param,
        energy: r.total,
        error_est: r.error_est,
        converged: r.converged,
        deviation: r.total - relaxed,
        runtime_ms: r.runtime_ms,
    }
}

/// Energies of u_eps and b_delta along the ladders, next to E(v) and
/// F(v) = E(v) + 2 |D^s v^-1|. Ladders are sorted by decreasing parameter.
pub fn gap_experiment(
    eps_ladder: &[f64],
    delta_ladder: &[f64],
    gamma: f64,
    h: &HParams,
    quad: &QuadSpec,
) -> Result<GapLedger> {
    if eps_ladder.is_empty() && delta_ladder.is_empty() {
        return Err(Error::InvalidParams("both ladders are empty".into()));
    }
    let mut eps: Vec<f64> = eps_ladder.to_vec();
    let mut dels: Vec<f64> = delta_ladder.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    dels.sort_by(|a, b| b.total_cmp(a));
    let energy_v = energy(&AnyMap::V, quad, h);
    let singular_norm = singular_inverse_norm(64)?.total;
    let relaxed_v = energy_v.total + 2.0 * singular_norm;
    let mut ueps = Vec::new();
    for &e in &eps {
        ueps.push(row(&AnyMap::ueps(e, gamma)?, e, quad, h, relaxed_v));
    }
    let mut bdelta = Vec::new();
    for &d in &dels {
        bdelta.push(row(&AnyMap::bdelta(d)?, d, quad, h, relaxed_v));
    }
    let ue: Vec<f64> = ueps.iter().map(|r| r.energy).collect();
    let be: Vec<f64> = bdelta.iter().map(|r| r.energy).collect();
    let bdelta_spread = if be.is_empty() { 1.0 } else { spread(&be) };
    let dev: Vec<f64> = ueps.iter().map(|r| r.deviation.abs()).collect();
    Ok(GapLedger {
        ueps_spread: if ue.is_empty() { 1.0 } else { spread(&ue) },
        bdelta_spread,
        bdelta_monotone_blowup: be.len() > 1
            && be.windows(2).all(|w| w[1] > w[0])
            && bdelta_spread >= 2.0,
        deviation_decreasing: dev.windows(2).all(|w| w[1] < w[0]),
        final_deviation: dev.last().copied().unwrap_or(f64::NAN),
        energy_v,
        singular_norm,
        relaxed_v,
        ueps,
        bdelta,
    })
}

/// || a - b ||_{L^2(B(0,4))} on the patches of `a`.
pub fn l2_distance(a: &AnyMap, b: &AnyMap, quad: &QuadSpec) -> (f64, bool) {
    let f = |p: HalfPlanePoint| -> Result<(usize, [f64; 2])> {
        let x = a.eval(p)?;
        let y = b.eval(p)?;
        let d = (x.r - y.r).powi(2) + (x.x3 - y.x3).powi(2);
        Ok((region_slot(a.tag(p)?), [d, 0.0]))
    };
    let i = integrate(&a.domain(), quad, &f);
    (i.total().sqrt(), i.converged)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityReport {
    pub region: RegionTag,
    pub h: HParams,
    pub levels: Vec<u32>,
    /// H-term of v over the region with the mesh graded to 2^-level
    pub values: Vec<f64>,
    /// |I_{k+1} - I_k| / |I_{k+1}|
    pub rel_diffs: Vec<f64>,
    /// I_{k+1} / I_k
    pub growth: Vec<f64>,
    /// last relative difference below 1%
    pub converges: bool,
}

/// H-term of v over one region, level k resolving the singular sets down to
/// 2^-k in chart units with no error-driven refinement.
pub fn integrability_levels(region: RegionTag, h: &HParams, levels: &[u32]) -> IntegrabilityReport {
    let dom = region_domain(region, None);
    let slot = region_slot(region);
    let f = |p: HalfPlanePoint| -> Result<(usize, [f64; 2])> {
        let tag = AnyMap::V.tag(p)?;
        if tag != region {
            return Ok((slot, [0.0, 0.0]));
        }
        let j = AnyMap::V.jacobian_in(tag, p)?;
        Ok((slot, [h.eval(j.det().abs()).unwrap_or(f64::INFINITY), 0.0]))
    };
    let values: Vec<f64> = levels
        .iter()
        .map(|&k| {
            let q = QuadSpec {
                adaptive: false,
                anchor_scale: Some(0.5f64.powi(k as i32)),
                max_depth: 400,
                ..QuadSpec::default()
            };
            integrate(&dom, &q, &f).total()
        })
        .collect();
    let rel_diffs: Vec<f64> = values.windows(2).map(|w| ((w[1] - w[0]) / w[1]).abs()).collect();
    let growth: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    IntegrabilityReport {
        region,
        h: *h,
        levels: levels.to_vec(),
        converges: rel_diffs.last().is_some_and(|&d| d < 1e-2),
        values,
        rel_diffs,
        growth,
    }
}
