//! Neo-Hookean energy E(u) = int |Du|^2 + H(|det Du|) of axisymmetric maps,
//! computed as 2 pi int int (...) r dr dx3 on the meridian half-disk.

pub mod gap;
pub mod quad;
pub mod target;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dipole::singular_inverse_norm;
use crate::error::{Error, Result};
use crate::geom::{AxiMap, HalfPlanePoint, RegionTag};

pub use gap::{gap_experiment, integrability_levels, l2_distance, GapLedger, IntegrabilityReport};
pub use quad::{integrate, Anchor, Chart, Integral, Patch, QuadSpec};
pub use target::{meridian_domain, region_domain, AnyMap};

/// H(t) = c (t^-alpha + t^beta).
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct HParams {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for HParams {
    fn default() -> Self {
        HParams {
            c: 1.0,
            alpha: 0.25,
            beta: 1.25,
        }
    }
}

impl HParams {
    /// Admissible family: 0 < alpha < 1/3, 1 < beta < 3/2, c > 0.
    pub fn new(c: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0 / 3.0) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} violates 0 < alpha < 1/3")));
        }
        if !(beta > 1.0 && beta < 1.5) {
            return Err(Error::InvalidParams(format!("beta = {beta} violates 1 < beta < 3/2")));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidParams(format!("c = {c} must be positive")));
        }
        Ok(HParams { c, alpha, beta })
    }

    /// Exponents outside the admissible ranges, for divergence probes.
    pub fn unchecked(c: f64, alpha: f64, beta: f64) -> Self {
        HParams { c, alpha, beta }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonpositiveJacobian(t));
        }
        Ok(self.c * (t.powf(-self.alpha) + t.powf(self.beta)))
    }
}

pub fn h_eval(t: f64, h: &HParams) -> Result<f64> {
    h.eval(t)
}

pub fn region_slot(tag: RegionTag) -> usize {
    RegionTag::DIPOLE.iter().position(|&t| t == tag).unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    pub c0: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct RegionEnergy {
    pub dirichlet: f64,
    pub hterm: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub map: String,
    pub params: ReportParams,
    pub dirichlet: f64,
    pub hterm: f64,
    pub total: f64,
    pub error_est: f64,
    pub converged: bool,
    pub cells: usize,
    pub evaluations: usize,
    pub failed_points: usize,
    pub regions: BTreeMap<RegionTag, RegionEnergy>,
    pub runtime_ms: u128,
}

impl EnergyReport {
    /// The report, or [`Error::BudgetExceeded`] when the tolerance was missed.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::BudgetExceeded {
                value: self.total,
                err: self.error_est,
            })
        }
    }
}

fn report_params(map: &AnyMap, h: &HParams) -> ReportParams {
    let (gamma, delta, eps, c0) = match map {
        AnyMap::Ueps(m) => (Some(m.prof.gamma), None, Some(m.prof.eps), None),
        AnyMap::Bdelta(m) => (
            Some(m.params.gamma),
            Some(m.params.delta),
            Some(m.params.eps),
            Some(m.params.c0),
        ),
        _ => (None, None, None, None),
    };
    ReportParams {
        alpha: h.alpha,
        beta: h.beta,
        c: h.c,
        gamma,
        delta,
        eps,
        c0,
    }
}

/// Energy of `map` over the union of `domain` patches.
pub fn energy_integrate(map: &AnyMap, domain: &[Patch], quad: &QuadSpec, h: &HParams) -> EnergyReport {
    let start = Instant::now();
    let f = |p: HalfPlanePoint| -> Result<(usize, [f64; 2])> {
        let tag = map.tag(p)?;
        let j = map.jacobian_in(tag, p)?;
        let det = map.exact_det(p).unwrap_or_else(|| j.det());
        let hv = h.eval(det.abs()).unwrap_or(f64::INFINITY);
        Ok((region_slot(tag), [j.frobenius_sq(), hv]))
    };
    let integral = integrate(domain, quad, &f);
    let mut regions = BTreeMap::new();
    let mut dir = Vec::new();
    let mut hh = Vec::new();
    let mut tot = Vec::new();
    for (k, &t) in RegionTag::DIPOLE.iter().enumerate() {
        let (d, e) = (integral.parts[2 * k], integral.parts[2 * k + 1]);
        dir.push(d);
        hh.push(e);
        tot.push(d + e);
        if d != 0.0 || e != 0.0 {
            regions.insert(t, RegionEnergy { dirichlet: d, hterm: e, total: d + e });
        }
    }
    use crate::numerics::pairwise_sum;
    EnergyReport {
        map: map.name().to_string(),
        params: report_params(map, h),
        dirichlet: pairwise_sum(&dir),
        hterm: pairwise_sum(&hh),
        total: pairwise_sum(&tot),
        error_est: integral.error_est,
        converged: integral.converged,
        cells: integral.cells,
        evaluations: integral.evaluations,
        failed_points: integral.failed_points,
        regions,
        runtime_ms: start.elapsed().as_millis(),
    }
}

/// Energy over the map's own graded domain.
pub fn energy(map: &AnyMap, quad: &QuadSpec, h: &HParams) -> EnergyReport {
    energy_integrate(map, &map.domain(), quad, h)
}

#[derive(Clone, Debug, Serialize)]
pub struct RelaxedValue {
    pub energy: EnergyReport,
    pub singular_norm: f64,
    /// E + 2 |D^s u^-1|
    pub relaxed: f64,
}

/// F(u) = E(u) + 2 |D^s u^-1|; the inverse of v jumps across the bubble, the
/// other maps have Sobolev inverses.
pub fn relaxed_value(map: &AnyMap, quad: &QuadSpec, h: &HParams) -> Result<RelaxedValue> {
    let energy = energy(map, quad, h);
    let singular_norm = match map {
        AnyMap::V => singular_inverse_norm(64)?.total,
        _ => 0.0,
    };
    Ok(RelaxedValue {
        relaxed: energy.total + 2.0 * singular_norm,
        energy,
        singular_norm,
    })
}
