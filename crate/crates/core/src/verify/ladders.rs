//! Checks along parameter ladders: energy bounds, the relaxation gap, L2
//! convergence of u_eps and integrability thresholds of the H-term of v.

use std::f64::consts::PI;

use serde::Serialize;

use super::{Measurement, Relation, VerifyReport};
use crate::approx::EpsProfileSet;
use crate::energy::{gap_experiment, integrability_levels, l2_distance, AnyMap, HParams, QuadSpec};
use crate::geom::RegionTag;

/// E(b_delta) along the delta ladder and E(u_eps) along the eps ladder.
pub fn check_energies(deltas: &[f64], eps: &[f64], gamma: f64, h: &HParams, quad: &QuadSpec) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "energies",
        "E(b_delta) is bounded uniformly in delta; E(u_eps) is bounded along the ladder",
        "bdelta, ueps",
    );
    let g = match gap_experiment(eps, deltas, gamma, h, quad) {
        Ok(g) => g,
        Err(e) => {
            rep.fail_with(e);
            return rep;
        }
    };
    rep.samples = g.bdelta.len() + g.ueps.len() + 1;
    rep.push(Measurement::info("E(v)", g.energy_v.total));
    rep.timings_ms.push(("E(v)".into(), g.energy_v.runtime_ms));
    for r in &g.bdelta {
        rep.timings_ms.push((format!("E(b_delta) delta={}", r.param), r.runtime_ms));
    }
    for r in &g.ueps {
        rep.timings_ms.push((format!("E(u_eps) eps={}", r.param), r.runtime_ms));
    }
    for r in &g.bdelta {
        rep.push(Measurement::new(format!("E(b_delta) delta={}", r.param), r.energy, Relation::Lt, f64::INFINITY));
        rep.push(Measurement::flag(format!("delta={} converged", r.param), r.converged));
    }
    if !g.bdelta.is_empty() {
        rep.push(Measurement::new("b_delta max/min", g.bdelta_spread, Relation::Lt, 2.0));
        rep.push(Measurement::flag("no monotone blow-up", !g.bdelta_monotone_blowup));
    }
    for r in &g.ueps {
        rep.push(Measurement::new(format!("E(u_eps) eps={}", r.param), r.energy, Relation::Lt, f64::INFINITY));
        rep.push(Measurement::flag(format!("eps={} converged", r.param), r.converged));
    }
    rep
}

/// |E(u_eps) - (E(v) + 2 pi)| along the eps ladder.
pub fn check_gap(eps: &[f64], gamma: f64, h: &HParams, quad: &QuadSpec) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "gap",
        "E(u_eps) tends to F(v) = E(v) + 2 pi as eps decreases",
        "ueps",
    );
    let g = match gap_experiment(eps, &[], gamma, h, quad) {
        Ok(g) => g,
        Err(e) => {
            rep.fail_with(e);
            return rep;
        }
    };
    rep.samples = g.ueps.len() + 1;
    rep.push(Measurement::info("E(v)", g.energy_v.total));
    rep.push(Measurement::info("E(v) error estimate", g.energy_v.error_est));
    rep.push(Measurement::info("F(v)", g.relaxed_v));
    for r in &g.ueps {
        rep.push(Measurement::info(format!("E(u_eps) - F(v) eps={}", r.param), r.deviation));
        rep.push(Measurement::info(format!("error estimate eps={}", r.param), r.error_est));
    }
    rep.push(Measurement::flag("|E(u_eps) - F(v)| decreasing", g.deviation_decreasing));
    rep.push(Measurement::new("|E(u_eps_min) - F(v)|", g.final_deviation, Relation::Le, 0.2 * PI));
    rep
}

/// ||u_eps - v||_L2 along the ladder and eta_eps / eps^gamma at the
/// smallest eps.
pub fn check_convergence(eps: &[f64], gamma: f64, quad: &QuadSpec) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "convergence",
        "u_eps approaches v in L2; eta_eps / eps^gamma tends to 2",
        "ueps",
    );
    let mut eps: Vec<f64> = eps.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    if eps.len() < 3 {
        rep.fail_with("ladder needs at least 3 values");
        return rep;
    }
    let mut dists = Vec::new();
    for &e in &eps {
        match AnyMap::ueps(e, gamma) {
            Ok(m) => {
                let (d, conv) = l2_distance(&m, &AnyMap::V, quad);
                rep.push(Measurement::info(format!("L2 distance eps={e}"), d));
                rep.push(Measurement::flag(format!("eps={e} converged"), conv));
                dists.push(d);
            }
            Err(e) => {
                rep.fail_with(e);
                return rep;
            }
        }
    }
    rep.samples = dists.len();
    rep.push(Measurement::flag("L2 distance strictly decreasing", dists.windows(2).all(|w| w[1] < w[0])));
    let e_min = *eps.last().unwrap();
    match EpsProfileSet::new(e_min, gamma) {
        Ok(p) => {
            let q = p.eta / p.eg;
            rep.push(Measurement::new(format!("eta/eps^gamma at eps={e_min} >= 1.9"), q, Relation::Ge, 1.9));
            rep.push(Measurement::new(format!("eta/eps^gamma at eps={e_min} <= 2.1"), q, Relation::Le, 2.1));
        }
        Err(e) => rep.fail_with(e),
    }
    rep
}

/// One integrability experiment: region, H exponents, and whether the
/// H-integral of v is expected to converge.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntegrabilityCase {
    pub region: RegionTag,
    pub alpha: f64,
    pub beta: f64,
    pub integrable: bool,
    /// required per-level growth factor when not integrable
    pub min_growth: f64,
}

impl IntegrabilityCase {
    pub fn standard() -> Vec<Self> {
        let c = |region, alpha, beta, integrable, min_growth| IntegrabilityCase {
            region,
            alpha,
            beta,
            integrable,
            min_growth,
        };
        vec![
            c(RegionTag::D, 0.25, 1.25, true, 1.0),
            c(RegionTag::D, 0.6, 1.25, false, 2.0),
            c(RegionTag::E, 0.25, 1.4, true, 1.0),
            c(RegionTag::E, 0.4, 1.25, false, 1.0),
            c(RegionTag::E, 0.25, 1.6, false, 1.0),
        ]
    }
}

/// H-integral of v over a region with the mesh resolving the singular set
/// down to 2^-level. Convergent cases must settle below 1% between the last
/// two levels; divergent ones must keep growing by `min_growth` per level.
pub fn check_integrability(levels: &[u32], cases: &[IntegrabilityCase]) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "integrability",
        "the H-term of v is integrable exactly below the exponent thresholds",
        "v",
    );
    if levels.len() < 2 {
        rep.fail_with("need at least two levels");
        return rep;
    }
    for c in cases {
        let h = HParams::unchecked(1.0, c.alpha, c.beta);
        let r = integrability_levels(c.region, &h, levels);
        rep.samples += r.values.len();
        let tag = format!("{} alpha={} beta={}", c.region, c.alpha, c.beta);
        rep.push(Measurement::info(format!("{tag} last value"), *r.values.last().unwrap()));
        let last = *r.rel_diffs.last().unwrap();
        if c.integrable {
            rep.push(Measurement::new(format!("{tag} last relative change"), last, Relation::Lt, 1e-2));
        } else {
            let g = r.growth.iter().copied().fold(f64::INFINITY, f64::min);
            rep.push(Measurement::new(format!("{tag} last relative change"), last, Relation::Ge, 1e-2));
            let rel = if c.min_growth > 1.0 { Relation::Ge } else { Relation::Gt };
            rep.push(Measurement::new(format!("{tag} min growth per level"), g, rel, c.min_growth));
        }
    }
    rep
}
