//! Two-sided evaluation across every interface of v, u_eps and b_delta.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use super::{Measurement, Relation, VerifyReport};
use crate::approx::{EpsPart, UEpsMap};
use crate::dipole::{classify_hp, dist_to_u_hp, DipoleMap};
use crate::energy::AnyMap;
use crate::error::Result;
use crate::geom::{AxiMap, HalfPlanePoint, RegionTag};
use crate::numerics::quasi_random;
use crate::patch::{BDeltaMap, Zone};

/// Closed-form seams.
const TOL_EXACT: f64 = 1e-9;
/// Seams whose evaluation goes through a root solve.
const TOL_ROOT: f64 = 1e-6;

type GapFn<'a> = Box<dyn Fn(f64) -> Option<Result<f64>> + Sync + 'a>;

struct Seam<'a> {
    name: String,
    tol: f64,
    /// mismatch at curve parameter t in [0, 1]; None where the seam is absent
    gap: GapFn<'a>,
}

fn hp(r: f64, x3: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(r, x3)
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Points of the region interfaces of the reference atlas, as curves over [0, 1].
fn atlas_curves() -> Vec<(&'static str, RegionTag, RegionTag, fn(f64) -> HalfPlanePoint)> {
    vec![
        ("a|b", RegionTag::A, RegionTag::B, |t| {
            let a = 0.5 * PI * t;
            hp(a.sin(), -a.cos())
        }),
        ("a|d", RegionTag::A, RegionTag::D, |t| hp(t, 0.0)),
        ("e|d", RegionTag::E, RegionTag::D, |t| hp(t, 1.0)),
        ("b|d", RegionTag::B, RegionTag::D, |t| hp(1.0 + 2.0 * t, 0.0)),
        ("f|d", RegionTag::F, RegionTag::D, |t| hp(1.0 + (8f64.sqrt() - 1.0) * t, 1.0)),
        ("e|f", RegionTag::E, RegionTag::F, |t| {
            let a = 0.5 * PI * t;
            hp(a.sin(), 1.0 + a.cos())
        }),
        ("core|outer", RegionTag::Whole, RegionTag::Outer, |t| {
            let b = PI * t;
            hp(3.0 * b.sin(), 3.0 * b.cos())
        }),
    ]
}

/// Seams of the region atlas evaluated through `map.eval_in` on both sides,
/// restricted to the points where `keep` holds.
fn atlas_seams<'a, M: AxiMap>(
    map: &'a M,
    suffix: &'static str,
    tol: f64,
    keep: &'a (dyn Fn(HalfPlanePoint) -> bool + Sync),
) -> Vec<Seam<'a>> {
    atlas_curves()
        .into_iter()
        .map(|(name, s, t, curve)| Seam {
            name: format!("{name}{suffix}"),
            tol,
            gap: Box::new(move |u| {
                let p = curve(u);
                // the poles 0 and 0' are cavitation points
                if p.norm() < 1e-12 || p.r.hypot(p.x3 - 1.0) < 1e-12 || !keep(p) {
                    return None;
                }
                let s = if s == RegionTag::Whole {
                    match classify_hp(p.r, p.x3) {
                        Ok(tag) => tag,
                        Err(e) => return Some(Err(e)),
                    }
                } else {
                    s
                };
                Some((|| Ok(dist2(map.eval_in(s, p.r, p.x3)?, map.eval_in(t, p.r, p.x3)?)))())
            }),
        })
        .collect()
}

fn ueps_seams(m: &UEpsMap) -> Vec<Seam<'_>> {
    use EpsPart::*;
    let eps = m.eps();
    let rho_psi = 1.0 + SQRT_2 * m.prof.eg;
    let q = |t: f64| 0.5 * PI * t;
    let curves: Vec<(&str, EpsPart, EpsPart, f64, Box<dyn Fn(f64) -> (f64, f64) + Sync>)> = vec![
        ("a|b", A, B, TOL_EXACT, Box::new(move |t| (q(t).sin(), -q(t).cos()))),
        ("a|d", A, D, TOL_EXACT, Box::new(move |t| (eps + (1.0 - eps) * t, 0.0))),
        ("a'|a", ACore, A, TOL_ROOT, Box::new(move |t| (eps * q(t).sin(), -eps * q(t).cos()))),
        ("a'|tube", ACore, Tube, TOL_ROOT, Box::new(move |t| (eps * t, 0.0))),
        ("tube|d", Tube, D, TOL_EXACT, Box::new(move |t| (eps, t))),
        ("tube|e'", Tube, ECore, TOL_ROOT, Box::new(move |t| (eps * t, 1.0))),
        ("e'|e", ECore, E, TOL_ROOT, Box::new(move |t| (eps * q(t).sin(), 1.0 + eps * q(t).cos()))),
        ("e|d", E, D, TOL_EXACT, Box::new(move |t| (eps + (1.0 - eps) * t, 1.0))),
        ("e|f", E, F, TOL_EXACT, Box::new(move |t| (q(t).sin(), 1.0 + q(t).cos()))),
        ("d|f", D, F, TOL_EXACT, Box::new(move |t| (1.0 + (8f64.sqrt() - 1.0) * t, 1.0))),
        ("d|b", D, B, TOL_EXACT, Box::new(move |t| (1.0 + 2.0 * t, 0.0))),
        ("b|bpsi", B, BPsi, TOL_EXACT, Box::new(move |t| (rho_psi * q(t).sin(), -rho_psi * q(t).cos()))),
    ];
    let mut out: Vec<Seam> = curves
        .into_iter()
        .map(|(name, a, b, tol, c)| Seam {
            name: name.to_string(),
            tol,
            gap: Box::new(move |t| {
                let (r, z) = c(t);
                if r <= 0.0 {
                    return None;
                }
                Some((|| Ok(dist2(m.eval_part(a, r, z)?, m.eval_part(b, r, z)?)))())
            }),
        })
        .collect();
    out.push(Seam {
        name: "core|outer".into(),
        tol: TOL_EXACT,
        gap: Box::new(move |t| {
            let b = PI * t;
            let (r, z) = (3.0 * b.sin(), 3.0 * b.cos());
            Some((|| {
                let inner = m.part(hp(r, z))?;
                Ok(dist2(m.eval_part(inner, r, z)?, m.eval_part(Outer, r, z)?))
            })())
        }),
    });
    out
}

/// Point k of the closed-form curves at distance `t` from U; `u` in [0, 1]
/// runs along curve `k mod 8`.
fn level_point(t: f64, k: usize, u: f64) -> HalfPlanePoint {
    let a = 0.5 * PI * u;
    let ph = 0.5 * PI * (1.0 + u);
    match k % 8 {
        0 => hp((1.0 + t) * ph.sin(), (1.0 + t) * ph.cos()),
        1 => hp(1.0 + t * a.sin(), t * a.cos()),
        2 => hp(1.0 + t * a.sin(), 1.0 - t * a.cos()),
        3 => hp(1.0 + t * a.sin(), 1.0 + t * a.cos()),
        4 => hp(t + (1.0 - t) * u, t),
        5 => hp(t + (1.0 - t) * u, 1.0 - t),
        6 => hp(t, u),
        _ => hp(u, 1.0 + t),
    }
}

fn bdelta_seams(m: &BDeltaMap) -> Vec<Seam<'_>> {
    let delta = m.delta();
    let mut out = Vec::new();
    for (name, level, inner) in [("core|layer", 0.5 * delta, true), ("layer|exterior", delta, false)] {
        out.push(Seam {
            name: name.to_string(),
            tol: TOL_EXACT,
            gap: Box::new(move |u| {
                // u in [0, 1) spread over the eight level curves
                let k = (8.0 * u).floor() as usize;
                let p = level_point(level, k, 8.0 * u - k as f64);
                if p.r <= 1e-9 || (dist_to_u_hp(p.r, p.x3) - level).abs() > 1e-12 {
                    return None;
                }
                let tag = match classify_hp(p.r, p.x3) {
                    Ok(RegionTag::A) | Ok(RegionTag::Outer) => return None,
                    Ok(t) => t,
                    Err(e) => return Some(Err(e)),
                };
                Some((|| {
                    let lay = m.layer_in(tag, p.r, p.x3)?;
                    let other = if inner {
                        m.u.eval_in(tag, p.r, p.x3)?
                    } else {
                        DipoleMap.eval_in(tag, p.r, p.x3)?
                    };
                    Ok(dist2(lay, other))
                })())
            }),
        });
    }
    let layer_curves: [(&str, RegionTag, RegionTag, fn(f64, f64) -> HalfPlanePoint); 3] = [
        ("layer b|d", RegionTag::B, RegionTag::D, |d, u| hp(1.0 + 0.5 * d * (1.0 + u), 0.0)),
        ("layer d|f", RegionTag::D, RegionTag::F, |d, u| hp(1.0 + 0.5 * d * (1.0 + u), 1.0)),
        ("layer e|f", RegionTag::E, RegionTag::F, |_, u| {
            let a = 0.5 * PI * u;
            hp(a.sin(), 1.0 + a.cos())
        }),
    ];
    for (name, s, t, curve) in layer_curves {
        out.push(Seam {
            name: name.to_string(),
            tol: TOL_EXACT,
            gap: Box::new(move |u| {
                let p = curve(delta, u);
                if m.zone(p.r, p.x3) != Zone::Layer {
                    return None;
                }
                Some((|| Ok(dist2(m.layer_in(s, p.r, p.x3)?, m.layer_in(t, p.r, p.x3)?)))())
            }),
        });
    }
    out
}

fn measure(rep: &mut VerifyReport, seams: &[Seam], n: usize, seed: u64) {
    let ts: Vec<f64> = quasi_random(n, 1, seed).into_iter().map(|u| u[0]).collect();
    let mut total = 0;
    for seam in seams {
        let gaps: Vec<f64> = ts
            .par_iter()
            .filter_map(|&t| (seam.gap)(t))
            .map(|g| g.unwrap_or(f64::INFINITY))
            .collect();
        total += gaps.len();
        let worst = gaps.iter().copied().fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
        rep.push(Measurement::new(format!("{} max mismatch", seam.name), worst, Relation::Le, seam.tol));
        rep.push(Measurement::new(format!("{} samples", seam.name), gaps.len() as f64, Relation::Gt, 0.0));
    }
    rep.samples = total;
}

/// Largest two-sided mismatch on each interface of `map`, `n` quasi-random
/// points per interface.
pub fn check_interfaces(map: &AnyMap, n: usize, seed: u64) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "interfaces",
        "the map is continuous across every region, core and layer interface",
        map.name(),
    );
    match map {
        AnyMap::Identity | AnyMap::V => {
            measure(&mut rep, &atlas_seams(map, "", TOL_EXACT, &|_| true), n, seed);
        }
        AnyMap::Ueps(m) => measure(&mut rep, &ueps_seams(m), n, seed),
        AnyMap::Bdelta(m) => {
            let eps = m.u.eps();
            // the eps-caps about the poles are filled through a root solve
            let in_cap = move |p: HalfPlanePoint| p.norm() <= 2.0 * eps || p.r.hypot(p.x3 - 1.0) <= 2.0 * eps;
            let off_cap = move |p: HalfPlanePoint| !in_cap(p);
            let mut seams = bdelta_seams(m);
            seams.extend(atlas_seams(m, "", TOL_EXACT, &off_cap));
            for (name, s, t, z) in [("a|d (eps cap)", RegionTag::A, RegionTag::D, 0.0), ("e|d (eps cap)", RegionTag::E, RegionTag::D, 1.0)] {
                seams.push(Seam {
                    name: name.to_string(),
                    tol: TOL_ROOT,
                    gap: Box::new(move |u| {
                        let r = 2.0 * eps * u;
                        if r <= 1e-12 * eps {
                            return None;
                        }
                        Some((|| Ok(dist2(m.eval_in(s, r, z)?, m.eval_in(t, r, z)?)))())
                    }),
                });
            }
            measure(&mut rep, &seams, n, seed);
        }
    }
    rep
}
