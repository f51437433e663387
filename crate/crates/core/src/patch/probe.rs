//! Sampling probes of b_delta: Lipschitz ratios over point pairs, sampled
//! determinants, the inverse-matrix bound, and meridian section export.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{BDeltaMap, Zone};
use crate::dipole::{classify_hp, dist_to_u_hp, R_DOMAIN};
use crate::error::{Error, Result};
use crate::geom::{AxiMap, HalfPlanePoint, PlanarJacobian, Point3, RegionTag};
use crate::numerics::quasi_random;

/// min det over a layer sub-region, rescaled by delta^power.
#[derive(Clone, Debug, Serialize)]
pub struct LayerScaling {
    pub region: RegionTag,
    pub power: i32,
    pub samples: usize,
    pub min_det: f64,
    pub scaled: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BiLipReport {
    pub delta: f64,
    pub pairs: usize,
    pub l_upper: f64,
    pub l_lower: f64,
    pub min_det: f64,
    /// max over sampled Jacobians of |J^-1| det J / |J|^2 (Frobenius norms)
    pub max_inverse_ratio: f64,
    pub jacobians: usize,
    pub layers: Vec<LayerScaling>,
}

fn ball_point(u: &[f64]) -> Point3 {
    let rad = R_DOMAIN * u[0].cbrt() * (1.0 - 1e-9);
    let c = 2.0 * u[1] - 1.0;
    let s = (1.0 - c * c).max(0.0).sqrt();
    let az = 2.0 * PI * u[2];
    Point3::new(rad * s * az.cos(), rad * s * az.sin(), rad * c)
}

/// |J^-1| det J / |J|^2 for the block Jacobian (meridian 2x2, hoop).
pub fn inverse_ratio(j: &PlanarJacobian) -> f64 {
    let m = j.meridian_det();
    let mer_sq = j.d_rr * j.d_rr + j.d_r3 * j.d_r3 + j.d_3r * j.d_3r + j.d_33 * j.d_33;
    let inv = (mer_sq / (m * m) + 1.0 / (j.hoop * j.hoop)).sqrt();
    inv * j.det() / j.frobenius_sq()
}

fn sampled_jacobian(map: &BDeltaMap, p: Point3) -> Option<PlanarJacobian> {
    let (hp, _) = p.to_halfplane();
    if hp.r < 1e-9 {
        return None;
    }
    map.jacobian(hp).ok().filter(|j| j.is_finite())
}

/// Sub-layer sampling box in (r, x3) per region and the expected power of
/// delta in the determinant lower bound.
fn layer_box(tag: RegionTag, delta: f64) -> ([f64; 4], i32) {
    match tag {
        RegionTag::B => ([0.0, 1.0 + delta, -1.0 - delta, 0.0], 2),
        RegionTag::D => ([0.0, 3.0, 0.0, 1.0], 2),
        RegionTag::E => ([0.0, 1.0, 1.0, 1.0 + delta], 3),
        _ => ([1.0, 1.0 + delta, 1.0, 1.0 + delta], 2),
    }
}

pub fn layer_scaling(map: &BDeltaMap, tag: RegionTag, n: usize, seed: u64) -> LayerScaling {
    let delta = map.delta();
    let ([r0, r1, z0, z1], power) = layer_box(tag, delta);
    let pts = quasi_random(n, 2, seed);
    let dets: Vec<f64> = pts
        .par_iter()
        .filter_map(|u| {
            let p = HalfPlanePoint::new(r0 + (r1 - r0) * u[0], z0 + (z1 - z0) * u[1]);
            if p.r <= 0.0 || classify_hp(p.r, p.x3).ok() != Some(tag) {
                return None;
            }
            if map.zone(p.r, p.x3) != Zone::Layer {
                return None;
            }
            map.jacobian(p).ok().map(|j| j.det())
        })
        .collect();
    let min_det = dets.iter().copied().fold(f64::INFINITY, f64::min);
    LayerScaling {
        region: tag,
        power,
        samples: dets.len(),
        min_det,
        scaled: min_det / delta.powi(power),
    }
}

/// Quasi-random pairs in B(0,4): even pairs are independent points, odd pairs
/// are perturbations at scale 1e-3 of the first point.
pub fn bilipschitz_probe(map: &BDeltaMap, n_pairs: usize, seed: u64) -> Result<BiLipReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidParams("n_pairs must be positive".into()));
    }
    let u = quasi_random(2 * n_pairs, 3, seed);
    let pairs: Vec<(Point3, Point3)> = (0..n_pairs)
        .map(|k| {
            let x = ball_point(&u[2 * k]);
            let y = if k % 2 == 0 {
                ball_point(&u[2 * k + 1])
            } else {
                let w = &u[2 * k + 1];
                let d = ball_point(&[1.0, w[1], w[2]]);
                let h = 1e-3 * (0.1 + w[0]) / R_DOMAIN;
                let y = Point3::new(x.x1 + h * d.x1, x.x2 + h * d.x2, x.x3 + h * d.x3);
                if y.norm() < R_DOMAIN { y } else { Point3::new(x.x1 - h * d.x1, x.x2 - h * d.x2, x.x3 - h * d.x3) }
            };
            (x, y)
        })
        .collect();
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|(x, y)| -> Result<f64> {
            let (bx, by) = (map.eval3(*x)?, map.eval3(*y)?);
            let dx = x.dist(y);
            let db = bx.dist(&by);
            if dx > 0.0 && db < 1e-12 {
                return Err(Error::CollisionDetected {
                    a: x.as_array(),
                    b: y.as_array(),
                });
            }
            Ok(db / dx)
        })
        .collect::<Result<_>>()?;
    let jac: Vec<(f64, f64)> = pairs
        .par_iter()
        .flat_map_iter(|(x, y)| [*x, *y])
        .filter_map(|p| sampled_jacobian(map, p).map(|j| (j.det(), inverse_ratio(&j))))
        .collect();
    let layers = [RegionTag::B, RegionTag::D, RegionTag::E, RegionTag::F]
        .iter()
        .map(|&t| layer_scaling(map, t, (n_pairs / 2).max(4000), seed ^ 0x5eed))
        .collect();
    Ok(BiLipReport {
        delta: map.delta(),
        pairs: n_pairs,
        l_upper: ratios.iter().copied().fold(0.0, f64::max),
        l_lower: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        min_det: jac.iter().map(|j| j.0).fold(f64::INFINITY, f64::min),
        max_inverse_ratio: jac.iter().map(|j| j.1).fold(0.0, f64::max),
        jacobians: jac.len(),
        layers,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionRow {
    pub line: usize,
    /// "h" for x3 = const, "v" for x1 = const
    pub family: &'static str,
    pub x1: f64,
    pub x3: f64,
    pub y1: f64,
    pub y3: f64,
    pub region: RegionTag,
    pub dist: f64,
}

/// Reference grid lines of the section x2 = 0 and their images.
pub fn meridian_sections<M: AxiMap>(map: &M, n_lines: usize, n_pts: usize) -> Result<Vec<SectionRow>> {
    let mut rows = Vec::new();
    let lim = R_DOMAIN * (1.0 - 1e-9);
    for line in 0..n_lines {
        let c = -lim + 2.0 * lim * (line as f64 + 0.5) / n_lines as f64;
        for k in 0..=n_pts {
            let t = -lim + 2.0 * lim * k as f64 / n_pts as f64;
            for (family, x1, x3) in [("h", t, c), ("v", c, t)] {
                if x1.hypot(x3) > lim || x1 == 0.0 {
                    continue;
                }
                let img = map.eval(HalfPlanePoint::new(x1.abs(), x3))?;
                rows.push(SectionRow {
                    line,
                    family,
                    x1,
                    x3,
                    y1: img.r.copysign(x1),
                    y3: img.x3,
                    region: map.tag(HalfPlanePoint::new(x1.abs(), x3))?,
                    dist: dist_to_u_hp(x1.abs(), x3),
                });
            }
        }
    }
    Ok(rows)
}

pub fn sections_csv(rows: &[SectionRow]) -> String {
    let mut out = String::from("line,family,x1,x3,y1,y3,region,dist\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
            r.line, r.family, r.x1, r.x3, r.y1, r.y3, r.region, r.dist
        ));
    }
    out
}
