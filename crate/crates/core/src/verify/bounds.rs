//! Pointwise checks: Jacobian consistency, determinant bounds, injectivity
//! and the jump of the inverse across the bubble.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Measurement, Relation, VerifyReport};
use crate::dipole::{classify_hp, d_det_closed_form, dist_to_u_hp, g_map, jump_traces, phi_of_z, polar, singular_inverse_norm, DipoleMap, R_DOMAIN};
use crate::energy::AnyMap;
use crate::geom::{planar_jacobian_fd, AxiMap, HalfPlanePoint, PlanarJacobian, RegionTag};
use crate::numerics::quasi_random;
use crate::patch::probe::layer_scaling;
use crate::patch::{bilipschitz_probe, BDeltaMap, Zone};

fn hp(r: f64, x3: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(r, x3)
}

fn min_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NEG_INFINITY } else { a.min(b) })
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

/// Sampling box (r0, r1, z0, z1) of a region of the reference atlas.
fn region_box(tag: RegionTag) -> [f64; 4] {
    match tag {
        RegionTag::A => [0.0, 1.0, -1.0, 0.0],
        RegionTag::B => [0.0, 3.0, -3.0, 0.0],
        RegionTag::D => [0.0, 3.0, 0.0, 1.0],
        RegionTag::E => [0.0, 1.0, 1.0, 2.0],
        RegionTag::F => [0.0, 3.0, 1.0, 4.0],
        _ => [0.0, 4.0, -4.0, 4.0],
    }
}

/// Up to `n` quasi-random points of region `tag` accepted by `keep`.
fn region_points(tag: RegionTag, n: usize, seed: u64, keep: impl Fn(HalfPlanePoint) -> bool + Sync) -> Vec<HalfPlanePoint> {
    let [r0, r1, z0, z1] = region_box(tag);
    let mut pts: Vec<HalfPlanePoint> = quasi_random(40 * n, 2, seed)
        .into_par_iter()
        .map(|u| hp(r0 + (r1 - r0) * u[0], z0 + (z1 - z0) * u[1]))
        .filter(|&p| p.r > 0.0 && p.norm() < R_DOMAIN && classify_hp(p.r, p.x3).ok() == Some(tag) && keep(p))
        .collect();
    pts.truncate(n);
    pts
}

/// At least `d` from the singular sets of v: the axis, both poles, and U
/// outside region a (which U contains, v being smooth there).
fn clear_of_singular(p: HalfPlanePoint, d: f64) -> bool {
    let in_a = classify_hp(p.r, p.x3).ok() == Some(RegionTag::A);
    p.r >= d && p.norm() >= d && p.r.hypot(p.x3 - 1.0) >= d && (in_a || dist_to_u_hp(p.r, p.x3) >= d)
}

fn rel_gap(fd: &PlanarJacobian, ad: &PlanarJacobian) -> f64 {
    let scale = ad.frobenius_sq().sqrt().max(1.0);
    [
        fd.d_rr - ad.d_rr,
        fd.d_r3 - ad.d_r3,
        fd.d_3r - ad.d_3r,
        fd.d_33 - ad.d_33,
        fd.hoop - ad.hoop,
    ]
    .iter()
    .map(|x| x.abs() / scale)
    .fold(0.0, f64::max)
}

/// Forward-mode Jacobians against central differences at `n` points per
/// region, at least 1e-2 from the singular sets; for v also the closed-form
/// determinants of regions e and d.
pub fn check_jacobians(map: &AnyMap, n: usize, seed: u64) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "jacobians",
        "differentiated Jacobians agree with central differences; closed-form determinants of regions e and d",
        map.name(),
    );
    let tol = 1e-5;
    for (k, tag) in RegionTag::DIPOLE.into_iter().enumerate() {
        let pts = region_points(tag, n, seed.wrapping_add(k as u64), |p| clear_of_singular(p, 1e-2));
        let gaps: Vec<f64> = pts
            .par_iter()
            .filter_map(|&p| {
                let fd = planar_jacobian_fd(map, p, None).ok()?;
                Some(match map.jacobian(p) {
                    Ok(ad) => rel_gap(&fd, &ad),
                    Err(_) => f64::INFINITY,
                })
            })
            .collect();
        rep.samples += gaps.len();
        rep.push(Measurement::new(format!("{tag} fd vs dual rel"), max_of(gaps.iter().copied()), Relation::Le, tol));
        rep.push(Measurement::new(format!("{tag} fd samples"), gaps.len() as f64, Relation::Ge, 0.5 * n as f64));
    }
    if matches!(map, AnyMap::V) {
        // region e: (1 + rho)^2 cos^3(phi) / rho^2
        let pts = region_points(RegionTag::E, n, seed ^ 0xe, |p| clear_of_singular(p, 1e-2));
        let e_gap = max_of(pts.par_iter().map(|&p| {
            let (rho, phi) = polar(p.r, p.x3, 1.0);
            let want = (1.0 + rho).powi(2) * phi.cos().powi(3) / (rho * rho);
            let got = DipoleMap.jacobian(p).map(|j| j.det()).unwrap_or(f64::NAN);
            (got - want).abs() / want.abs().max(1e-300)
        }).collect::<Vec<_>>().into_iter());
        rep.push(Measurement::new("e closed-form det rel", e_gap, Relation::Le, tol));
        // region d on the strip where the chart coordinate s is the distance to U
        let pts = region_points(RegionTag::D, n, seed ^ 0xd, |p| {
            clear_of_singular(p, 1e-2) && dist_to_u_hp(p.r, p.x3) <= 1.0 / 3.0
        });
        let ratios: Vec<f64> = pts
            .par_iter()
            .map(|&p| {
                let want = d_det_closed_form(p.r, p.x3).unwrap_or(f64::NAN);
                let got = DipoleMap.jacobian(p).map(|j| j.det()).unwrap_or(f64::NAN);
                got / want
            })
            .collect();
        let d_gap = max_of(ratios.iter().map(|q| (q - 1.0).abs()));
        rep.push(Measurement::new("d literal det s^2 sin(phi)/r rel", d_gap, Relation::Le, tol));
        rep.push(Measurement::info("d det / literal form, min", min_of(ratios.iter().copied())));
        rep.push(Measurement::info("d det / literal form, max", max_of(ratios.iter().copied())));
    }
    rep
}

/// det Dv / (s^2 / r) over region d against sqrt2/2.
pub fn check_v_det_bound(n: usize, seed: u64) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "det_bounds",
        "region-d determinant of v is at least (sqrt2/2) s^2/r",
        "v",
    );
    let pts = region_points(RegionTag::D, n, seed, |p| clear_of_singular(p, 1e-6));
    let ratios: Vec<f64> = pts
        .par_iter()
        .map(|&p| {
            let (s, _) = g_map(p.r, p.x3).unwrap_or((f64::NAN, f64::NAN));
            let det = DipoleMap.jacobian(p).map(|j| j.det()).unwrap_or(f64::NAN);
            det / (s * s / p.r)
        })
        .collect();
    rep.samples = ratios.len();
    rep.push(Measurement::new("min det/(s^2/r)", min_of(ratios.iter().copied()), Relation::Ge, 0.5 * SQRT_2 - 1e-6));
    rep.push(Measurement::info(
        "min sin(phi(z))",
        min_of(pts.iter().map(|p| g_map(p.r, p.x3).map(|(_, z)| phi_of_z(z).sin()).unwrap_or(f64::NAN))),
    ));
    rep
}

fn ball_point(u: &[f64]) -> HalfPlanePoint {
    let rad = R_DOMAIN * u[0].cbrt() * (1.0 - 1e-9);
    let c = 2.0 * u[1] - 1.0;
    hp(rad * (1.0 - c * c).max(0.0).sqrt(), rad * c)
}

/// Layer points of b_delta from a box around the transition shell.
fn layer_points(m: &BDeltaMap, n: usize, seed: u64) -> Vec<HalfPlanePoint> {
    let d = m.delta();
    quasi_random(4 * n, 2, seed)
        .into_par_iter()
        .map(|u| hp(3.0 * u[0], -1.0 - d + (2.0 + 2.0 * d) * u[1]))
        .filter(|p| p.r > 1e-6 && m.zone(p.r, p.x3) == Zone::Layer)
        .collect()
}

/// Positivity of det Db_delta over the ball and along the layer, the layer
/// factor chains, the region-e radial slope and the delta-scaling of the
/// layer minima across the ladder.
pub fn check_det_bounds(deltas: &[f64], n: usize, seed: u64) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "det_bounds",
        "det Db_delta > 0 and the layer determinant chains hold pointwise",
        "bdelta",
    );
    let mut scaled: Vec<Vec<f64>> = vec![Vec::new(); 4];
    let sub = [RegionTag::B, RegionTag::D, RegionTag::E, RegionTag::F];
    for &delta in deltas {
        let m = match BDeltaMap::with_delta(delta) {
            Ok(m) => m,
            Err(e) => {
                rep.fail_with(e);
                return rep;
            }
        };
        let eg = m.u.prof.eg;
        let ball: Vec<f64> = quasi_random(n, 2, seed)
            .par_iter()
            .map(|u| ball_point(u))
            .filter(|p| p.r > 1e-9)
            .map(|p| m.jacobian(p).map(|j| j.det()).unwrap_or(f64::NAN))
            .collect();
        let lay = layer_points(&m, n, seed ^ 0x1a);
        let lay_det: Vec<f64> = lay
            .par_iter()
            .map(|&p| m.jacobian(p).map(|j| j.det()).unwrap_or(f64::NAN))
            .collect();
        rep.samples += ball.len() + lay.len();
        rep.push(Measurement::new(format!("delta={delta} min det (ball, {} pts)", ball.len()), min_of(ball.iter().copied()), Relation::Gt, 0.0));
        rep.push(Measurement::new(format!("delta={delta} min det (layer, {} pts)", lay.len()), min_of(lay_det.iter().copied()), Relation::Gt, 0.0));
        let bounds: Vec<_> = lay.par_iter().filter_map(|&p| m.layer_det_bound(p).ok()).collect();
        for tag in sub {
            let rows: Vec<_> = bounds.iter().filter(|b| b.region == tag).collect();
            let chained: Vec<_> = rows.iter().filter(|b| b.chain).collect();
            let ratio = min_of(chained.iter().map(|b| if b.bound > 0.0 { b.det / b.bound } else { f64::INFINITY }));
            rep.push(Measurement::new(format!("delta={delta} {tag} det/bound min"), ratio, Relation::Ge, 1.0 - 1e-9));
            if chained.len() < rows.len() {
                rep.push(Measurement::info(format!("delta={delta} {tag} points off the chain"), (rows.len() - chained.len()) as f64));
            }
            let fmin = min_of(rows.iter().map(|b| b.factor));
            match tag {
                RegionTag::B => rep.push(Measurement::new(format!("delta={delta} b factor min"), fmin, Relation::Ge, 0.5)),
                RegionTag::F => rep.push(Measurement::new(format!("delta={delta} f factor min"), fmin, Relation::Ge, 1.0 - 12.0 * eg / delta - 1e-15)),
                _ => {}
            }
        }
        // region e: radial slope along rays about (0,1)
        let slopes: Vec<f64> = quasi_random(10_000, 2, seed ^ 0xe5)
            .par_iter()
            .filter_map(|u| {
                let phi = (0.5 * delta).acos() * u[0];
                let lo = 0.5 * delta / phi.cos();
                let hi = (delta / phi.cos()).min(1.0);
                let rho = lo + (hi - lo) * u[1];
                if !(rho > lo && rho < hi) {
                    return None;
                }
                Some(m.e_radial_slope(rho, phi).map(|(fd, b)| fd - b).unwrap_or(f64::NAN))
            })
            .collect();
        rep.push(Measurement::new(format!("delta={delta} e slope - bound min"), min_of(slopes.iter().copied()), Relation::Ge, -1e-6));
        for (k, tag) in sub.into_iter().enumerate() {
            let s = layer_scaling(&m, tag, n.min(50_000), seed ^ (k as u64 + 7));
            rep.push(Measurement::info(format!("delta={delta} {tag} min det / delta^{}", s.power), s.scaled));
            scaled[k].push(s.scaled);
        }
    }
    for (k, tag) in sub.into_iter().enumerate() {
        let xs = &scaled[k];
        let spread = max_of(xs.iter().copied()) / min_of(xs.iter().copied());
        rep.push(Measurement::new(format!("{tag} layer scaling spread"), spread, Relation::Le, 2.0));
    }
    rep
}

/// |A^-1| det A / |A|^2 with Frobenius norms, A^-1 from cofactors.
pub fn inverse_bound_ratio(a: &[[f64; 3]; 3]) -> f64 {
    let c = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
    };
    let det = a[0][0] * c(0, 0) + a[0][1] * c(0, 1) + a[0][2] * c(0, 2);
    let mut inv_sq = 0.0;
    let mut a_sq = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            inv_sq += (c(j, i) / det).powi(2);
            a_sq += a[i][j] * a[i][j];
        }
    }
    inv_sq.sqrt() * det / a_sq
}

/// Sampled pairs of b_delta along the ladder, and the inverse-matrix bound
/// with constant 3 on sampled and on random positive-determinant matrices.
pub fn check_injectivity(deltas: &[f64], pairs: usize, seed: u64) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "injectivity",
        "b_delta is injective with a positive inverse-Lipschitz constant; |J^-1| <= 3|J|^2/det J",
        "bdelta",
    );
    for &delta in deltas {
        let m = match BDeltaMap::with_delta(delta) {
            Ok(m) => m,
            Err(e) => {
                rep.fail_with(e);
                return rep;
            }
        };
        match bilipschitz_probe(&m, pairs, seed) {
            Ok(r) => {
                rep.samples += r.pairs;
                rep.push(Measurement::new(format!("delta={delta} collisions"), 0.0, Relation::Le, 0.0));
                rep.push(Measurement::new(format!("delta={delta} inverse Lipschitz l"), r.l_lower, Relation::Gt, 0.0));
                rep.push(Measurement::info(format!("delta={delta} Lipschitz L"), r.l_upper));
                rep.push(Measurement::new(format!("delta={delta} min det"), r.min_det, Relation::Gt, 0.0));
                rep.push(Measurement::new(
                    format!("delta={delta} max |J^-1| det/|J|^2"),
                    r.max_inverse_ratio,
                    Relation::Le,
                    3.0,
                ));
            }
            Err(e) => {
                rep.push(Measurement::new(format!("delta={delta} collisions"), 1.0, Relation::Le, 0.0));
                rep.error = Some(e.to_string());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 10_000 {
        let b: [[f64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        // B B^T + 0.1 I, then a perturbation
        let mut a = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = (0..3).map(|k| b[i][k] * b[j][k]).sum::<f64>()
                    + if i == j { 0.1 } else { 0.0 }
                    + 0.3 * rng.gen_range(-1.0..1.0);
            }
        }
        let q = inverse_bound_ratio(&a);
        if q.is_finite() && q > 0.0 {
            worst = worst.max(q);
            count += 1;
        }
    }
    rep.push(Measurement::new("random matrices max |A^-1| det/|A|^2", worst, Relation::Le, 3.0));
    rep.push(Measurement::info("sharp constant 1/sqrt3", 1.0 / 3f64.sqrt()));
    rep
}

/// The jump of v^-1 across the bubble: amplitude, total variation and the
/// regions the two traces come from.
pub fn check_jump(nodes: usize) -> VerifyReport {
    let mut rep = VerifyReport::new(
        "jump",
        "the inverse of v jumps by 1 across the bubble; the singular part has mass pi",
        "v",
    );
    let norm = match singular_inverse_norm(nodes) {
        Ok(n) => n,
        Err(e) => {
            rep.fail_with(e);
            return rep;
        }
    };
    rep.samples = nodes;
    rep.push(Measurement::new("|total/pi - 1|", (norm.total / PI - 1.0).abs(), Relation::Le, 5e-3));
    rep.push(Measurement::info("total", norm.total));
    let amp = (norm.amplitude_max - 1.0).abs().max((norm.amplitude_min - 1.0).abs());
    rep.push(Measurement::new("max |amplitude - 1|", amp, Relation::Le, 1e-6));
    rep.push(Measurement::new("inversion residual", norm.max_residual, Relation::Le, 1e-9));
    // the traces sit at the poles 0 and 0'; approach them along the rays
    // that v maps onto the ray through y
    let t = 1e-7;
    let traces = jump_traces(nodes).unwrap_or_default();
    let ray = |tr: &crate::dipole::JumpTrace| {
        let (a, b) = (PI - tr.theta, tr.theta);
        (
            hp(tr.inner.r + t * a.sin(), tr.inner.x3 + t * a.cos()),
            hp(tr.outer.r + t * b.sin(), tr.outer.x3 + t * b.cos()),
        )
    };
    let sides = traces.iter().all(|(tr, _)| {
        let (p, q) = ray(tr);
        classify_hp(p.r, p.x3).ok() == Some(RegionTag::A) && classify_hp(q.r, q.x3).ok() == Some(RegionTag::E)
    });
    rep.push(Measurement::flag("inner traces in a, outer traces in e", sides && !traces.is_empty()));
    let remap = max_of(traces.iter().map(|(tr, _)| {
        let (p, q) = ray(tr);
        match (DipoleMap.eval(p), DipoleMap.eval(q)) {
            (Ok(a), Ok(b)) => (a.r - tr.y.r).hypot(a.x3 - tr.y.x3).max((b.r - tr.y.r).hypot(b.x3 - tr.y.x3)),
            _ => f64::INFINITY,
        }
    }));
    rep.push(Measurement::new("traces re-mapped by v at offset 1e-7", remap, Relation::Le, 1e-6));
    rep
}
