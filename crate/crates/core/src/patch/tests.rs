use super::probe::inverse_ratio;
use super::*;
use crate::numerics::quasi_random;

const LADDER: [f64; 3] = [1.0, 0.5, 0.25];

fn hp(r: f64, x3: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(r, x3)
}

/// Points at distance exactly t from U, from the closed-form level curves.
fn level_set(t: f64, n: usize) -> Vec<HalfPlanePoint> {
    let mut pts = Vec::new();
    for k in 0..=n {
        let u = k as f64 / n as f64;
        let a = 0.5 * PI * u;
        let ph = 0.5 * PI * (1.0 + u);
        pts.push(hp((1.0 + t) * ph.sin(), (1.0 + t) * ph.cos()));
        pts.push(hp(1.0 + t * a.sin(), t * a.cos()));
        pts.push(hp(1.0 + t * a.sin(), 1.0 - t * a.cos()));
        pts.push(hp(1.0 + t * a.sin(), 1.0 + t * a.cos()));
        pts.push(hp(t + (1.0 - t) * u, t));
        pts.push(hp(t + (1.0 - t) * u, 1.0 - t));
        pts.push(hp(t, u));
        pts.push(hp(u, 1.0 + t));
    }
    pts.into_iter()
        .filter(|p| p.r > 1e-9 && (dist_to_u_hp(p.r, p.x3) - t).abs() < 1e-12)
        .collect()
}

fn gap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

#[test]
fn cutoff_examples() {
    let d = 0.4;
    assert_eq!(chi_delta(0.5 * d, d), 1.0);
    assert_eq!(chi_delta(d, d), 0.0);
    assert!((chi_delta(0.75 * d, d) - 0.5).abs() < 1e-15);
    assert_eq!(chi_delta(0.0, d), 1.0);
    assert_eq!(chi_delta(3.0, d), 0.0);
    let h = 1e-6;
    let slope = (chi_delta(0.7 * d + h, d) - chi_delta(0.7 * d - h, d)) / (2.0 * h);
    assert!((slope + 2.0 / d).abs() < 1e-6);
}

#[test]
fn parameters() {
    let p = PatchParams::with_delta(1.0).unwrap();
    assert!((p.eps - (1.0f64 / 16.0).powi(3)).abs() < 1e-18);
    assert!((p.c0 * p.eg() - p.delta).abs() < 1e-14);
    assert!(p.b_radial_slope() > 0.0);
    assert!((p.b_radial_slope() - (1.0 - 2.0 * SQRT_2 / 16.0)).abs() < 1e-12);
    assert!(PatchParams::new(0.5, 1.0 / 3.0, 14.0).is_err());
    assert!(PatchParams::new(1.5, 1.0 / 3.0, 16.0).is_err());
    assert!(PatchParams::new(0.0, 1.0 / 3.0, 16.0).is_err());
}

#[test]
fn assembly_identity() {
    for &delta in &LADDER {
        let m = BDeltaMap::with_delta(delta).unwrap();
        let mut counts = [0usize; 2];
        for u in quasi_random(20000, 2, 7) {
            let p = hp(4.0 * u[0], -4.0 + 8.0 * u[1]);
            if p.norm() > 4.0 || p.r == 0.0 {
                continue;
            }
            let d = dist_to_u_hp(p.r, p.x3);
            let b = m.eval(p).unwrap();
            if d < 0.5 * delta - 1e-12 {
                assert_eq!(b, m.u.eval(p).unwrap());
                counts[0] += 1;
            } else if d > delta + 1e-12 {
                assert_eq!(b, DipoleMap.eval(p).unwrap());
                counts[1] += 1;
            }
        }
        assert!(counts[0] > 100 && counts[1] > 100);
    }
}

#[test]
fn continuous_at_layer_boundaries() {
    for &delta in &LADDER {
        let m = BDeltaMap::with_delta(delta).unwrap();
        let mut worst: f64 = 0.0;
        let mut n = 0;
        for (t, inner) in [(0.5 * delta, true), (delta, false)] {
            for p in level_set(t, 2500) {
                let tag = classify_hp(p.r, p.x3).unwrap();
                if tag == RegionTag::A || tag == RegionTag::Outer {
                    continue;
                }
                let lay = m.layer_in(tag, p.r, p.x3).unwrap();
                let other = if inner {
                    m.u.eval_in(tag, p.r, p.x3).unwrap()
                } else {
                    DipoleMap.eval_in(tag, p.r, p.x3).unwrap()
                };
                worst = worst.max(gap(lay, other));
                n += 1;
            }
        }
        assert!(n > 5000, "{n}");
        assert!(worst <= 1e-9, "delta {delta}: {worst}");
    }
}

#[test]
fn continuous_across_layer_seams() {
    for &delta in &LADDER {
        let m = BDeltaMap::with_delta(delta).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=2000 {
            let t = 0.5 * delta * (1.0 + k as f64 / 2000.0);
            let a = 0.5 * PI * k as f64 / 2000.0;
            let seams = [
                (RegionTag::B, RegionTag::D, hp(1.0 + t, 0.0)),
                (RegionTag::D, RegionTag::F, hp(1.0 + t, 1.0)),
                (RegionTag::E, RegionTag::F, hp(a.sin(), 1.0 + a.cos())),
            ];
            for (s, u, p) in seams {
                if m.zone(p.r, p.x3) != Zone::Layer {
                    continue;
                }
                let x = m.layer_in(s, p.r, p.x3).unwrap();
                let y = m.layer_in(u, p.r, p.x3).unwrap();
                worst = worst.max(gap(x, y));
            }
        }
        assert!(worst <= 1e-9, "delta {delta}: {worst}");
    }
}

#[test]
fn region_b_matches_rescaled_profile_at_inner_boundary() {
    let m = BDeltaMap::with_delta(0.5).unwrap();
    let eg = m.u.prof.eg;
    let s = 0.25;
    let b = m.layer_in(RegionTag::B, 0.0, -1.0 - s).unwrap();
    let want = (0.0, -(s + SQRT_2 * eg) + eg);
    assert!(gap(b, want) < 1e-12);
    let u = m.u.eval_in(RegionTag::B, 0.0, -1.0 - s).unwrap();
    assert!(gap(b, u) < 1e-12);
    // s = delta: both shifts vanish
    let b = m.layer_in(RegionTag::B, 0.0, -1.5).unwrap();
    assert!(gap(b, (0.0, -0.5)) < 1e-15);
}

fn layer_samples(m: &BDeltaMap, n: usize, seed: u64) -> Vec<HalfPlanePoint> {
    let d = m.delta();
    quasi_random(n, 2, seed)
        .into_iter()
        .map(|u| hp((1.0 + d) * u[0], -1.0 - d + (2.0 + 2.0 * d) * u[1]))
        .filter(|p| p.r > 1e-6 && m.zone(p.r, p.x3) == Zone::Layer)
        .collect()
}

#[test]
fn layer_determinants_dominate_bounds() {
    for &delta in &LADDER {
        let m = BDeltaMap::with_delta(delta).unwrap();
        let pts = layer_samples(&m, 40000, 11);
        assert!(pts.len() > 3000);
        let mut seen = [false; 4];
        for p in pts {
            let b = m.layer_det_bound(p).unwrap();
            assert!(b.det > 0.0, "{p:?} {b:?}");
            assert!(!b.chain || b.bound > 0.0, "{p:?} {b:?}");
            assert!(b.chain || delta > 1.0 / 3.0);
            assert!(b.det >= b.bound * (1.0 - 1e-9), "{p:?} {b:?}");
            let i = match b.region {
                RegionTag::B => {
                    assert!(b.factor >= 0.5);
                    assert!((b.det - b.bound).abs() <= 1e-9 * b.det);
                    0
                }
                RegionTag::D => 1,
                RegionTag::E => 2,
                _ => 3,
            };
            seen[i] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}

#[test]
fn region_d_hoop_ratio_bounds() {
    for &delta in &LADDER {
        let m = BDeltaMap::with_delta(delta).unwrap();
        for p in layer_samples(&m, 20000, 3) {
            if classify_hp(p.r, p.x3).unwrap() != RegionTag::D {
                continue;
            }
            let (lo, mid, hi) = m.d_hoop_bounds(p).unwrap();
            assert!(lo <= mid + 1e-14 && mid <= hi, "{p:?} {lo} {mid} {hi}");
        }
    }
}

#[test]
fn region_e_radial_profile_increasing() {
    for &delta in &LADDER {
        let m = BDeltaMap::with_delta(delta).unwrap();
        for k in 0..1000 {
            let u = (k as f64 + 0.5) / 1000.0;
            // phi with cos(phi) above delta/2 reaches the layer for rho <= 1
            let phi = (0.5 * delta).acos() * u;
            let rho_lo = 0.5 * delta / phi.cos();
            let rho_hi = (delta / phi.cos()).min(1.0);
            for j in 1..4 {
                let rho = rho_lo + (rho_hi - rho_lo) * j as f64 / 4.0;
                let (fd, bound) = m.e_radial_slope(rho, phi).unwrap();
                assert!(fd > 0.0 && fd >= bound - 1e-6, "{rho} {phi} {fd} {bound}");
            }
        }
    }
}

#[test]
fn inverse_bound_constant() {
    let m = BDeltaMap::with_delta(0.5).unwrap();
    for p in layer_samples(&m, 5000, 5) {
        let j = m.jacobian(p).unwrap();
        let q = inverse_ratio(&j);
        assert!(q <= 1.0 / 3f64.sqrt() + 1e-12, "{q}");
    }
}

#[test]
fn jacobian_matches_differences_in_layer() {
    let m = BDeltaMap::with_delta(0.5).unwrap();
    let mut checked = 0;
    for p in layer_samples(&m, 4000, 9) {
        let Ok(fd) = crate::geom::planar_jacobian_fd(&m, p, Some(1e-7)) else { continue };
        let ad = m.jacobian(p).unwrap();
        let scale = ad.frobenius_sq().sqrt();
        for (x, y) in [(fd.d_rr, ad.d_rr), (fd.d_r3, ad.d_r3), (fd.d_3r, ad.d_3r), (fd.d_33, ad.d_33)] {
            assert!((x - y).abs() <= 1e-5 * scale, "{p:?} {fd:?} {ad:?}");
        }
        checked += 1;
    }
    assert!(checked > 300);
}

#[test]
fn probe_reports_positive_constants() {
    let m = BDeltaMap::with_delta(0.5).unwrap();
    let rep = bilipschitz_probe(&m, 2000, 1).unwrap();
    assert!(rep.l_lower > 0.0 && rep.l_upper.is_finite());
    assert!(rep.min_det > 0.0);
    assert!(rep.max_inverse_ratio <= 3.0);
    for l in &rep.layers {
        assert!(l.samples > 100 && l.min_det > 0.0, "{l:?}");
    }
}

#[test]
fn section_csv_has_full_precision() {
    let m = BDeltaMap::with_delta(0.5).unwrap();
    let rows = meridian_sections(&m, 4, 20).unwrap();
    let csv = sections_csv(&rows);
    let line = csv.lines().nth(1).unwrap();
    let x1: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(x1, rows[0].x1);
}
