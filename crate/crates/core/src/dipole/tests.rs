use super::*;
use crate::geom::{planar_jacobian_fd, on_axis_limit};

fn img(p: Point3) -> Point3 {
    v_eval(p).unwrap()
}

fn near(a: Point3, b: Point3, tol: f64) -> bool {
    a.dist(&b) < tol
}

#[test]
fn distance_examples() {
    assert!((dist_to_u(Point3::new(0.0, 0.0, -2.0)) - 1.0).abs() < 1e-15);
    assert_eq!(dist_to_u(Point3::new(0.0, 0.0, 0.5)), 0.0);
    assert!((dist_to_u(Point3::new(2.0, 0.0, 0.5)) - 1.25f64.sqrt()).abs() < 1e-15);
}

#[test]
fn distance_against_sampled_u() {
    // brute force over a dense sampling of the meridian section of U
    let mut pts = Vec::new();
    let n = 400;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        pts.push((0.0, t));
        pts.push((t, 1.0));
        pts.push((t, 0.0));
        let a = 0.5 * PI * t;
        pts.push((a.sin(), -a.cos()));
    }
    for &(r, x3) in &[(2.0, 0.5), (0.4, 0.7), (1.5, -0.8), (0.3, 2.2), (2.5, 1.9), (0.2, -1.4)] {
        let bf = pts
            .iter()
            .map(|&(a, b)| (r - a).hypot(x3 - b))
            .fold(f64::INFINITY, f64::min);
        assert!((dist_to_u_hp(r, x3) - bf).abs() < 5e-3, "{r} {x3}");
    }
}

#[test]
fn classify_examples() {
    assert_eq!(classify(Point3::new(0.0, 0.0, -0.5)).unwrap(), RegionTag::A);
    assert_eq!(classify(Point3::new(0.0, 0.0, 1.5)).unwrap(), RegionTag::E);
    assert_eq!(classify(Point3::new(0.5, 0.0, 0.5)).unwrap(), RegionTag::D);
    assert_eq!(classify(Point3::new(0.0, 0.0, -2.0)).unwrap(), RegionTag::B);
    assert_eq!(classify(Point3::new(1.5, 0.0, 2.0)).unwrap(), RegionTag::F);
    assert_eq!(classify(Point3::new(0.0, 3.5, 0.0)).unwrap(), RegionTag::Outer);
    assert!(classify(Point3::new(0.0, 4.5, 0.0)).is_err());
    // closure tie-breaks
    assert_eq!(classify_hp(0.5, 0.0).unwrap(), RegionTag::A);
    assert_eq!(classify_hp(0.5, 1.0).unwrap(), RegionTag::E);
    assert_eq!(classify_hp(2.0, 0.0).unwrap(), RegionTag::D);
}

#[test]
fn evaluation_examples() {
    assert!(near(img(Point3::new(0.0, 0.0, -2.0)), Point3::new(0.0, 0.0, -1.0), 1e-14));
    assert!(near(img(Point3::new(0.0, 0.0, 1.5)), Point3::new(0.0, 0.0, 1.5), 1e-14));
    assert!(near(img(Point3::new(0.0, 0.0, -0.5)), Point3::new(0.0, 0.0, 0.5), 1e-14));
}

#[test]
fn outer_extension_examples() {
    for &(r, x3) in &[(4.0, 0.0), (0.0, 4.0), (0.0, -4.0), (2.0, 12f64.sqrt())] {
        let q = DipoleMap.eval(HalfPlanePoint::new(r, x3)).unwrap();
        assert!((q.r - r).abs() < 1e-12 && (q.x3 - x3).abs() < 1e-12);
    }
    let q = DipoleMap
        .eval_in(RegionTag::Outer, 0.0, -3.0)
        .unwrap();
    assert!((q.0).abs() < 1e-12 && (q.1 + 2.0).abs() < 1e-12);
    let j = DipoleMap.jacobian(HalfPlanePoint::new(2.0, -12.25f64.sqrt() + 0.5)).unwrap();
    assert!(j.det() > 0.0);
}

fn interface_samples() -> Vec<(RegionTag, RegionTag, HalfPlanePoint)> {
    let n = 2000;
    let mut v = Vec::new();
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let a = 0.5 * PI * t;
        v.push((RegionTag::A, RegionTag::B, HalfPlanePoint::new(a.sin(), -a.cos())));
        // the poles 0 and 0' are the cavitation points, excluded
        if k > 0 {
            v.push((RegionTag::A, RegionTag::D, HalfPlanePoint::new(t, 0.0)));
            v.push((RegionTag::E, RegionTag::D, HalfPlanePoint::new(t, 1.0)));
        }
        v.push((RegionTag::B, RegionTag::D, HalfPlanePoint::new(1.0 + 2.0 * t, 0.0)));
        v.push((RegionTag::F, RegionTag::D, HalfPlanePoint::new(1.0 + (8f64.sqrt() - 1.0) * t, 1.0)));
        v.push((RegionTag::E, RegionTag::F, HalfPlanePoint::new(a.sin(), 1.0 + a.cos())));
        let b = PI * t;
        let p3 = HalfPlanePoint::new(3.0 * b.sin(), 3.0 * b.cos());
        let inner = classify_hp(p3.r, p3.x3).unwrap();
        v.push((inner, RegionTag::Outer, p3));
    }
    v
}

#[test]
fn interfaces_match() {
    let mut worst: f64 = 0.0;
    for (s, t, p) in interface_samples() {
        let a = DipoleMap.eval_in(s, p.r, p.x3).unwrap();
        let b = DipoleMap.eval_in(t, p.r, p.x3).unwrap();
        worst = worst.max((a.0 - b.0).hypot(a.1 - b.1));
    }
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn dual_jacobian_matches_differences() {
    let n = 60;
    let mut checked = 0;
    for i in 0..n {
        for j in 0..n {
            let r = 4.0 * (i as f64 + 0.37) / n as f64;
            let x3 = -4.0 + 8.0 * (j as f64 + 0.61) / n as f64;
            let p = HalfPlanePoint::new(r, x3);
            if p.norm() > 3.95 || dist_to_u_hp(r, x3) < 1e-2 || r.hypot(x3 - 1.0) < 1e-2 {
                continue;
            }
            let Ok(fd) = planar_jacobian_fd(&DipoleMap, p, None) else { continue };
            let ad = DipoleMap.jacobian(p).unwrap();
            let scale = ad.frobenius_sq().sqrt().max(1.0);
            for (x, y) in [
                (fd.d_rr, ad.d_rr),
                (fd.d_r3, ad.d_r3),
                (fd.d_3r, ad.d_3r),
                (fd.d_33, ad.d_33),
                (fd.hoop, ad.hoop),
            ] {
                assert!((x - y).abs() <= 1e-5 * scale, "{p:?} {fd:?} {ad:?}");
            }
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn closed_form_determinants() {
    let e = v_det(HalfPlanePoint::new(0.0 + 1e-9, 1.5)).unwrap();
    assert!((e - 9.0).abs() < 1e-6);
    for &(r, x3) in &[(0.3, -0.4), (1.5, -1.0), (0.2, 1.5), (1.2, 2.0), (0.6, 0.2), (2.0, 0.6), (0.15, 0.5)] {
        let p = HalfPlanePoint::new(r, x3);
        let want = v_det(p).unwrap();
        let got = DipoleMap.jacobian(p).unwrap().det();
        assert!((want - got).abs() <= 1e-12 * want.abs().max(1.0), "{p:?} {want} {got}");
    }
}

#[test]
fn region_d_literal_form_lacks_chart_factor() {
    // On the pinned line x3 = 0 the literal form evaluates to s^2 sin(pi/4)/r.
    let lit = d_det_closed_form(1.5, 0.0).unwrap();
    assert!((lit - 0.25 * (PI / 4.0).sin() / 1.5).abs() < 1e-15);
    let fd = planar_jacobian_fd(&DipoleMap, HalfPlanePoint::new(1.5, 1e-3), None)
        .unwrap()
        .det();
    let chart = d_det_with_chart(1.5, 1e-3).unwrap();
    assert!((fd - chart).abs() < 1e-6 * chart);
    let ratio = chart / d_det_closed_form(1.5, 1e-3).unwrap();
    let jg = gmap::g_jacobian_det(1.5, 1e-3).unwrap();
    assert!((ratio - PI / 12.0 * jg).abs() < 1e-12);
}

#[test]
fn images_on_the_right_side_of_the_bubble() {
    for i in 1..40 {
        for j in 1..40 {
            let rho = i as f64 / 40.0;
            let phi = 0.5 * PI * j as f64 / 40.0;
            let ya = DipoleMap.eval(HalfPlanePoint::new(rho * phi.sin(), -rho * phi.cos())).unwrap();
            assert!(bubble_side(ya) <= 1e-9);
            let ye = DipoleMap.eval(HalfPlanePoint::new(rho * phi.sin(), 1.0 + rho * phi.cos())).unwrap();
            assert!(bubble_side(ye) >= -1e-9);
        }
    }
}

#[test]
fn determinant_positive_on_grid() {
    let n = 120;
    for i in 0..n {
        for j in 0..n {
            let r = 4.0 * (i as f64 + 0.5) / n as f64;
            let x3 = -4.0 + 8.0 * (j as f64 + 0.5) / n as f64;
            let p = HalfPlanePoint::new(r, x3);
            if p.norm() >= 4.0 {
                continue;
            }
            let d = DipoleMap.jacobian(p).unwrap().det();
            assert!(d > 0.0, "{p:?} {d}");
        }
    }
}

#[test]
fn axis_limit_on_segment() {
    let j = on_axis_limit(&DipoleMap, 0.5).unwrap();
    assert!(j.hoop > 0.0 && j.hoop.is_finite());
    let small = DipoleMap.jacobian(HalfPlanePoint::new(1e-6, 0.5)).unwrap().det();
    assert!(small < 1e-5);
}

#[test]
fn atlas_covers_every_region() {
    let rows = atlas(200);
    for t in RegionTag::DIPOLE {
        assert!(rows.iter().any(|r| r.region == t), "{t}");
    }
}
