use super::*;
use crate::dipole::DipoleMap;
use crate::geom::planar_jacobian_fd;

const LADDER: [f64; 4] = [1e-1, 3e-2, 1e-2, 3e-3];

fn map(eps: f64) -> UEpsMap {
    UEpsMap::new(eps, 1.0 / 3.0).unwrap()
}

fn both(m: &UEpsMap, a: EpsPart, b: EpsPart, r: f64, x3: f64) -> f64 {
    let p = m.eval_part(a, r, x3).unwrap();
    let q = m.eval_part(b, r, x3).unwrap();
    (p.0 - q.0).hypot(p.1 - q.1)
}

fn interface_gaps(m: &UEpsMap, n: usize) -> Vec<(&'static str, f64)> {
    use EpsPart::*;
    let eps = m.eps();
    let mut out = Vec::new();
    let mut worst = |name: &'static str, pts: Vec<(EpsPart, EpsPart, f64, f64)>| {
        let w = pts
            .into_iter()
            .map(|(a, b, r, z)| both(m, a, b, r, z))
            .fold(0.0, f64::max);
        out.push((name, w));
    };
    let t = |k: usize| k as f64 / n as f64;
    let q = |k: usize| 0.5 * PI * t(k);
    worst("a|b", (0..=n).map(|k| (A, B, q(k).sin(), -q(k).cos())).collect());
    worst("a|d", (1..n).map(|k| (A, D, eps + (1.0 - eps) * t(k), 0.0)).collect());
    worst("a'|a", (0..=n).map(|k| (ACore, A, eps * q(k).sin(), -eps * q(k).cos())).collect());
    worst("a'|tube", (1..n).map(|k| (ACore, Tube, eps * t(k), 0.0)).collect());
    worst("tube|d", (1..n).map(|k| (Tube, D, eps, t(k))).collect());
    worst("tube|e'", (1..n).map(|k| (Tube, ECore, eps * t(k), 1.0)).collect());
    worst("e'|e", (0..=n).map(|k| (ECore, E, eps * q(k).sin(), 1.0 + eps * q(k).cos())).collect());
    worst("e|d", (1..n).map(|k| (E, D, eps + (1.0 - eps) * t(k), 1.0)).collect());
    worst("e|f", (0..=n).map(|k| (E, F, q(k).sin(), 1.0 + q(k).cos())).collect());
    worst("d|f", (0..=n).map(|k| (D, F, 1.0 + (8f64.sqrt() - 1.0) * t(k), 1.0)).collect());
    worst("d|b", (0..=n).map(|k| (D, B, 1.0 + 2.0 * t(k), 0.0)).collect());
    worst(
        "b|bpsi",
        (0..=n)
            .map(|k| {
                let rho = 1.0 + SQRT_2 * m.prof.eg;
                (B, BPsi, rho * q(k).sin(), -rho * q(k).cos())
            })
            .collect(),
    );
    let outer: Vec<_> = (0..=n)
        .map(|k| {
            let b = PI * t(k);
            let (r, z) = (3.0 * b.sin(), 3.0 * b.cos());
            (m.part(HalfPlanePoint::new(r, z)).unwrap(), Outer, r, z)
        })
        .collect();
    worst("core|outer", outer);
    out
}

#[test]
fn interfaces_match_across_ladder() {
    for eps in LADDER {
        let m = map(eps);
        for (name, w) in interface_gaps(&m, 400) {
            assert!(w <= 1e-9, "eps={eps} {name}: {w}");
        }
    }
}

#[test]
fn pinned_traces() {
    let m = map(1e-2);
    let eg = m.prof.eg;
    // interface with f at r >= 1
    for r in [1.0, 1.5, 2.5] {
        let y = m.eval(HalfPlanePoint::new(r, 1.0)).unwrap();
        assert!((y.r - (r - 1.0 + 6.0 * eg)).abs() < 1e-12 && y.x3.abs() < 1e-12);
    }
    // d_eps / b trace: eps^gamma e_r + (r-1)(e_r - e3)/sqrt 2
    for r in [1.0, 1.7, 3.0] {
        let y = m.eval_part(EpsPart::D, r, 0.0).unwrap();
        let want = (eg + (r - 1.0) / SQRT_2, -(r - 1.0) / SQRT_2);
        assert!((y.0 - want.0).hypot(y.1 - want.1) < 1e-12);
    }
    // region f along the axis
    let y = m.eval(HalfPlanePoint::new(0.0, 3.0)).unwrap();
    assert!(y.r.abs() < 1e-12 && (y.x3 - (3.0 + 6.0 * eg)).abs() < 1e-12);
}

#[test]
fn top_of_slab_uses_rescaled_weights() {
    let m = map(1e-2);
    let p = &m.prof;
    for k in 1..20 {
        let r = p.eps + (1.0 - p.eps) * k as f64 / 20.0;
        let y = m.eval_part(EpsPart::D, r, 1.0).unwrap();
        let w = p.r_hat(r);
        assert!((y.0 - ((1.0 - w) * p.eta + w * 6.0 * p.eg)).abs() < 1e-12);
        // the linear weights differ from the slab trace by O(eps * eps^gamma)
        let lin = p.u_rho_e_linear(r, PI / 2.0);
        assert!((lin - y.0).abs() < 10.0 * p.eps * p.eg);
    }
}

#[test]
fn tube_opening_radius_bounds() {
    let m = map(1e-2);
    for k in 0..=10 {
        let x3 = k as f64 / 10.0;
        let w = m.tube_opening_radius(x3).unwrap();
        assert!(w >= 2.0 * m.prof.eg - 1e-14 && w <= m.prof.eta + 1e-14);
    }
}

#[test]
fn dual_jacobian_matches_differences() {
    for eps in [1e-1, 1e-2] {
        let m = map(eps);
        let mut checked = 0;
        let mut probe = |r: f64, x3: f64, h: f64| {
            let p = HalfPlanePoint::new(r, x3);
            let Ok(fd) = planar_jacobian_fd(&m, p, Some(h)) else { return };
            let ad = m.jacobian(p).unwrap();
            let scale = ad.frobenius_sq().sqrt().max(1.0);
            for (x, y) in [
                (fd.d_rr, ad.d_rr),
                (fd.d_r3, ad.d_r3),
                (fd.d_3r, ad.d_3r),
                (fd.d_33, ad.d_33),
                (fd.hoop, ad.hoop),
            ] {
                assert!((x - y).abs() <= 1e-4 * scale, "eps={eps} {p:?} {fd:?} {ad:?}");
            }
            checked += 1;
        };
        let n = 40;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = ((i as f64 + 0.37) / n as f64, (j as f64 + 0.61) / n as f64);
                probe(3.9 * a, -3.9 + 7.8 * b, 1e-6);
                // eps-scale core
                probe(eps * a, -eps + (1.0 + 2.0 * eps) * b, 1e-4 * eps * eps);
                probe(eps * a * 1.5, 1.0 + eps * (b - 0.5), 1e-4 * eps * eps);
            }
        }
        assert!(checked > 2000, "{checked}");
    }
}

#[test]
fn determinant_positive_on_samples() {
    use crate::numerics::quasi_random;
    for eps in LADDER {
        let m = map(eps);
        let pts = quasi_random(20000, 2, 7);
        for u in &pts {
            // half global, half concentrated in the eps-core
            for p in [
                HalfPlanePoint::new(4.0 * u[0], -4.0 + 8.0 * u[1]),
                HalfPlanePoint::new(2.0 * eps * u[0], -2.0 * eps + (1.0 + 4.0 * eps) * u[1]),
            ] {
                if p.norm() >= 4.0 || p.r == 0.0 {
                    continue;
                }
                // for 6 eps^gamma >= 1 the trace on |x| = 3 leaves B(0,4)
                // and no radial extension can preserve orientation
                if p.norm() > R_CORE && 6.0 * m.prof.eg >= 1.0 {
                    continue;
                }
                let d = m.jacobian(p).unwrap().det();
                assert!(d > 0.0 && d.is_finite(), "eps={eps} {p:?} {d}");
            }
        }
    }
}

#[test]
fn core_is_volume_preserving() {
    let m = map(1e-2);
    for &(r, x3) in &[(3e-3, 0.4), (1e-4, 0.9), (5e-3, 1.004), (2e-3, -0.006), (9e-3, 0.5)] {
        let d = m.jacobian(HalfPlanePoint::new(r, x3)).unwrap().det();
        assert!((d - 1.0).abs() < 1e-8, "{r} {x3} {d}");
    }
}

#[test]
fn identity_on_outer_sphere_and_close_to_v_far_away() {
    let m = map(3e-3);
    for k in 0..=20 {
        let b = PI * k as f64 / 20.0;
        let p = HalfPlanePoint::new(4.0 * b.sin(), 4.0 * b.cos());
        let y = m.eval(p).unwrap();
        assert!((y.r - p.r).hypot(y.x3 - p.x3) < 1e-12);
    }
    let p = HalfPlanePoint::new(1.2, 2.0);
    let (a, b) = (m.eval(p).unwrap(), DipoleMap.eval(p).unwrap());
    assert!((a.r - b.r).hypot(a.x3 - b.x3) < 7.0 * m.prof.eg);
}

#[test]
fn annulus_folds_when_the_shift_exceeds_the_gap() {
    let m = map(1e-1);
    let y = m.eval(HalfPlanePoint::new(0.0, 3.0)).unwrap();
    assert!(y.x3 > 4.0);
    let d = m.jacobian(HalfPlanePoint::new(1e-3, 3.5)).unwrap().det();
    assert!(d < 0.0);
}
