//! The planar chart psi used in region b.
//!
//! Source: the annular sector sqrt(2) <= |q - (0,1)| <= sqrt(8) between the
//! half-line r = 1 - x3 and the axis. Target: the unit ball together with
//! the part of {x3 <= 0, r <= 1 - x3} inside the same outer circle. The
//! source is star-shaped about the axis point O = (0, Z0), the target about
//! the origin. Rays from O are sent to rays from the origin; the far
//! boundaries correspond (sqrt(2)-arc to unit quarter circle, half-line and
//! outer arc pointwise fixed) and radii are rescaled linearly.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::geom::HalfPlanePoint;
use crate::scalar::Real;

const R_IN: f64 = SQRT_2;
const R_OUT: f64 = 2.0 * SQRT_2;
/// Star centre of the source; any value in (1 - sqrt 8, -1) works.
pub const Z0: f64 = -1.4;
const TOL: f64 = 1e-12;

fn theta_k() -> f64 {
    1f64.atan2(-Z0)
}

fn theta_p2() -> f64 {
    2f64.atan2(-1.0 - Z0)
}

/// Which part of the far boundary the ray from O at angle `ts` reaches:
/// 0 arc, 1 half-line, 2 outer arc.
pub fn far_piece(ts: f64) -> u32 {
    if ts <= theta_k() {
        0
    } else if ts <= theta_p2() {
        1
    } else {
        2
    }
}

/// Distance from O to the circle of radius `rad` about (0,1) along the ray
/// at angle `ts`; `near` selects the first crossing.
fn ray_circle<T: Real>(ts: T, rad: f64, near: bool) -> T {
    let b = T::cst(Z0 - 1.0) * ts.cos();
    let disc = (b * b - T::cst((Z0 - 1.0).powi(2) - rad * rad)).sqrt();
    if near {
        -b - disc
    } else {
        -b + disc
    }
}

/// psi on the source sector in meridian coordinates.
pub fn psi_map<T: Real>(r: T, x3: T) -> (T, T) {
    let one = T::cst(1.0);
    let rc = r.hypot(x3 - one);
    if rc.value() >= R_OUT {
        return (r, x3);
    }
    let dz = x3 - T::cst(Z0);
    let rho_s = r.hypot(dz);
    let ts = r.atan2(dz);
    let (len_s, th_o, len_o) = match far_piece(ts.value()) {
        0 => {
            let t = ray_circle(ts, R_IN, true);
            let (pr, pz) = (t * ts.sin(), T::cst(Z0) + t * ts.cos());
            let phibar = pr.atan2(pz - one);
            (t, (T::cst(PI) - phibar) * T::cst(2.0), one)
        }
        k => {
            let t = if k == 1 {
                T::cst(1.0 - Z0) / (ts.sin() + ts.cos())
            } else {
                ray_circle(ts, R_OUT, false)
            };
            let (pr, pz) = (t * ts.sin(), T::cst(Z0) + t * ts.cos());
            (t, pr.atan2(pz), pr.hypot(pz))
        }
    };
    let rho_o = rho_s * len_o / len_s;
    (rho_o * th_o.sin(), rho_o * th_o.cos())
}

/// psi written in polar coordinates (radius, angle) about (0, 1).
pub fn psi_polar<T: Real>(rad: T, ang: T) -> (T, T) {
    psi_map(rad * ang.sin(), T::cst(1.0) + rad * ang.cos())
}

/// Whether q lies in the domain of psi: outside the disk of radius sqrt(2)
/// about (0,1), below x3 = 0 and left of the half-line r = 1 + |x3|.
pub fn psi_domain(q: HalfPlanePoint) -> bool {
    q.r >= -TOL
        && q.x3 <= TOL
        && q.r <= 1.0 - q.x3 + TOL
        && q.r.hypot(q.x3 - 1.0) >= R_IN - TOL
}

pub fn psi_eval(q: HalfPlanePoint) -> Result<HalfPlanePoint> {
    if !psi_domain(q) {
        return Err(Error::OutsideDomain { r: q.r, x3: q.x3 });
    }
    let (r, z) = psi_map(q.r.max(0.0), q.x3);
    Ok(HalfPlanePoint::new(r, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dual2;

    #[test]
    fn identity_on_half_line_and_far_zone() {
        for k in 0..=100 {
            let t = 5.0 * k as f64 / 100.0;
            let q = HalfPlanePoint::new(1.0 + t, -t);
            let p = psi_eval(q).unwrap();
            assert!((p.r - q.r).hypot(p.x3 - q.x3) < 1e-12, "{t}");
        }
        for k in 0..=50 {
            let a = 0.75 * PI + 0.25 * PI * k as f64 / 50.0;
            for rad in [R_OUT, 3.0] {
                let q = HalfPlanePoint::new((rad * a.sin()).max(0.0), 1.0 + rad * a.cos());
                let p = psi_eval(q).unwrap();
                assert!((p.r - q.r).hypot(p.x3 - q.x3) < 1e-12);
            }
        }
    }

    #[test]
    fn arc_is_folded_onto_unit_circle() {
        for k in 0..=200 {
            let a = 0.75 * PI + 0.25 * PI * k as f64 / 200.0;
            let q = HalfPlanePoint::new((R_IN * a.sin()).max(0.0), 1.0 + R_IN * a.cos());
            let p = psi_eval(q).unwrap();
            let w = 2.0 * (PI - a);
            assert!((p.r - w.sin()).hypot(p.x3 - w.cos()) < 1e-9, "{a} {p:?}");
        }
        let p = psi_eval(HalfPlanePoint::new(0.0, 1.0 - R_IN)).unwrap();
        assert!(p.r.abs() < 1e-15 && (p.x3 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn axis_stays_on_axis() {
        for k in 0..=20 {
            let z = 1.0 - R_IN - (R_OUT - R_IN) * k as f64 / 20.0;
            let p = psi_eval(HalfPlanePoint::new(0.0, z)).unwrap();
            assert!(p.r.abs() < 1e-15);
        }
    }

    #[test]
    fn positive_determinant() {
        let n = 300;
        for i in 0..n {
            for j in 0..n {
                let rad = R_IN + (R_OUT - R_IN) * (i as f64 + 0.5) / n as f64;
                let ang = 0.75 * PI + 0.25 * PI * (j as f64 + 0.5) / n as f64;
                let q = (rad * ang.sin(), 1.0 + rad * ang.cos());
                let (r, z) = psi_map(Dual2::var(q.0, 0), Dual2::var(q.1, 1));
                let det = r.d[0] * z.d[1] - r.d[1] * z.d[0];
                assert!(det > 0.0, "{rad} {ang} {det}");
                // area ratio with the hoop factor stays bounded
                let hoop = r.v / q.0;
                assert!((det * hoop).is_finite());
            }
        }
    }

    #[test]
    fn outside_domain_rejected() {
        assert!(psi_eval(HalfPlanePoint::new(0.1, 0.0)).is_err());
        assert!(psi_eval(HalfPlanePoint::new(3.0, -0.5)).is_err());
    }
}
