//! The singular dipole map v on B(0,4): region atlas, closed forms, the
//! distance to the bad set U and the annulus extension to the identity.

pub mod gmap;
pub mod jump;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{AxiMap, HalfPlanePoint, Point3, RegionTag};
use crate::scalar::Real;

pub use gmap::{g_map, slab_dist};
pub use jump::{jump_trace, jump_traces, singular_inverse_norm, JumpTrace, SingularNorm};

/// Radius of the domain ball.
pub const R_DOMAIN: f64 = 4.0;
/// Radius of the ball carrying the region formulas.
pub const R_CORE: f64 = 3.0;
const BOUNDARY_TOL: f64 = 1e-12;

/// Distance to U = {lower unit half-ball} u {axis segment 0 <= x3 <= 1} u
/// {disk x3 = 1, r <= 1}, in meridian coordinates.
pub fn dist_to_u_hp(r: f64, x3: f64) -> f64 {
    dist_to_u_t(r, x3)
}

/// Generic form of [`dist_to_u_hp`]; the active branch is chosen by value.
pub fn dist_to_u_t<T: Real>(r: T, x3: T) -> T {
    dist_to_u_branch(r, x3).0
}

/// Distance to U together with the index of the smooth formula that attains
/// it (0..=2 and 8 half-ball, 3..=5 segment, 6..=7 disk).
pub fn dist_to_u_branch<T: Real>(r: T, x3: T) -> (T, u32) {
    let (rv, zv) = (r.value(), x3.value());
    let zero = T::cst(0.0);
    let one = T::cst(1.0);
    let ball = if zv <= 0.0 {
        let d = r.hypot(x3) - one;
        if d.value() > 0.0 { (d, 0) } else { (zero, 8) }
    } else if rv <= 1.0 {
        (x3, 1)
    } else {
        ((r - one).hypot(x3), 2)
    };
    let seg = if zv < 0.0 {
        (r.hypot(x3), 3)
    } else if zv > 1.0 {
        (r.hypot(x3 - one), 4)
    } else {
        (r, 5)
    };
    let disk = if rv > 1.0 {
        ((r - one).hypot(x3 - one), 6)
    } else {
        ((x3 - one).abs(), 7)
    };
    let mut best = ball;
    for c in [seg, disk] {
        if c.0.value() < best.0.value() {
            best = c;
        }
    }
    best
}

pub fn dist_to_u(p: Point3) -> f64 {
    let (hp, _) = p.to_halfplane();
    dist_to_u_hp(hp.r, hp.x3)
}

/// Region of a meridian point; closures are resolved in the order
/// a, e, d, b, f.
pub fn classify_hp(r: f64, x3: f64) -> Result<RegionTag> {
    let rad = r.hypot(x3);
    if !(r >= 0.0 && rad <= R_DOMAIN + BOUNDARY_TOL) {
        return Err(Error::OutsideDomain { r, x3 });
    }
    let rad_e = r.hypot(x3 - 1.0);
    Ok(if rad <= 1.0 && x3 <= 0.0 {
        RegionTag::A
    } else if rad_e <= 1.0 && x3 >= 1.0 {
        RegionTag::E
    } else if rad <= R_CORE + BOUNDARY_TOL && (0.0..=1.0).contains(&x3) {
        RegionTag::D
    } else if rad <= R_CORE + BOUNDARY_TOL && x3 < 0.0 {
        RegionTag::B
    } else if rad <= R_CORE + BOUNDARY_TOL {
        RegionTag::F
    } else {
        RegionTag::Outer
    })
}

pub fn classify(p: Point3) -> Result<RegionTag> {
    let (hp, _) = p.to_halfplane();
    classify_hp(hp.r, hp.x3)
}

/// Polar coordinates about the on-axis point (0, c): (rho, phi) with phi
/// measured from the upward axis.
pub fn polar<T: Real>(r: T, x3: T, c: f64) -> (T, T) {
    let dz = x3 - T::cst(c);
    (r.hypot(dz), r.atan2(dz))
}

/// Meridian image of a point given in image polar coordinates.
pub fn from_polar<T: Real>(rho: T, phi: T) -> (T, T) {
    (rho * phi.sin(), rho * phi.cos())
}

/// Polar angle of the region-d image, pi/4 (1 + z/3).
pub fn phi_of_z<T: Real>(z: T) -> T {
    T::cst(PI / 4.0) * (T::cst(1.0) + z / T::cst(3.0))
}

pub fn v_a<T: Real>(r: T, x3: T) -> (T, T) {
    let (rho, phi) = polar(r, x3, 0.0);
    let vphi = T::cst(PI) - phi;
    from_polar((T::cst(1.0) - rho) * vphi.cos(), vphi)
}

pub fn v_b<T: Real>(r: T, x3: T) -> (T, T) {
    let (rho, phi) = polar(r, x3, 0.0);
    from_polar(rho - T::cst(1.0), (phi + T::cst(PI)) * T::cst(0.5))
}

pub fn v_e<T: Real>(r: T, x3: T) -> (T, T) {
    let (rho, phi) = polar(r, x3, 1.0);
    from_polar((T::cst(1.0) + rho) * phi.cos(), phi)
}

pub fn v_f<T: Real>(r: T, x3: T) -> (T, T) {
    let (rho, phi) = polar(r, x3, 1.0);
    from_polar(T::cst(2.0) * phi.cos() + rho - T::cst(1.0), phi)
}

/// Region-d image of chart coordinates (s, z).
pub fn v_d_of_sz<T: Real>(s: T, z: T) -> (T, T) {
    let ph = phi_of_z(z);
    (s * ph.sin(), -(s * ph.cos()))
}

pub fn v_d<T: Real>(r: T, x3: T) -> Result<(T, T)> {
    let (s, z) = g_map(r, x3)?;
    Ok(v_d_of_sz(s, z))
}

/// Extension on 3 <= |x| <= 4 blending the trace of a map on |x| = 3 to the
/// identity on |x| = 4 along rays: radius and polar angle of the image are
/// interpolated linearly in |x|.
pub fn outer_blend<T, F>(trace: F, r: T, x3: T) -> Result<(T, T)>
where
    T: Real,
    F: Fn(T, T) -> Result<(T, T)>,
{
    let (rad, om) = polar(r, x3, 0.0);
    let t = rad - T::cst(R_CORE);
    let q = from_polar(T::cst(R_CORE), om);
    let (tr, tz) = trace(q.0, q.1)?;
    let (rho3, th3) = polar(tr, tz, 0.0);
    let one = T::cst(1.0);
    let rr = (one - t) * rho3 + t * T::cst(R_DOMAIN);
    let th = (one - t) * th3 + t * om;
    Ok(from_polar(rr, th))
}

/// The dipole map.
#[derive(Clone, Copy, Debug, Default)]
pub struct DipoleMap;

impl DipoleMap {
    fn core<T: Real>(&self, tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        Ok(match tag {
            RegionTag::A => v_a(r, x3),
            RegionTag::B => v_b(r, x3),
            RegionTag::D => v_d(r, x3)?,
            RegionTag::E => v_e(r, x3),
            RegionTag::F => v_f(r, x3),
            _ => {
                return Err(Error::OutsideDomain {
                    r: r.value(),
                    x3: x3.value(),
                })
            }
        })
    }

    /// Trace on |x| = 3 used by the annulus extension.
    pub fn trace3<T: Real>(&self, r: T, x3: T) -> Result<(T, T)> {
        let tag = classify_hp(r.value(), x3.value())?;
        let tag = if tag == RegionTag::Outer { RegionTag::D } else { tag };
        self.core(tag, r, x3)
    }
}

impl AxiMap for DipoleMap {
    fn name(&self) -> &'static str {
        "v"
    }

    fn tag(&self, p: HalfPlanePoint) -> Result<RegionTag> {
        classify_hp(p.r, p.x3)
    }

    fn piece(&self, p: HalfPlanePoint) -> Result<u32> {
        let t = self.tag(p)?;
        Ok(match t {
            RegionTag::D => 100 + gmap::piece(p.r, p.x3)?.id(),
            _ => t as u32,
        })
    }

    fn eval_in<T: Real>(&self, tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        match tag {
            RegionTag::Outer => outer_blend(|a, b| self.trace3(a, b), r, x3),
            _ => self.core(tag, r, x3),
        }
    }
}

/// Point in 3D evaluation of v.
pub fn v_eval(p: Point3) -> Result<Point3> {
    DipoleMap.eval3(p)
}

/// The region-d determinant in the literal closed form s^2 sin(phi(z)) / r.
pub fn d_det_closed_form(r: f64, x3: f64) -> Result<f64> {
    let (s, z) = g_map(r, x3)?;
    Ok(s * s * phi_of_z(z).sin() / r)
}

/// The region-d determinant including the chart factor:
/// (pi/12) det Dg s^2 sin(phi(z)) / r.
pub fn d_det_with_chart(r: f64, x3: f64) -> Result<f64> {
    let jg = gmap::g_jacobian_det(r, x3)?;
    Ok(PI / 12.0 * jg * d_det_closed_form(r, x3)?)
}

/// Determinant of Dv in closed form for the regions carrying explicit
/// formulas, and by exact differentiation in the annulus.
pub fn v_det(p: HalfPlanePoint) -> Result<f64> {
    let tag = classify_hp(p.r, p.x3)?;
    let near_singular = p.r < 1e-12
        || p.r.hypot(p.x3) < 1e-12
        || p.r.hypot(p.x3 - 1.0) < 1e-12
        || (tag == RegionTag::D && slab_dist(p.r, p.x3) < 1e-12);
    if near_singular {
        return Err(Error::SingularPoint { r: p.r, x3: p.x3 });
    }
    Ok(match tag {
        RegionTag::A => {
            let (rho, phi) = polar(p.r, p.x3, 0.0);
            let c = (PI - phi).cos();
            (1.0 - rho).powi(2) * c.powi(3) / (rho * rho)
        }
        RegionTag::B => {
            let (rho, phi) = polar(p.r, p.x3, 0.0);
            0.5 * (rho - 1.0).powi(2) * (0.5 * (phi + PI)).sin() / (rho * rho * phi.sin())
        }
        RegionTag::E => {
            let (rho, phi) = polar(p.r, p.x3, 1.0);
            (1.0 + rho).powi(2) * phi.cos().powi(3) / (rho * rho)
        }
        RegionTag::F => {
            let (rho, phi) = polar(p.r, p.x3, 1.0);
            let vr = 2.0 * phi.cos() + rho - 1.0;
            vr * vr / (rho * rho)
        }
        RegionTag::D => d_det_with_chart(p.r, p.x3)?,
        _ => DipoleMap.jacobian(p)?.det(),
    })
}

/// Image of v lies inside (region a) or outside (region e) the bubble.
pub fn bubble_side(y: HalfPlanePoint) -> f64 {
    y.r.hypot(y.x3 - 0.5) - 0.5
}

/// One row of the meridian region atlas.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AtlasRow {
    pub x1: f64,
    pub x3: f64,
    pub region: RegionTag,
    pub color: &'static str,
}

pub fn region_color(t: RegionTag) -> &'static str {
    match t {
        RegionTag::A => "#1f77b4",
        RegionTag::E => "#ff7f0e",
        RegionTag::D => "#2ca02c",
        RegionTag::B => "#d62728",
        RegionTag::F => "#9467bd",
        RegionTag::Outer => "#7f7f7f",
        RegionTag::Whole => "#000000",
    }
}

/// Region labels on an n x n grid of the meridian section x2 = 0.
pub fn atlas(n: usize) -> Vec<AtlasRow> {
    let mut rows = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let x1 = -R_DOMAIN + 2.0 * R_DOMAIN * (i as f64 + 0.5) / n as f64;
            let x3 = -R_DOMAIN + 2.0 * R_DOMAIN * (j as f64 + 0.5) / n as f64;
            if let Ok(region) = classify_hp(x1.abs(), x3) {
                rows.push(AtlasRow {
                    x1,
                    x3,
                    region,
                    color: region_color(region),
                });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests;
