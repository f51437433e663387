//! The regularised map u_eps: explicit formulas in regions b, d_eps, e_eps,
//! f, the annulus extension, and a volume-preserving filling of the
//! eps-scale core (a_eps, a'_eps, c'_eps, e'_eps).
//!
//! Core layout. The thin tube c'_eps = {r < eps, 0 < x3 < 1} is sent to the
//! image polar angle f_eps(r); height is converted to image radius so that
//! volume is preserved, starting from the curve cos(theta) + 2 eps^gamma on
//! x3 = 0. The small half-balls a'_eps, e'_eps are foliated by segments
//! joining (g_eps(phi), x3) on the tube ends to the point of angle phi on
//! the sphere of radius eps, and are filled the same way. Region a_eps
//! interpolates radially between the inner sphere and eps^gamma.

use std::f64::consts::{PI, SQRT_2};

use super::profiles::EpsProfileSet;
use super::psi::{far_piece, psi_map, Z0};
use crate::dipole::{classify_hp, from_polar, gmap, outer_blend, phi_of_z, polar, R_CORE};
use crate::error::{Error, Result};
use crate::geom::{AxiMap, HalfPlanePoint, Point3, RegionTag};
use crate::numerics::bisect;
use crate::scalar::Real;

/// Sub-region of u_eps inside a dipole region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsPart {
    A,
    ACore,
    B,
    BPsi,
    D,
    Tube,
    E,
    ECore,
    F,
    Outer,
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct UEpsMap {
    pub prof: EpsProfileSet,
}

impl UEpsMap {
    pub fn new(eps: f64, gamma: f64) -> Result<Self> {
        Ok(UEpsMap {
            prof: EpsProfileSet::new(eps, gamma)?,
        })
    }

    pub fn eps(&self) -> f64 {
        self.prof.eps
    }

    pub fn part_in(&self, tag: RegionTag, r: f64, x3: f64) -> EpsPart {
        let eps = self.prof.eps;
        match tag {
            RegionTag::A if r.hypot(x3) <= eps => EpsPart::ACore,
            RegionTag::A => EpsPart::A,
            RegionTag::E if r.hypot(x3 - 1.0) <= eps => EpsPart::ECore,
            RegionTag::E => EpsPart::E,
            RegionTag::D if r <= eps => EpsPart::Tube,
            RegionTag::D => EpsPart::D,
            RegionTag::B if r.hypot(x3) - 1.0 < SQRT_2 * self.prof.eg => EpsPart::BPsi,
            RegionTag::B => EpsPart::B,
            RegionTag::F => EpsPart::F,
            _ => EpsPart::Outer,
        }
    }

    pub fn part(&self, p: HalfPlanePoint) -> Result<EpsPart> {
        Ok(self.part_in(classify_hp(p.r, p.x3)?, p.r, p.x3))
    }

    /// r / sin(f_eps(r)), continuous at r = 0.
    fn r_over_sin_f<T: Real>(&self, r: T) -> T {
        let p = &self.prof;
        if r.value() < 1e-9 * p.eps * p.eps {
            T::cst(p.eps * p.eps / (1.0 + p.alpha * p.eps))
        } else {
            r / p.f_t(r).sin()
        }
    }

    fn tube<T: Real>(&self, r: T, x3: T) -> (T, T) {
        let p = &self.prof;
        let th = p.f_t(r);
        let base = th.cos() + T::cst(2.0 * p.eg);
        let rad = (base.cube() + T::cst(3.0) * x3 * self.r_over_sin_f(r) / p.fp_t(r)).cbrt();
        from_polar(rad, th)
    }

    /// Segment coordinates (s, phi) of a point of the closed half-ball of
    /// radius eps about (0,1), x3 >= 1.
    pub fn cap_coords<T: Real>(&self, r: T, x3: T) -> Result<(T, T)> {
        let p = &self.prof;
        let eps = p.eps;
        let (rv, dz) = (r.value(), x3.value() - 1.0);
        if dz < -1e-14 || rv.hypot(dz) > eps * (1.0 + 1e-12) {
            return Err(Error::OutsideDomain { r: rv, x3: x3.value() });
        }
        let dz = dz.max(0.0);
        let phimax = (dz / eps).min(1.0).acos();
        let s_of = |ph: f64| (dz / (eps * ph.cos())).min(1.0);
        let resid = |ph: f64| {
            let s = s_of(ph);
            (1.0 - s) * p.g(ph).unwrap_or(f64::NAN) + s * eps * ph.sin() - rv
        };
        let ph = if resid(phimax) <= 0.0 {
            phimax
        } else {
            bisect(resid, 0.0, phimax, 100)?
        };
        let s = if ph.cos() > 0.0 { s_of(ph) } else { 1.0 };
        // one Newton step in T carries the derivatives
        let g = p.g(ph)?;
        let gp = 1.0 / p.fp(g);
        let j = [
            [-g + eps * ph.sin(), (1.0 - s) * gp + s * eps * ph.cos()],
            [eps * ph.cos(), -s * eps * ph.sin()],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let (sc, pc) = (T::cst(s), T::cst(ph));
        let res_r = (T::cst(1.0) - sc) * T::cst(g) + sc * T::cst(eps * ph.sin()) - r;
        let res_z = T::cst(1.0) + sc * T::cst(eps * ph.cos()) - x3;
        if det.abs() < 1e-300 {
            return Ok((sc, pc));
        }
        let ds = (res_r * T::cst(j[1][1]) - res_z * T::cst(j[0][1])) / T::cst(det);
        let dp = (res_z * T::cst(j[0][0]) - res_r * T::cst(j[1][0])) / T::cst(det);
        Ok((sc - ds, pc - dp))
    }

    fn e_core<T: Real>(&self, r: T, x3: T) -> Result<(T, T)> {
        let p = &self.prof;
        let (s, ph) = self.cap_coords(r, x3)?;
        let rad = (p.tube_top_cube_t(ph) + T::cst(3.0) * p.h_integral_t(s, ph)).cbrt();
        Ok(from_polar(rad, ph))
    }

    fn a_core<T: Real>(&self, r: T, x3: T) -> Result<(T, T)> {
        let p = &self.prof;
        let (s, ph) = self.cap_coords(r, T::cst(1.0) - x3)?;
        let base = ph.cos() + T::cst(2.0 * p.eg);
        let rad = (base.cube() - T::cst(3.0) * p.h_integral_t(s, ph)).cbrt();
        Ok(from_polar(rad, ph))
    }

    fn a_outer<T: Real>(&self, r: T, x3: T) -> (T, T) {
        let p = &self.prof;
        let (rho, phi) = polar(r, x3, 0.0);
        let th = T::cst(PI) - phi;
        let w = p.r_hat_t(rho);
        let rad = (T::cst(1.0) - w) * p.u_a_t(th) + w * T::cst(p.eg);
        from_polar(rad, th)
    }

    fn e_outer<T: Real>(&self, r: T, x3: T) -> (T, T) {
        let p = &self.prof;
        let (rho, phi) = polar(r, x3, 1.0);
        let w = p.r_hat_t(rho);
        let far = T::cst(2.0) * phi.cos() + T::cst(6.0 * p.eg);
        let rad = (T::cst(1.0) - w) * p.u_rho_eps_t(phi) + w * far;
        from_polar(rad, phi)
    }

    fn d_outer<T: Real>(&self, r: T, x3: T) -> Result<(T, T)> {
        let p = &self.prof;
        let (s, z) = gmap::g_map(p.r_hat_t(r), x3)?;
        let ph = phi_of_z(z);
        Ok((p.omega_t(z) + s * ph.sin(), -(s * ph.cos())))
    }

    fn b<T: Real>(&self, r: T, x3: T) -> (T, T) {
        let eg = self.prof.eg;
        let (rho, phi) = polar(r, x3, 0.0);
        let rq = (rho - T::cst(1.0)) / T::cst(eg) + T::cst(SQRT_2);
        let ang = (phi + T::cst(PI)) * T::cst(0.5);
        let (a, b) = psi_map(rq * ang.sin(), T::cst(1.0) + rq * ang.cos());
        (a * T::cst(eg), b * T::cst(eg))
    }

    fn f<T: Real>(&self, r: T, x3: T) -> (T, T) {
        let (rho, phi) = polar(r, x3, 1.0);
        let rad = T::cst(2.0) * phi.cos() + rho - T::cst(1.0) + T::cst(6.0 * self.prof.eg);
        from_polar(rad, phi)
    }

    fn core<T: Real>(&self, tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        self.eval_part(self.part_in(tag, r.value(), x3.value()), r, x3)
    }

    /// Evaluate the formula of one sub-region, without classification.
    pub fn eval_part<T: Real>(&self, part: EpsPart, r: T, x3: T) -> Result<(T, T)> {
        Ok(match part {
            EpsPart::A => self.a_outer(r, x3),
            EpsPart::ACore => self.a_core(r, x3)?,
            EpsPart::B | EpsPart::BPsi => self.b(r, x3),
            EpsPart::D => self.d_outer(r, x3)?,
            EpsPart::Tube => self.tube(r, x3),
            EpsPart::E => self.e_outer(r, x3),
            EpsPart::ECore => self.e_core(r, x3)?,
            EpsPart::F => self.f(r, x3),
            EpsPart::Outer => outer_blend(|a, b| self.trace3(a, b), r, x3)?,
        })
    }

    pub fn trace3<T: Real>(&self, r: T, x3: T) -> Result<(T, T)> {
        let tag = classify_hp(r.value(), x3.value())?;
        let tag = if tag == RegionTag::Outer { RegionTag::D } else { tag };
        self.core(tag, r, x3)
    }

    /// Image of the boundary circle r = eps of region d_eps at height x3;
    /// the tube opens to this radius.
    pub fn tube_opening_radius(&self, x3: f64) -> Result<f64> {
        let (a, b) = self.d_outer(self.prof.eps, x3)?;
        Ok(a.hypot(b))
    }
}

impl AxiMap for UEpsMap {
    fn name(&self) -> &'static str {
        "ueps"
    }

    fn tag(&self, p: HalfPlanePoint) -> Result<RegionTag> {
        classify_hp(p.r, p.x3)
    }

    fn piece(&self, p: HalfPlanePoint) -> Result<u32> {
        let tag = self.tag(p)?;
        let part = self.part_in(tag, p.r, p.x3);
        Ok(match part {
            EpsPart::D => {
                let rh = self.prof.r_hat(p.r);
                let (_, z) = gmap::g_map(rh, p.x3)?;
                let hat = (p.r <= self.prof.eg * self.prof.eg) as u32;
                1000 + 100 * (z.floor().clamp(0.0, 2.0) as u32)
                    + 2 * gmap::piece(rh, p.x3)?.id()
                    + hat
            }
            EpsPart::BPsi => {
                let rho = p.r.hypot(p.x3);
                let phi = p.r.atan2(p.x3);
                let rq = (rho - 1.0) / self.prof.eg + SQRT_2;
                let ang = 0.5 * (phi + PI);
                let (qr, qz) = (rq * ang.sin(), 1.0 + rq * ang.cos());
                200 + far_piece(qr.atan2(qz - Z0))
            }
            EpsPart::Outer => 300 + classify_hp(
                R_CORE * p.r / p.norm(),
                R_CORE * p.x3 / p.norm(),
            )? as u32,
            other => other as u32,
        })
    }

    fn eval_in<T: Real>(&self, tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        self.core(tag, r, x3)
    }

    fn exact_det(&self, p: HalfPlanePoint) -> Option<f64> {
        match self.part(p).ok()? {
            EpsPart::ACore | EpsPart::ECore | EpsPart::Tube => Some(1.0),
            _ => None,
        }
    }
}

pub fn u_eps_eval(p: Point3, map: &UEpsMap) -> Result<Point3> {
    map.eval3(p)
}

#[cfg(test)]
mod tests;
