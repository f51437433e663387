//! Boundary data b_delta: u_eps on U_{delta/2}, v outside U_delta, and an
//! explicit interpolation on the layer T_delta = {delta/2 <= dist(x,U) <= delta}
//! chosen by the dipole region of the point.

pub mod probe;

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::approx::{EpsPart, UEpsMap};
use crate::dipole::{
    classify_hp, dist_to_u_branch, dist_to_u_hp, from_polar, gmap, phi_of_z, polar, DipoleMap,
};
use crate::error::{Error, Result};
use crate::geom::{AxiMap, HalfPlanePoint, Point3, RegionTag};
use crate::scalar::{Dual2, Real};

pub use probe::{bilipschitz_probe, meridian_sections, sections_csv, BiLipReport, LayerScaling, SectionRow};

/// Cutoff equal to 1 on [0, delta/2], affine down to 0 at delta.
pub fn chi_delta(t: f64, delta: f64) -> f64 {
    if t <= 0.5 * delta {
        1.0
    } else if t >= delta {
        0.0
    } else {
        (delta - t) / (0.5 * delta)
    }
}

pub fn chi_t<T: Real>(t: T, delta: f64) -> T {
    let v = t.value();
    if v <= 0.5 * delta {
        T::cst(1.0)
    } else if v >= delta {
        T::cst(0.0)
    } else {
        (T::cst(delta) - t) / T::cst(0.5 * delta)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PatchParams {
    pub delta: f64,
    pub gamma: f64,
    pub c0: f64,
    pub eps: f64,
}

impl PatchParams {
    pub const DEFAULT_C0: f64 = 16.0;
    pub const DEFAULT_GAMMA: f64 = 1.0 / 3.0;

    /// eps is fixed by delta = c0 eps^gamma.
    pub fn new(delta: f64, gamma: f64, c0: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParams(format!("delta = {delta} not in (0, 1]")));
        }
        if !(c0 > 14.0) {
            return Err(Error::InvalidParams(format!("c0 = {c0} must exceed 14")));
        }
        if !(gamma > 0.0 && gamma <= 1.0 / 3.0) {
            return Err(Error::InvalidParams(format!("gamma = {gamma} not in (0, 1/3]")));
        }
        let eps = (delta / c0).powf(1.0 / gamma);
        let p = PatchParams { delta, gamma, c0, eps };
        let eg = p.eg();
        if 0.5 * delta < 2.0 * SQRT_2 * eg || 0.5 * delta < eg * eg {
            return Err(Error::InvalidParams(format!(
                "layer too thin for delta = {delta}, eps^gamma = {eg}"
            )));
        }
        Ok(p)
    }

    pub fn with_delta(delta: f64) -> Result<Self> {
        Self::new(delta, Self::DEFAULT_GAMMA, Self::DEFAULT_C0)
    }

    pub fn eg(&self) -> f64 {
        self.eps.powf(self.gamma)
    }

    /// Slope of the planar radius s + chi(s) sqrt2 eps^gamma in region b.
    pub fn b_radial_slope(&self) -> f64 {
        1.0 - 2.0 * SQRT_2 * self.eg() / self.delta
    }
}

/// Which of the three assembly formulas applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Core,
    Layer,
    Exterior,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BDeltaMap {
    pub params: PatchParams,
    pub u: UEpsMap,
}

impl BDeltaMap {
    pub fn new(params: PatchParams) -> Result<Self> {
        Ok(BDeltaMap {
            params,
            u: UEpsMap::new(params.eps, params.gamma)?,
        })
    }

    pub fn with_delta(delta: f64) -> Result<Self> {
        Self::new(PatchParams::with_delta(delta)?)
    }

    pub fn delta(&self) -> f64 {
        self.params.delta
    }

    pub fn zone(&self, r: f64, x3: f64) -> Zone {
        let d = dist_to_u_hp(r, x3);
        if d <= 0.5 * self.params.delta {
            Zone::Core
        } else if d >= self.params.delta {
            Zone::Exterior
        } else {
            Zone::Layer
        }
    }

    /// Layer formula of region `tag`, valid for any point where it is defined.
    pub fn layer_in<T: Real>(&self, tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        let delta = self.params.delta;
        let prof = &self.u.prof;
        let eg = prof.eg;
        let chi = chi_t(dist_to_u_branch(r, x3).0, delta);
        match tag {
            RegionTag::B => {
                let (rho, phi) = polar(r, x3, 0.0);
                let big = (phi + T::cst(PI)) * T::cst(0.5);
                let rad = rho - T::cst(1.0) + chi * T::cst(SQRT_2 * eg);
                let (a, b) = from_polar(rad, big);
                Ok((a, b + chi * T::cst(eg)))
            }
            RegionTag::D => {
                let (s, z) = gmap::g_map(r, x3)?;
                let ph = phi_of_z(z);
                Ok((chi * prof.omega_t(z) + s * ph.sin(), -(s * ph.cos())))
            }
            RegionTag::E | RegionTag::F => {
                let part = if tag == RegionTag::E { EpsPart::E } else { EpsPart::F };
                let v = DipoleMap.eval_in(tag, r, x3)?;
                let u = self.u.eval_part(part, r, x3)?;
                let one = T::cst(1.0);
                Ok(((one - chi) * v.0 + chi * u.0, (one - chi) * v.1 + chi * u.1))
            }
            _ => Err(Error::OutsideDomain {
                r: r.value(),
                x3: x3.value(),
            }),
        }
    }

    fn layer_piece(&self, tag: RegionTag, r: f64, x3: f64) -> Result<u32> {
        let branch = dist_to_u_branch(r, x3).1;
        let inner = match tag {
            RegionTag::D => {
                let (_, z) = gmap::g_map(r, x3)?;
                10 * gmap::piece(r, x3)?.id() + z.floor().clamp(0.0, 2.0) as u32
            }
            _ => 0,
        };
        Ok(30000 + 1000 * tag as u32 + 100 * branch + inner)
    }

    /// Evaluated determinant lower bound at a layer point.
    pub fn layer_det_bound(&self, p: HalfPlanePoint) -> Result<LayerDetBound> {
        let delta = self.params.delta;
        let eg = self.u.prof.eg;
        let dist = dist_to_u_hp(p.r, p.x3);
        if !(dist >= 0.5 * delta && dist <= delta) {
            return Err(Error::OutOfRange {
                value: dist,
                lo: 0.5 * delta,
                hi: delta,
            });
        }
        let tag = classify_hp(p.r, p.x3)?;
        let det = self.jacobian(p)?.det();
        let mut chain = true;
        let (bound, factor) = match tag {
            RegionTag::B => {
                let (rho, phi) = polar(p.r, p.x3, 0.0);
                let big = 0.5 * (phi + PI);
                let chi = chi_delta(rho - 1.0, delta);
                let rd = rho - 1.0 + chi * SQRT_2 * eg;
                let factor = 1.0 - 2.0 * eg / delta * (SQRT_2 + big.cos());
                (0.5 * rd * rd / (rho * rho) * big.sin() / phi.sin() * factor, factor)
            }
            RegionTag::D => {
                let (sd, zd) = gmap::g_map(Dual2::var(p.r, 0), Dual2::var(p.x3, 1))?;
                let (s, z) = (sd.v, zd.v);
                let ph = phi_of_z(z);
                let jg = sd.d[0] * zd.d[1] - sd.d[1] * zd.d[0];
                // gradient of dist in the chart (s, z); (1, 0) wherever s = dist
                let dd = dist_to_u_branch(Dual2::var(p.r, 0), Dual2::var(p.x3, 1)).0.d;
                let ds = (dd[0] * zd.d[1] - dd[1] * zd.d[0]) / jg;
                let dz = (sd.d[0] * dd[1] - sd.d[1] * dd[0]) / jg;
                chain = (s - dist).abs() <= 1e-12;
                let factor = 1.0
                    - 12.0 * eg / delta * (ds.abs() * ph.sin() + dz.abs() * ph.cos() * 12.0 / (PI * s));
                (s * ph.sin() / p.r * PI / 12.0 * s * factor * jg, factor)
            }
            RegionTag::E => {
                let (rho, phi) = polar(p.r, p.x3, 1.0);
                let c = phi.cos();
                let factor = 1.0 - 14.0 * eg / delta;
                (0.25 * (1.0 + rho).powi(2) * c * c / (rho * rho) * c * factor, factor)
            }
            RegionTag::F => {
                let (rho, phi) = polar(p.r, p.x3, 1.0);
                let vr = 2.0 * phi.cos() + rho - 1.0;
                let factor = 1.0 - 12.0 * eg / delta;
                (vr * vr / (rho * rho) * factor, factor)
            }
            _ => return Err(Error::OutsideDomain { r: p.r, x3: p.x3 }),
        };
        Ok(LayerDetBound {
            region: tag,
            dist,
            det,
            bound,
            factor,
            chain,
        })
    }

    /// Region-d layer: (s sin(phi)/r, w_r/r, 2 + (s/r) sin(phi)).
    pub fn d_hoop_bounds(&self, p: HalfPlanePoint) -> Result<(f64, f64, f64)> {
        let (s, z) = gmap::g_map(p.r, p.x3)?;
        let sp = s * phi_of_z(z).sin() / p.r;
        let (wr, _) = self.layer_in(RegionTag::D, p.r, p.x3)?;
        Ok((sp, wr / p.r, 2.0 + sp))
    }

    /// Region-e layer: central-difference slope of rho -> b_rho at (rho, phi)
    /// about (0,1), and the bound cos(phi)(1 - 14 eps^gamma/delta).
    pub fn e_radial_slope(&self, rho: f64, phi: f64) -> Result<(f64, f64)> {
        let h = 1e-7;
        let b_rho = |t: f64| -> Result<f64> {
            let (r, z) = from_polar(t, phi);
            let q = self.layer_in(RegionTag::E, r, 1.0 + z)?;
            Ok(q.0.hypot(q.1))
        };
        let fd = (b_rho(rho + h)? - b_rho(rho - h)?) / (2.0 * h);
        let bound = phi.cos() * (1.0 - 14.0 * self.u.prof.eg / self.params.delta);
        Ok((fd, bound))
    }
}

impl AxiMap for BDeltaMap {
    fn name(&self) -> &'static str {
        "bdelta"
    }

    fn tag(&self, p: HalfPlanePoint) -> Result<RegionTag> {
        classify_hp(p.r, p.x3)
    }

    fn piece(&self, p: HalfPlanePoint) -> Result<u32> {
        match self.zone(p.r, p.x3) {
            Zone::Core => Ok(10000 + self.u.piece(p)?),
            Zone::Exterior => Ok(20000 + DipoleMap.piece(p)?),
            Zone::Layer => self.layer_piece(self.tag(p)?, p.r, p.x3),
        }
    }

    fn eval_in<T: Real>(&self, tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        match self.zone(r.value(), x3.value()) {
            Zone::Core => self.u.eval_in(tag, r, x3),
            Zone::Exterior => DipoleMap.eval_in(tag, r, x3),
            Zone::Layer => self.layer_in(tag, r, x3),
        }
    }

    fn exact_det(&self, p: HalfPlanePoint) -> Option<f64> {
        match self.zone(p.r, p.x3) {
            Zone::Core => self.u.exact_det(p),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LayerDetBound {
    pub region: RegionTag,
    pub dist: f64,
    pub det: f64,
    pub bound: f64,
    pub factor: f64,
    /// false where the region-d chart coordinate s differs from dist(x, U);
    /// the bound then carries the chart gradient of dist and may be negative
    pub chain: bool,
}

pub fn layer_det_bound(p: HalfPlanePoint, map: &BDeltaMap) -> Result<LayerDetBound> {
    map.layer_det_bound(p)
}

pub fn b_delta_eval(p: Point3, map: &BDeltaMap) -> Result<Point3> {
    map.eval3(p)
}

#[cfg(test)]
mod tests;
