//! Coordinate frames, the axisymmetric map abstraction and the pointwise
//! kernels |Du|^2 and det Du.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Dual2, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Point3 {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Point3 { x1, x2, x3 }
    }

    pub fn norm(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    pub fn dist(&self, o: &Point3) -> f64 {
        Point3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3).norm()
    }

    /// Meridian representative and azimuth.
    pub fn to_halfplane(&self) -> (HalfPlanePoint, f64) {
        let r = self.x1.hypot(self.x2);
        let mut theta = self.x2.atan2(self.x1);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        (HalfPlanePoint { r, x3: self.x3 }, theta)
    }

    pub fn from_halfplane(p: HalfPlanePoint, theta: f64) -> Self {
        Point3::new(p.r * theta.cos(), p.r * theta.sin(), p.x3)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    pub r: f64,
    pub x3: f64,
}

impl HalfPlanePoint {
    pub fn new(r: f64, x3: f64) -> Self {
        HalfPlanePoint { r, x3 }
    }

    pub fn norm(&self) -> f64 {
        self.r.hypot(self.x3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphPoint {
    pub rho: f64,
    pub phi: f64,
    pub theta: f64,
}

/// Spherical coordinates about an on-axis `center`, with `phi` measured
/// from the upward axis. The azimuth is always 0 for meridian points.
pub fn sph_from_halfplane(p: HalfPlanePoint, center: HalfPlanePoint) -> SphPoint {
    let dr = p.r - center.r;
    let dz = p.x3 - center.x3;
    let rho = dr.hypot(dz);
    let phi = if rho == 0.0 { 0.0 } else { dr.atan2(dz) };
    SphPoint { rho, phi, theta: 0.0 }
}

pub fn halfplane_from_sph(s: SphPoint, center: HalfPlanePoint) -> HalfPlanePoint {
    HalfPlanePoint {
        r: center.r + s.rho * s.phi.sin(),
        x3: center.x3 + s.rho * s.phi.cos(),
    }
}

/// Meridian derivative block of an axisymmetric map plus the hoop stretch
/// (image radius over reference radius).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarJacobian {
    pub d_rr: f64,
    pub d_r3: f64,
    pub d_3r: f64,
    pub d_33: f64,
    pub hoop: f64,
}

impl PlanarJacobian {
    pub fn identity() -> Self {
        PlanarJacobian {
            d_rr: 1.0,
            d_r3: 0.0,
            d_3r: 0.0,
            d_33: 1.0,
            hoop: 1.0,
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.d_rr * self.d_rr
            + self.d_r3 * self.d_r3
            + self.d_3r * self.d_3r
            + self.d_33 * self.d_33
            + self.hoop * self.hoop
    }

    pub fn meridian_det(&self) -> f64 {
        self.d_rr * self.d_33 - self.d_r3 * self.d_3r
    }

    pub fn det(&self) -> f64 {
        self.hoop * self.meridian_det()
    }

    /// Full 3x3 gradient in the frame (e_r, e_theta, e_3).
    pub fn matrix3(&self) -> [[f64; 3]; 3] {
        [
            [self.d_rr, 0.0, self.d_r3],
            [0.0, self.hoop, 0.0],
            [self.d_3r, 0.0, self.d_33],
        ]
    }

    pub fn is_finite(&self) -> bool {
        [self.d_rr, self.d_r3, self.d_3r, self.d_33, self.hoop]
            .iter()
            .all(|v| v.is_finite())
    }
}

pub fn frobenius_sq(j: &PlanarJacobian) -> f64 {
    j.frobenius_sq()
}

pub fn det(j: &PlanarJacobian) -> f64 {
    j.det()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionTag {
    A,
    E,
    D,
    B,
    F,
    Outer,
    Whole,
}

impl RegionTag {
    pub const DIPOLE: [RegionTag; 6] = [
        RegionTag::A,
        RegionTag::E,
        RegionTag::D,
        RegionTag::B,
        RegionTag::F,
        RegionTag::Outer,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::A => "a",
            RegionTag::E => "e",
            RegionTag::D => "d",
            RegionTag::B => "b",
            RegionTag::F => "f",
            RegionTag::Outer => "outer",
            RegionTag::Whole => "whole",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A piecewise axisymmetric deformation with zero swirl, described by its
/// meridian representative (r, x3) -> (R, Z).
pub trait AxiMap: Sync {
    fn name(&self) -> &'static str;

    fn tag(&self, p: HalfPlanePoint) -> Result<RegionTag>;

    /// Finer classification used to keep finite-difference stencils inside
    /// one smooth piece. Defaults to the region tag.
    fn piece(&self, p: HalfPlanePoint) -> Result<u32> {
        self.tag(p).map(|t| t as u32)
    }

    /// Evaluate the formula of region `tag` at (r, x3). Branch selection
    /// inside a region uses the values only, so derivatives are one-sided on
    /// internal seams.
    fn eval_in<T: Real>(&self, tag: RegionTag, r: T, x3: T) -> Result<(T, T)>;

    /// Determinant known in closed form at `p`, for pieces where the product
    /// of the differentiated entries cancels to noise.
    fn exact_det(&self, _p: HalfPlanePoint) -> Option<f64> {
        None
    }

    fn eval(&self, p: HalfPlanePoint) -> Result<HalfPlanePoint> {
        let tag = self.tag(p)?;
        let (r, z) = self.eval_in(tag, p.r, p.x3)?;
        Ok(HalfPlanePoint::new(r, z))
    }

    fn eval3(&self, p: Point3) -> Result<Point3> {
        let (hp, theta) = p.to_halfplane();
        Ok(Point3::from_halfplane(self.eval(hp)?, theta))
    }

    /// Exact Jacobian by forward-mode differentiation of the region formula.
    fn jacobian_in(&self, tag: RegionTag, p: HalfPlanePoint) -> Result<PlanarJacobian> {
        if p.r <= 0.0 {
            return Err(Error::SingularPoint { r: p.r, x3: p.x3 });
        }
        let (rr, zz) = self.eval_in(tag, Dual2::var(p.r, 0), Dual2::var(p.x3, 1))?;
        Ok(PlanarJacobian {
            d_rr: rr.d[0],
            d_r3: rr.d[1],
            d_3r: zz.d[0],
            d_33: zz.d[1],
            hoop: rr.v / p.r,
        })
    }

    fn jacobian(&self, p: HalfPlanePoint) -> Result<PlanarJacobian> {
        self.jacobian_in(self.tag(p)?, p)
    }
}

/// Central-difference Jacobian; `h = None` picks 1e-6 * max(1, |p|).
pub fn planar_jacobian_fd<M: AxiMap>(
    map: &M,
    p: HalfPlanePoint,
    h: Option<f64>,
) -> Result<PlanarJacobian> {
    let h = h.unwrap_or(1e-6 * p.norm().max(1.0));
    if p.r <= h {
        return Err(Error::StepCrossesInterface { r: p.r, x3: p.x3 });
    }
    let tag = map.tag(p)?;
    let piece = map.piece(p)?;
    let stencil = [
        HalfPlanePoint::new(p.r + h, p.x3),
        HalfPlanePoint::new(p.r - h, p.x3),
        HalfPlanePoint::new(p.r, p.x3 + h),
        HalfPlanePoint::new(p.r, p.x3 - h),
    ];
    let mut img = [(0.0, 0.0); 4];
    for (k, q) in stencil.iter().enumerate() {
        if map.piece(*q).ok() != Some(piece) {
            return Err(Error::StepCrossesInterface { r: p.r, x3: p.x3 });
        }
        img[k] = map.eval_in(tag, q.r, q.x3)?;
    }
    let centre = map.eval_in(tag, p.r, p.x3)?;
    Ok(PlanarJacobian {
        d_rr: (img[0].0 - img[1].0) / (2.0 * h),
        d_r3: (img[2].0 - img[3].0) / (2.0 * h),
        d_3r: (img[0].1 - img[1].1) / (2.0 * h),
        d_33: (img[2].1 - img[3].1) / (2.0 * h),
        hoop: centre.0 / p.r,
    })
}

/// Limit of the Jacobian as r -> 0 at height x3, by one-sided differences.
/// A map whose image radius does not vanish on the axis opens a cavity and
/// is reported as [`Error::AxisSingular`].
pub fn on_axis_limit<M: AxiMap>(map: &M, x3: f64) -> Result<PlanarJacobian> {
    let tiny = 1e-10;
    let h = 1e-6;
    let p0 = map.eval(HalfPlanePoint::new(tiny, x3))?;
    if p0.r.abs() > 1e-7 {
        return Err(Error::AxisSingular { x3, radius: p0.r });
    }
    let p1 = map.eval(HalfPlanePoint::new(tiny + h, x3))?;
    let p2 = map.eval(HalfPlanePoint::new(tiny + 2.0 * h, x3))?;
    let up = map.eval(HalfPlanePoint::new(tiny, x3 + h))?;
    let dn = map.eval(HalfPlanePoint::new(tiny, x3 - h))?;
    // second-order one-sided stencil in r
    let d_rr = (4.0 * p1.r - 3.0 * p0.r - p2.r) / (2.0 * h);
    let d_3r = (4.0 * p1.x3 - 3.0 * p0.x3 - p2.x3) / (2.0 * h);
    let j = PlanarJacobian {
        d_rr,
        d_r3: (up.r - dn.r) / (2.0 * h),
        d_3r,
        d_33: (up.x3 - dn.x3) / (2.0 * h),
        hoop: d_rr,
    };
    if !j.is_finite() {
        return Err(Error::AxisSingular { x3, radius: p0.r });
    }
    Ok(j)
}

/// The identity deformation.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityMap;

impl AxiMap for IdentityMap {
    fn name(&self) -> &'static str {
        "identity"
    }
    fn tag(&self, _p: HalfPlanePoint) -> Result<RegionTag> {
        Ok(RegionTag::Whole)
    }
    fn eval_in<T: Real>(&self, _tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        Ok((r, x3))
    }
}

/// (r, x3) -> (a r, b x3); a reflection when `b < 0`.
#[derive(Clone, Copy, Debug)]
pub struct DiagonalMap {
    pub a: f64,
    pub b: f64,
}

impl AxiMap for DiagonalMap {
    fn name(&self) -> &'static str {
        "diagonal"
    }
    fn tag(&self, _p: HalfPlanePoint) -> Result<RegionTag> {
        Ok(RegionTag::Whole)
    }
    fn eval_in<T: Real>(&self, _tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        Ok((T::cst(self.a) * r, T::cst(self.b) * x3))
    }
}
