//! The maps the energy driver knows about, with their quadrature patches.

use std::f64::consts::PI;

use serde::Serialize;

use super::quad::{Anchor, Chart, Patch};
use crate::approx::UEpsMap;
use crate::dipole::DipoleMap;
use crate::error::Result;
use crate::geom::{AxiMap, HalfPlanePoint, IdentityMap, RegionTag};
use crate::patch::BDeltaMap;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnyMap {
    Identity,
    V,
    Ueps(UEpsMap),
    Bdelta(BDeltaMap),
}

impl AnyMap {
    pub fn ueps(eps: f64, gamma: f64) -> Result<Self> {
        Ok(AnyMap::Ueps(UEpsMap::new(eps, gamma)?))
    }

    pub fn bdelta(delta: f64) -> Result<Self> {
        Ok(AnyMap::Bdelta(BDeltaMap::with_delta(delta)?))
    }

    /// (eps, eps^gamma) of the regularised core, if any.
    pub fn eps_scales(&self) -> Option<(f64, f64)> {
        match self {
            AnyMap::Ueps(m) => Some((m.prof.eps, m.prof.eg)),
            AnyMap::Bdelta(m) => Some((m.u.prof.eps, m.u.prof.eg)),
            _ => None,
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            AnyMap::Bdelta(m) => Some(m.delta()),
            _ => None,
        }
    }

    /// Patches of the meridian half-disk of radius 4 graded toward the
    /// singular sets and eps-scale features of this map.
    pub fn domain(&self) -> Vec<Patch> {
        meridian_domain(self.eps_scales(), self.delta(), matches!(self, AnyMap::Identity))
    }
}

macro_rules! dispatch {
    ($s:expr, $m:ident => $e:expr) => {
        match $s {
            AnyMap::Identity => {
                let $m = &IdentityMap;
                $e
            }
            AnyMap::V => {
                let $m = &DipoleMap;
                $e
            }
            AnyMap::Ueps(x) => {
                let $m = x;
                $e
            }
            AnyMap::Bdelta(x) => {
                let $m = x;
                $e
            }
        }
    };
}

impl AxiMap for AnyMap {
    fn name(&self) -> &'static str {
        dispatch!(self, m => m.name())
    }

    fn tag(&self, p: HalfPlanePoint) -> Result<RegionTag> {
        match self {
            // regions of the reference atlas, for the per-region breakdown
            AnyMap::Identity => crate::dipole::classify_hp(p.r, p.x3),
            _ => dispatch!(self, m => m.tag(p)),
        }
    }

    fn piece(&self, p: HalfPlanePoint) -> Result<u32> {
        dispatch!(self, m => m.piece(p))
    }

    fn eval_in<T: Real>(&self, tag: RegionTag, r: T, x3: T) -> Result<(T, T)> {
        match self {
            AnyMap::Identity => Ok((r, x3)),
            _ => dispatch!(self, m => m.eval_in(tag, r, x3)),
        }
    }

    fn exact_det(&self, p: HalfPlanePoint) -> Option<f64> {
        dispatch!(self, m => m.exact_det(p))
    }
}

const V_SCALE: f64 = 1e-10;

/// Seven patches covering {r >= 0, |x| <= 4}: the polar quarter disks a and
/// e, the shell b, the slab d in two pieces, the region f by rays from (0,1),
/// and the annulus.
pub fn meridian_domain(eps: Option<(f64, f64)>, delta: Option<f64>, smooth: bool) -> Vec<Patch> {
    let (pole, axis, face) = match eps {
        _ if smooth => (1.0, 1.0, 1.0),
        Some((e, _)) => (e * e / 16.0, e * e / 16.0, V_SCALE),
        None => (V_SCALE, 1e-8, V_SCALE),
    };
    let mut rb = Vec::new();
    if let Some((e, eg)) = eps {
        rb.extend([e, eg * eg]);
    }
    let mut lay = Vec::new();
    if let Some(d) = delta {
        lay.extend([0.5 * d, d]);
    }
    let shell: Vec<f64> = eps
        .map(|(_, eg)| vec![1.0 + std::f64::consts::SQRT_2 * eg])
        .unwrap_or_default()
        .into_iter()
        .chain(lay.iter().map(|t| 1.0 + t))
        .collect();
    let slab_v: Vec<f64> = lay.iter().flat_map(|&t| [t, 1.0 - t]).collect();
    let d0_u: Vec<f64> = rb.iter().chain(&lay).copied().collect();
    vec![
        Patch::new("a", Chart::Polar { c: 0.0 }, [0.0, 1.0], [0.5 * PI, PI])
            .anchor(Anchor::u_line(0.0, pole))
            .anchor(Anchor::u_line(1.0, face))
            .anchor(Anchor::v_line(0.5 * PI, face))
            .breaks(&rb, &[]),
        Patch::new("b", Chart::Polar { c: 0.0 }, [1.0, 3.0], [0.5 * PI, PI])
            .anchor(Anchor::u_line(1.0, face))
            .breaks(&shell, &[]),
        Patch::new("d0", Chart::Rect, [0.0, 1.0], [0.0, 1.0])
            .anchor(Anchor::u_line(0.0, axis))
            .anchor(Anchor::v_line(0.0, face))
            .anchor(Anchor::v_line(1.0, face))
            .anchor(Anchor::point(0.0, 0.0, pole))
            .anchor(Anchor::point(0.0, 1.0, pole))
            .breaks(&d0_u, &slab_v),
        Patch::new("d1", Chart::SlabOuter, [0.0, 1.0], [0.0, 1.0])
            .anchor(Anchor::point(0.0, 0.0, face))
            .anchor(Anchor::point(0.0, 1.0, face))
            .breaks(&[], &slab_v),
        Patch::new("e", Chart::Polar { c: 1.0 }, [0.0, 1.0], [0.0, 0.5 * PI])
            .anchor(Anchor::u_line(0.0, pole))
            .anchor(Anchor::v_line(0.5 * PI, face))
            .breaks(&rb, &[]),
        Patch::new("f", Chart::CapOuter, [0.0, 1.0], [0.0, 0.5 * PI])
            .anchor(Anchor::point(0.0, 0.5 * PI, face)),
        Patch::new("outer", Chart::Polar { c: 0.0 }, [3.0, 4.0], [0.0, PI])
            .breaks(&[], &[(1.0f64 / 3.0).acos(), 0.5 * PI]),
    ]
}

/// Patches covering one dipole region only.
pub fn region_domain(tag: RegionTag, eps: Option<(f64, f64)>) -> Vec<Patch> {
    let names: &[&str] = match tag {
        RegionTag::A => &["a"],
        RegionTag::B => &["b"],
        RegionTag::D => &["d0", "d1"],
        RegionTag::E => &["e"],
        RegionTag::F => &["f"],
        RegionTag::Outer => &["outer"],
        RegionTag::Whole => &["a", "b", "d0", "d1", "e", "f", "outer"],
    };
    meridian_domain(eps, None, false)
        .into_iter()
        .filter(|p| names.contains(&p.name))
        .collect()
}
