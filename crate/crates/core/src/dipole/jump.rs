//! Traces of the inverse of v on the bubble sphere and the total variation
//! of its jump part.

use std::f64::consts::PI;

use serde::Serialize;

use super::from_polar;
use crate::error::{Error, Result};
use crate::geom::HalfPlanePoint;
use crate::numerics::{invert_increasing, pairwise_sum, UnitRule};

/// Point of the bubble at image polar angle `theta` in [0, pi/2].
pub fn bubble_point(theta: f64) -> HalfPlanePoint {
    let (r, z) = from_polar(theta.cos(), theta);
    HalfPlanePoint::new(r, z)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct JumpTrace {
    pub theta: f64,
    pub y: HalfPlanePoint,
    /// Preimage approached from region a.
    pub inner: HalfPlanePoint,
    /// Preimage approached from region e.
    pub outer: HalfPlanePoint,
    pub jump: [f64; 2],
    pub magnitude: f64,
    /// max of |v(inner) - y|, |v(outer) - y|
    pub residual: f64,
}

/// Invert the radial profiles of regions a and e along the rays that reach
/// y(theta).
pub fn jump_trace(theta: f64) -> Result<JumpTrace> {
    let y = bubble_point(theta);
    let target = theta.cos();
    let c = theta.cos();
    let fail = || Error::TraceInversionFailed { theta };
    let tol = 1e-15;
    // region a: image radius (1 - rho) cos(theta) along the ray phi = pi - theta
    let rho_in = invert_increasing(|t| -(1.0 - t) * c, |_| c, -target, 0.0, 1.0, tol)
        .map_err(|_| fail())?;
    // region e: image radius (1 + rho) cos(theta) along the ray phi = theta
    let rho_out = invert_increasing(|t| (1.0 + t) * c, |_| c, target, 0.0, 1.0, tol)
        .map_err(|_| fail())?;
    let phi_in = PI - theta;
    let inner = HalfPlanePoint::new(rho_in * phi_in.sin(), rho_in * phi_in.cos());
    let outer = HalfPlanePoint::new(rho_out * theta.sin(), 1.0 + rho_out * theta.cos());
    let img_in = from_polar((1.0 - rho_in) * theta.cos(), theta);
    let img_out = from_polar((1.0 + rho_out) * theta.cos(), theta);
    let residual = (img_in.0 - y.r)
        .hypot(img_in.1 - y.x3)
        .max((img_out.0 - y.r).hypot(img_out.1 - y.x3));
    let jump = [outer.r - inner.r, outer.x3 - inner.x3];
    Ok(JumpTrace {
        theta,
        y,
        inner,
        outer,
        jump,
        magnitude: jump[0].hypot(jump[1]),
        residual,
    })
}

/// Traces at the Gauss nodes of an `n`-point rule on [0, pi/2].
pub fn jump_traces(n: usize) -> Result<Vec<(JumpTrace, f64)>> {
    let rule = UnitRule::new(n);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| jump_trace(0.5 * PI * t).map(|j| (j, 0.5 * PI * w)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularNorm {
    /// Integral of the jump magnitude over the bubble.
    pub total: f64,
    /// Area of the bubble from the same rule.
    pub area: f64,
    pub amplitude_min: f64,
    pub amplitude_max: f64,
    pub max_residual: f64,
    pub nodes: usize,
}

/// Surface element of the bubble in the angle theta is pi sin(2 theta).
pub fn singular_inverse_norm(n: usize) -> Result<SingularNorm> {
    let traces = jump_traces(n)?;
    let dens = |t: f64| PI * (2.0 * t).sin();
    let parts: Vec<f64> = traces
        .iter()
        .map(|(j, w)| w * dens(j.theta) * j.magnitude)
        .collect();
    let area: Vec<f64> = traces.iter().map(|(j, w)| w * dens(j.theta)).collect();
    let mags = traces.iter().map(|(j, _)| j.magnitude);
    Ok(SingularNorm {
        total: pairwise_sum(&parts),
        area: pairwise_sum(&area),
        amplitude_min: mags.clone().fold(f64::INFINITY, f64::min),
        amplitude_max: mags.fold(f64::NEG_INFINITY, f64::max),
        max_residual: traces.iter().map(|(j, _)| j.residual).fold(0.0, f64::max),
        nodes: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dipole::{bubble_side, DipoleMap};
    use crate::geom::AxiMap;

    #[test]
    fn total_is_pi_and_amplitude_one() {
        let s = singular_inverse_norm(64).unwrap();
        assert!((s.total - PI).abs() < 1e-12);
        assert!((s.area - PI).abs() < 1e-12);
        assert!((s.amplitude_min - 1.0).abs() < 1e-12);
        assert!((s.amplitude_max - 1.0).abs() < 1e-12);
        assert!(s.max_residual < 1e-12);
    }

    #[test]
    fn equator_amplitude_and_bubble_membership() {
        let j = jump_trace(PI / 4.0).unwrap();
        assert!((j.magnitude - 1.0).abs() < 1e-12);
        assert!(bubble_side(j.y).abs() < 1e-14);
    }

    #[test]
    fn traces_are_limits_of_v_from_each_side() {
        let v = DipoleMap;
        for k in 1..10 {
            let th = 0.15 * k as f64;
            let j = jump_trace(th).unwrap();
            let t = 1e-7;
            let a = v.eval(HalfPlanePoint::new(t * (PI - th).sin(), t * (PI - th).cos())).unwrap();
            let e = v.eval(HalfPlanePoint::new(t * th.sin(), 1.0 + t * th.cos())).unwrap();
            assert!((a.r - j.y.r).hypot(a.x3 - j.y.x3) < 1e-6);
            assert!((e.r - j.y.r).hypot(e.x3 - j.y.x3) < 1e-6);
        }
    }
}
