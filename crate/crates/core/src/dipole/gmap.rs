//! The auxiliary planar chart g : (r, x3) -> (s, z) on the slab 0 <= x3 <= 1.
//!
//! Near the polygonal line ABCD (distance to U at most 1/3) the radial
//! coordinate is the distance itself and z runs along ABCD. Beyond that the
//! chart is a ruled interpolation between the curve {dist = 1/3} and the
//! sphere |x| = 3.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scalar::{Dual2, Real};

const THIRD: f64 = 1.0 / 3.0;

/// Knots of the height profile of the outer curve |x| = 3.
const H_KNOTS: [(f64, f64); 5] = [(0.0, 0.0), (1.0 / 9.0, 0.4), (0.5, 0.5), (8.0 / 9.0, 0.6), (1.0, 1.0)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GPiece {
    /// x3 <= min(r, 1/3), r <= 1, and its mirror image about x3 = 1/2.
    Strip { top: bool },
    /// r < x3 <= 1/3 and its mirror image.
    Triangle { top: bool },
    /// r <= 1/3, 1/3 <= x3 <= 2/3.
    Middle,
    /// Quarter disk of radius 1/3 about the rim A = (1, 0) or D = (1, 1).
    Fan { top: bool },
    /// Distance to U at least 1/3.
    Outer,
}

impl GPiece {
    pub fn id(&self) -> u32 {
        match self {
            GPiece::Strip { top } => *top as u32,
            GPiece::Triangle { top } => 2 + *top as u32,
            GPiece::Middle => 4,
            GPiece::Fan { top } => 5 + *top as u32,
            GPiece::Outer => 7,
        }
    }
}

/// Distance to U for a meridian point of the slab.
pub fn slab_dist(r: f64, x3: f64) -> f64 {
    if r <= 1.0 {
        r.min(x3).min(1.0 - x3).max(0.0)
    } else {
        (r - 1.0).hypot(x3).min((r - 1.0).hypot(1.0 - x3))
    }
}

pub fn piece(r: f64, x3: f64) -> Result<GPiece> {
    if !(0.0..=1.0).contains(&x3) || r < 0.0 || r.hypot(x3) > 3.0 + 1e-12 {
        return Err(Error::OutsideSlab { r, x3 });
    }
    if r >= 1.0 {
        if x3 <= 0.5 && (r - 1.0).hypot(x3) <= THIRD {
            return Ok(GPiece::Fan { top: false });
        }
        if x3 > 0.5 && (r - 1.0).hypot(1.0 - x3) <= THIRD {
            return Ok(GPiece::Fan { top: true });
        }
        return Ok(GPiece::Outer);
    }
    if slab_dist(r, x3) > THIRD {
        return Ok(GPiece::Outer);
    }
    let top = x3 > 0.5;
    let xx = if top { 1.0 - x3 } else { x3 };
    Ok(if xx <= THIRD {
        if xx <= r {
            GPiece::Strip { top }
        } else {
            GPiece::Triangle { top }
        }
    } else {
        GPiece::Middle
    })
}

/// Height profile h(w) of the outer curve and its slope.
fn height(w: f64) -> (f64, f64) {
    for k in 0..H_KNOTS.len() - 1 {
        let (w0, h0) = H_KNOTS[k];
        let (w1, h1) = H_KNOTS[k + 1];
        if w <= w1 || k == H_KNOTS.len() - 2 {
            let sl = (h1 - h0) / (w1 - w0);
            return (h0 + sl * (w - w0), sl);
        }
    }
    unreachable!()
}

/// Outer curve on |x| = 3 and its derivative in w.
pub fn c_out(w: f64) -> ([f64; 2], [f64; 2]) {
    let (h, dh) = height(w);
    let r = (9.0 - h * h).sqrt();
    ([r, h], [-h * dh / r, dh])
}

/// Inner curve {dist = 1/3}, parametrised so that the near chart sends
/// c_in(w) to (1/3, 3w).
pub fn c_in(w: f64) -> ([f64; 2], [f64; 2]) {
    if w > 0.5 {
        let (p, d) = c_in(1.0 - w);
        return ([p[0], 1.0 - p[1]], [-d[0], d[1]]);
    }
    if w <= 1.0 / 9.0 {
        let t = 4.5 * PI * w;
        (
            [1.0 + THIRD * t.cos(), THIRD * t.sin()],
            [-1.5 * PI * t.sin(), 1.5 * PI * t.cos()],
        )
    } else if w <= THIRD {
        ([4.0 * THIRD - 3.0 * w, THIRD], [-3.0, 0.0])
    } else {
        ([THIRD, w], [0.0, 1.0])
    }
}

/// Radius of the image of the outer curve.
pub fn s_out<T: Real>(w: T) -> T {
    T::cst(2.0) + w * T::cst(2.0 * std::f64::consts::SQRT_2 - 3.0)
}

/// Ruled map X(u, w) = (1-u) c_in(w) + u c_out(w) and its Jacobian
/// [[dX/du, dX/dw]] stored column-wise.
pub fn ruled(u: f64, w: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let (a, da) = c_in(w);
    let (b, db) = c_out(w);
    let p = [(1.0 - u) * a[0] + u * b[0], (1.0 - u) * a[1] + u * b[1]];
    let xu = [b[0] - a[0], b[1] - a[1]];
    let xw = [(1.0 - u) * da[0] + u * db[0], (1.0 - u) * da[1] + u * db[1]];
    (p, [xu, xw])
}

pub fn ruled_det(u: f64, w: f64) -> f64 {
    let (_, [xu, xw]) = ruled(u, w);
    xu[0] * xw[1] - xu[1] * xw[0]
}

/// Inverse of the ruled map: the ruling through p is located by bisection
/// on the signed area, then u by projection.
pub fn ruled_inverse(r: f64, x3: f64) -> Result<(f64, f64)> {
    let side = |w: f64| {
        let (a, _) = c_in(w);
        let (b, _) = c_out(w);
        (b[0] - a[0]) * (x3 - a[1]) - (b[1] - a[1]) * (r - a[0])
    };
    let w = if x3 <= 0.0 {
        0.0
    } else if x3 >= 1.0 {
        1.0
    } else {
        crate::numerics::bisect(side, 0.0, 1.0, 200)?
    };
    let (a, _) = c_in(w);
    let (b, _) = c_out(w);
    let d = [b[0] - a[0], b[1] - a[1]];
    let u = ((r - a[0]) * d[0] + (x3 - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
    Ok((u, w))
}

fn fan<T: Real>(dr: T, dz: T) -> (T, T) {
    let rho = dr.hypot(dz);
    let th = dz.atan2(dr);
    (rho, rho * th * T::cst(2.0 / PI))
}

fn lower_half<T: Real>(p: GPiece, r: T, x3: T) -> (T, T) {
    let one = T::cst(1.0);
    match p {
        GPiece::Strip { .. } => (x3, one - r + x3),
        GPiece::Triangle { .. } => (r, one + x3 - r),
        _ => unreachable!(),
    }
}

/// g(r, x3) = (s, z).
pub fn g_map<T: Real>(r: T, x3: T) -> Result<(T, T)> {
    let p = piece(r.value(), x3.value())?;
    g_in(p, r, x3)
}

/// g evaluated with the formula of a given piece.
pub fn g_in<T: Real>(p: GPiece, r: T, x3: T) -> Result<(T, T)> {
    let one = T::cst(1.0);
    let three = T::cst(3.0);
    Ok(match p {
        GPiece::Strip { top: false } | GPiece::Triangle { top: false } => lower_half(p, r, x3),
        GPiece::Strip { top: true } | GPiece::Triangle { top: true } => {
            let (s, z) = lower_half(p, r, one - x3);
            (s, three - z)
        }
        GPiece::Middle => (
            r,
            T::cst(1.5) + (x3 - T::cst(0.5)) * (one + T::cst(6.0) * r),
        ),
        GPiece::Fan { top: false } => fan(r - one, x3),
        GPiece::Fan { top: true } => {
            let (s, z) = fan(r - one, one - x3);
            (s, three - z)
        }
        GPiece::Outer => {
            let (u0, w0) = ruled_inverse(r.value(), x3.value())?;
            let (x, [xu, xw]) = ruled(u0, w0);
            let det = xu[0] * xw[1] - xu[1] * xw[0];
            if det <= 0.0 {
                return Err(Error::SingularPoint { r: r.value(), x3: x3.value() });
            }
            // one Newton step in T carries the exact derivative of X^{-1}
            let er = r - T::cst(x[0]);
            let ez = x3 - T::cst(x[1]);
            let u = T::cst(u0) + (er * T::cst(xw[1]) - ez * T::cst(xw[0])) / T::cst(det);
            let w = T::cst(w0) + (ez * T::cst(xu[0]) - er * T::cst(xu[1])) / T::cst(det);
            let third = T::cst(THIRD);
            (third + u * (s_out(w) - third), three * w)
        }
    })
}

/// Planar Jacobian determinant of g.
pub fn g_jacobian_det(r: f64, x3: f64) -> Result<f64> {
    let (s, z) = g_map(Dual2::var(r, 0), Dual2::var(x3, 1))?;
    Ok(s.d[0] * z.d[1] - s.d[1] * z.d[0])
}

/// The fan angle normalisation keeps z continuous with the strip at r = 1.
pub const FAN_JACOBIAN: f64 = 2.0 / PI;
