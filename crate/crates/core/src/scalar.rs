//! Scalar abstraction shared by plain evaluation and forward-mode
//! differentiation.
//!
//! Every map in this crate is written once against [`Real`]. Evaluating
//! with `f64` gives values; evaluating with [`Dual2`] seeded on the two
//! meridian coordinates gives exact planar Jacobians.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn value(self) -> f64;

    /// Apply a scalar function whose value `f` and derivative `df` at
    /// `self.value()` are already known.
    fn lift(self, f: f64, df: f64) -> Self;

    fn sin(self) -> Self {
        let v = self.value();
        self.lift(v.sin(), v.cos())
    }
    fn cos(self) -> Self {
        let v = self.value();
        self.lift(v.cos(), -v.sin())
    }
    fn atan(self) -> Self {
        let v = self.value();
        self.lift(v.atan(), 1.0 / (1.0 + v * v))
    }
    fn sqrt(self) -> Self {
        let v = self.value();
        let s = v.sqrt();
        self.lift(s, if s > 0.0 { 0.5 / s } else { f64::INFINITY })
    }
    fn cbrt(self) -> Self {
        let v = self.value();
        let c = v.cbrt();
        self.lift(c, if c != 0.0 { 1.0 / (3.0 * c * c) } else { f64::INFINITY })
    }
    fn powf(self, p: f64) -> Self {
        let v = self.value();
        self.lift(v.powf(p), p * v.powf(p - 1.0))
    }
    fn exp(self) -> Self {
        let e = self.value().exp();
        self.lift(e, e)
    }
    fn ln(self) -> Self {
        let v = self.value();
        self.lift(v.ln(), 1.0 / v)
    }
    fn abs(self) -> Self {
        if self.value() < 0.0 {
            -self
        } else {
            self
        }
    }
    fn sq(self) -> Self {
        self * self
    }
    fn cube(self) -> Self {
        self * self * self
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    /// Four-quadrant arctangent of `self / x`.
    fn atan2(self, x: Self) -> Self;
}

impl Real for f64 {
    #[inline]
    fn cst(x: f64) -> Self {
        x
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn lift(self, f: f64, _df: f64) -> Self {
        f
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn atan(self) -> Self {
        f64::atan(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn cbrt(self) -> Self {
        f64::cbrt(self)
    }
    #[inline]
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
}

/// Value plus gradient with respect to two seeded inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual2 {
    pub v: f64,
    pub d: [f64; 2],
}

impl Dual2 {
    pub fn var(v: f64, slot: usize) -> Self {
        let mut d = [0.0; 2];
        d[slot] = 1.0;
        Dual2 { v, d }
    }
}

impl Add for Dual2 {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual2 {
            v: self.v + o.v,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1]],
        }
    }
}

impl Sub for Dual2 {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual2 {
            v: self.v - o.v,
            d: [self.d[0] - o.d[0], self.d[1] - o.d[1]],
        }
    }
}

impl Mul for Dual2 {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual2 {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
            ],
        }
    }
}

impl Div for Dual2 {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.v;
        let q = self.v * inv;
        Dual2 {
            v: q,
            d: [
                (self.d[0] - q * o.d[0]) * inv,
                (self.d[1] - q * o.d[1]) * inv,
            ],
        }
    }
}

impl Neg for Dual2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual2 {
            v: -self.v,
            d: [-self.d[0], -self.d[1]],
        }
    }
}

impl Real for Dual2 {
    #[inline]
    fn cst(x: f64) -> Self {
        Dual2 { v: x, d: [0.0; 2] }
    }
    #[inline]
    fn value(self) -> f64 {
        self.v
    }
    #[inline]
    fn lift(self, f: f64, df: f64) -> Self {
        Dual2 {
            v: f,
            d: [df * self.d[0], df * self.d[1]],
        }
    }
    fn atan2(self, x: Self) -> Self {
        let a = self.v.atan2(x.v);
        let r2 = x.v * x.v + self.v * self.v;
        if r2 == 0.0 {
            return Dual2::cst(a);
        }
        // d atan2(y, x) = (x dy - y dx) / r^2
        Dual2 {
            v: a,
            d: [
                (x.v * self.d[0] - self.v * x.d[0]) / r2,
                (x.v * self.d[1] - self.v * x.d[1]) / r2,
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-6;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn elementary_derivatives_match_central_differences() {
        let x = 0.7_f64;
        let d = Dual2::var(x, 0);
        let cases: Vec<(Dual2, f64)> = vec![
            (d.sin(), fd(f64::sin, x)),
            (d.cos(), fd(f64::cos, x)),
            (d.atan(), fd(f64::atan, x)),
            (d.sqrt(), fd(f64::sqrt, x)),
            (d.cbrt(), fd(f64::cbrt, x)),
            (d.powf(1.3), fd(|t| t.powf(1.3), x)),
            (d.exp(), fd(f64::exp, x)),
            (d.ln(), fd(f64::ln, x)),
            (d * d / (d + Dual2::cst(1.0)), fd(|t| t * t / (t + 1.0), x)),
        ];
        for (got, want) in cases {
            assert!((got.d[0] - want).abs() < 1e-8, "{got:?} vs {want}");
            assert_eq!(got.d[1], 0.0);
        }
    }

    #[test]
    fn atan2_gradient_in_all_quadrants() {
        for &(y, x) in &[(0.3, 0.5), (0.3, -0.5), (-0.3, -0.5), (-0.3, 0.5)] {
            let a = Dual2::var(y, 0).atan2(Dual2::var(x, 1));
            assert!((a.v - f64::atan2(y, x)).abs() < 1e-15);
            assert!((a.d[0] - fd(|t| t.atan2(x), y)).abs() < 1e-8);
            assert!((a.d[1] - fd(|t| y.atan2(t), x)).abs() < 1e-8);
        }
    }
}
