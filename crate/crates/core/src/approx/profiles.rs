//! Scalar profiles of the regularised maps: f_eps and its inverse g_eps,
//! the tube radius omega_eps, the rescaled radius r_hat, h_eps and the
//! radial boundary profiles of the cap regions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::gauss64;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpsProfileSet {
    pub eps: f64,
    pub gamma: f64,
    /// eps^gamma
    pub eg: f64,
    /// arctan(eps)
    pub alpha: f64,
    /// f_eps'(eps)
    pub fp_eps: f64,
    pub eta: f64,
}

impl EpsProfileSet {
    pub fn new(eps: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0 / 3.0 + 1e-15) {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} violates 0 < gamma <= 1/3"
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParams(format!("eps = {eps} must lie in (0, 1)")));
        }
        let eg = eps.powf(gamma);
        if eg * eg <= eps || eg * eg >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "eps^(2 gamma) = {} must lie in (eps, 1)",
                eg * eg
            )));
        }
        let alpha = eps.atan();
        let mut p = EpsProfileSet {
            eps,
            gamma,
            eg,
            alpha,
            fp_eps: 0.0,
            eta: 0.0,
        };
        p.fp_eps = p.fp(eps);
        p.eta = ((2.0 * eg).powi(3) + 3.0 * eps / p.fp_eps).cbrt();
        Ok(p)
    }

    fn e2(&self) -> f64 {
        self.eps * self.eps
    }

    pub fn f(&self, r: f64) -> f64 {
        (r / self.e2()).atan() + self.alpha * r / self.eps
    }

    pub fn fp(&self, r: f64) -> f64 {
        let t = r / self.e2();
        1.0 / (self.e2() * (1.0 + t * t)) + self.alpha / self.eps
    }

    pub fn fpp(&self, r: f64) -> f64 {
        let t = r / self.e2();
        -2.0 * t / (self.e2() * self.e2() * (1.0 + t * t).powi(2))
    }

    pub fn f_t<T: Real>(&self, r: T) -> T {
        (r / T::cst(self.e2())).atan() + r * T::cst(self.alpha / self.eps)
    }

    pub fn fp_t<T: Real>(&self, r: T) -> T {
        let t = r / T::cst(self.e2());
        T::cst(1.0 / self.e2()) / (T::cst(1.0) + t * t) + T::cst(self.alpha / self.eps)
    }

    /// f_eps(eps); equals pi/2 because arctan(1/eps) + arctan(eps) = pi/2.
    pub fn f_end(&self) -> f64 {
        self.f(self.eps)
    }

    /// Inverse of f_eps on [0, f_eps(eps)] by safeguarded Newton iteration.
    pub fn g(&self, t: f64) -> Result<f64> {
        let top = self.f_end();
        if !(-1e-15..=top + 1e-12).contains(&t) {
            return Err(Error::OutOfRange { value: t, lo: 0.0, hi: top });
        }
        let t = t.clamp(0.0, top);
        let (mut lo, mut hi) = (0.0, self.eps);
        // f is concave, so Newton from the left of the root overshoots
        // at most once; the bracket absorbs that.
        let mut x = (self.e2() * t.min(1.5).tan() / (1.0 + self.alpha * self.eps)).clamp(lo, hi);
        for _ in 0..100 {
            let fx = self.f(x) - t;
            if fx == 0.0 {
                return Ok(x);
            }
            if fx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let mut nx = x - fx / self.fp(x);
            if !(nx > lo && nx < hi) {
                nx = 0.5 * (lo + hi);
            }
            if (nx - x).abs() <= 1e-17 * self.eps.max(x) || hi - lo <= 1e-18 * self.eps {
                return Ok(nx);
            }
            x = nx;
        }
        Err(Error::BracketFailure { lo, hi })
    }

    pub fn g_t<T: Real>(&self, phi: T) -> T {
        let r = self.g(phi.value()).unwrap_or(f64::NAN);
        phi.lift(r, 1.0 / self.fp(r))
    }

    /// g_eps'(phi) = 1 / f_eps'(g_eps(phi)).
    pub fn gp_t<T: Real>(&self, phi: T) -> T {
        let r = self.g(phi.value()).unwrap_or(f64::NAN);
        let fp = self.fp(r);
        phi.lift(1.0 / fp, -self.fpp(r) / fp.powi(3))
    }

    /// g_eps(phi) / sin(phi), continuous at phi = 0.
    pub fn g_over_sin_t<T: Real>(&self, phi: T) -> T {
        if phi.value().abs() < 1e-7 {
            T::cst(self.e2() / (1.0 + self.alpha * self.eps))
        } else {
            self.g_t(phi) / phi.sin()
        }
    }

    /// omega_eps(z) on [0, 3].
    pub fn omega_t<T: Real>(&self, z: T) -> T {
        let zv = z.value();
        let one = T::cst(1.0);
        if zv <= 1.0 {
            T::cst(self.eg) * (one + z)
        } else if zv <= 2.0 {
            (T::cst((2.0 * self.eg).powi(3)) + (z - one) * T::cst(3.0 * self.eps / self.fp_eps)).cbrt()
        } else {
            (T::cst(3.0) - z) * T::cst(self.eta) + (z - T::cst(2.0)) * T::cst(6.0 * self.eg)
        }
    }

    pub fn omega(&self, z: f64) -> Result<f64> {
        if !(0.0..=3.0).contains(&z) {
            return Err(Error::OutOfRange { value: z, lo: 0.0, hi: 3.0 });
        }
        Ok(self.omega_t(z))
    }

    /// Rescaled radius: maps (eps, eps^(2 gamma)] onto (0, eps^(2 gamma)].
    pub fn r_hat_t<T: Real>(&self, r: T) -> T {
        let e2g = self.eg * self.eg;
        if r.value() <= e2g {
            (r - T::cst(self.eps)) * r / T::cst(e2g - self.eps)
        } else {
            r
        }
    }

    pub fn r_hat(&self, r: f64) -> f64 {
        self.r_hat_t(r)
    }

    /// h_eps(s, phi).
    pub fn h(&self, s: f64, phi: f64) -> f64 {
        let g = self.g(phi).unwrap_or(f64::NAN);
        let gp = 1.0 / self.fp(g);
        let gs = self.g_over_sin_t(phi);
        self.eps
            * ((1.0 - s) * gs + s * self.eps)
            * ((1.0 - s) * gp * phi.cos() + s * (self.eps - g * phi.sin()))
    }

    /// Integral of h_eps(., phi) over [0, s], in closed form (h is a
    /// quadratic polynomial in s).
    pub fn h_integral_t<T: Real>(&self, s: T, phi: T) -> T {
        let e = T::cst(self.eps);
        let a = self.g_over_sin_t(phi);
        let b = e - a;
        let c = self.gp_t(phi) * phi.cos();
        let d = e - self.g_t(phi) * phi.sin() - c;
        e * (a * c * s
            + (a * d + b * c) * s * s * T::cst(0.5)
            + b * d * s * s * s * T::cst(1.0 / 3.0))
    }

    /// Integral of h_eps(., phi) over [0, 1] by the 64-node Gauss rule.
    pub fn h_integral_gauss(&self, phi: f64) -> f64 {
        gauss64().integrate(0.0, 1.0, |s| self.h(s, phi))
    }

    /// Cube of the image radius of the top of the tube at image angle phi.
    pub fn tube_top_cube_t<T: Real>(&self, phi: T) -> T {
        let g = self.g_t(phi);
        let base = phi.cos() + T::cst(2.0 * self.eg);
        base.cube() + T::cst(3.0) * self.g_over_sin_t(phi) / self.fp_t(g)
    }

    /// u_rho(eps, phi): image radius of the sphere of radius eps about e3.
    pub fn u_rho_eps_t<T: Real>(&self, phi: T) -> T {
        (self.tube_top_cube_t(phi) + T::cst(3.0) * self.h_integral_t(T::cst(1.0), phi)).cbrt()
    }

    /// Mirror profile below the tube: image radius of the sphere of radius
    /// eps about the origin.
    pub fn u_a_t<T: Real>(&self, phi: T) -> T {
        let base = phi.cos() + T::cst(2.0 * self.eg);
        (base.cube() - T::cst(3.0) * self.h_integral_t(T::cst(1.0), phi)).cbrt()
    }

    /// Radial profile of region e_eps, eps <= rho <= 1, 0 <= phi <= pi/2,
    /// with the inner value u_rho(eps, phi) built from the 64-node rule.
    pub fn u_rho_e(&self, rho: f64, phi: f64) -> Result<f64> {
        if !(self.eps..=1.0).contains(&rho) {
            return Err(Error::OutOfRange { value: rho, lo: self.eps, hi: 1.0 });
        }
        let g = self.g(phi)?;
        let inner = ((phi.cos() + 2.0 * self.eg).powi(3)
            + 3.0 * self.g_over_sin_t(phi) / self.fp(g)
            + 3.0 * self.h_integral_gauss(phi))
        .cbrt();
        let w = self.r_hat(rho);
        Ok((1.0 - w) * inner + w * (2.0 * phi.cos() + 6.0 * self.eg))
    }

    /// The same profile with the linear weights (1-rho)/(1-eps),
    /// (rho-eps)/(1-eps).
    pub fn u_rho_e_linear(&self, rho: f64, phi: f64) -> f64 {
        let inner = self.u_rho_eps_t(phi);
        let w = (rho - self.eps) / (1.0 - self.eps);
        (1.0 - w) * inner + w * (2.0 * phi.cos() + 6.0 * self.eg)
    }

    /// CSV dump of omega_eps on [0,3] and f_eps on [0, eps].
    pub fn profile_csv(&self, n: usize) -> String {
        let mut s = String::from("kind,x,value\n");
        for k in 0..=n {
            let z = 3.0 * k as f64 / n as f64;
            s.push_str(&format!("omega,{:.17e},{:.17e}\n", z, self.omega_t(z)));
        }
        for k in 0..=n {
            let r = self.eps * k as f64 / n as f64;
            s.push_str(&format!("f,{:.17e},{:.17e}\n", r, self.f(r)));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn prof(eps: f64) -> EpsProfileSet {
        EpsProfileSet::new(eps, 1.0 / 3.0).unwrap()
    }

    #[test]
    fn f_endpoint_is_a_right_angle() {
        for eps in [1e-1, 3e-2, 1e-2, 3e-3] {
            let p = prof(eps);
            assert_eq!(p.f(0.0), 0.0);
            assert!((p.f_end() - PI / 2.0).abs() < 1e-14);
            assert!((p.g(p.f_end()).unwrap() - eps).abs() < 1e-14 * eps.max(1e-3));
        }
        // direct evaluation at eps = 1e-2
        let p = prof(1e-2);
        assert!((p.f(1e-2) - (100f64.atan() + 0.01f64.atan())).abs() < 1e-15);
    }

    #[test]
    fn g_inverts_f() {
        for eps in [1e-1, 1e-2, 3e-3] {
            let p = prof(eps);
            for k in 0..=500 {
                let t = p.f_end() * k as f64 / 500.0;
                let r = p.g(t).unwrap();
                assert!((p.f(r) - t).abs() <= 1e-12, "{eps} {t}");
            }
        }
    }

    #[test]
    fn omega_anchors_and_bounds() {
        let p = prof(1e-2);
        assert!((p.omega(0.0).unwrap() - p.eg).abs() < 1e-15);
        assert!((p.omega(1.0).unwrap() - 2.0 * p.eg).abs() < 1e-15);
        assert!((p.omega(2.0).unwrap() - p.eta).abs() < 1e-15);
        assert!((p.omega(3.0).unwrap() - 6.0 * p.eg).abs() < 1e-14);
        let mut prev = 0.0;
        for k in 0..=3000 {
            let w = p.omega(3.0 * k as f64 / 3000.0).unwrap();
            assert!(w >= prev && w >= p.eg - 1e-15 && w <= 6.0 * p.eg + 1e-14);
            prev = w;
        }
        assert!(p.omega(3.5).is_err());
    }

    #[test]
    fn eta_matches_profile_at_equator() {
        for eps in [1e-1, 1e-2, 3e-3] {
            let p = prof(eps);
            let u = p.u_rho_e(eps, PI / 2.0).unwrap();
            assert!((u - p.eta).abs() < 1e-12 * p.eta);
        }
    }

    #[test]
    fn h_integral_closed_form_matches_gauss() {
        let p = prof(1e-2);
        for k in 1..50 {
            let phi = 0.5 * PI * k as f64 / 50.0;
            let a = p.h_integral_t(1.0, phi);
            let b = p.h_integral_gauss(phi);
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-12), "{phi} {a} {b}");
        }
    }

    #[test]
    fn radial_profile_endpoints_and_bounds() {
        let p = prof(1e-2);
        assert!((p.u_rho_e(1.0, 0.0).unwrap() - (2.0 + 6.0 * p.eg)).abs() < 1e-14);
        for k in 0..=1000 {
            let phi = 0.5 * PI * k as f64 / 1000.0;
            let u = p.u_rho_e(p.eps, phi).unwrap();
            assert!(u >= phi.cos() && u <= phi.cos() + 6.0 * p.eg, "{phi} {u}");
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(EpsProfileSet::new(1e-2, 0.5).is_err());
        assert!(EpsProfileSet::new(0.0, 0.25).is_err());
        assert!(EpsProfileSet::new(1e-2, 0.25).is_ok());
    }
}
