//! Continuum limits of the boundary chains: the killed Brownian and
//! 3-dimensional Bessel kernels, the Yakubovich kernel, the limiting
//! initial densities, and drivers comparing them with exact lattice laws.

mod limits;

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::qspecial::{bessel_k_imag, bessel_k_imag_many, inv_gamma_abs_imag_sq};
use crate::quad::{GaussLegendre, QuadPolicy};

pub use limits::{
    initial_limit_fixed_q, initial_limit_q_to_1, joint_mass_fixed_q, joint_mass_q_to_1,
    local_limit_error_fixed_q, local_limit_error_q_to_1, local_limit_table, ErrorRow, IndexMap,
    LimitComparison, Regime,
};

/// Arguments `e^{-x}` below this make `K_{iu}(e^{-x})` oscillate too fast in
/// `x` for the fixed quadrature grid.
pub const MIN_BESSEL_ARG: f64 = 1e-8;

/// Time `t`, endpoints `x → y` and the time dilation `σ` of a kernel query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuery {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
}

impl KernelQuery {
    pub fn new(t: f64, x: f64, y: f64, sigma: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain("kernel", format!("t must be positive, got {t}")));
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::domain("kernel", "x and y must be finite"));
        }
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::invalid(format!("sigma must lie in (0, 1], got {sigma}")));
        }
        Ok(KernelQuery { t, x, y, sigma })
    }

    /// `t / (1 + σ)`.
    pub fn dilated_time(&self) -> f64 {
        self.t / (1.0 + self.sigma)
    }
}

/// `𝗊_t(x, y) = (2πt)^{-1/2} (e^{-(y-x)²/2t} - e^{-(y+x)²/2t})`, the
/// transition density of Brownian motion killed at 0.
pub fn killed_bm_kernel(t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t > 0.0 && x > 0.0 && y > 0.0) || !(t.is_finite() && x.is_finite() && y.is_finite()) {
        return Err(Error::domain(
            "killed_bm_kernel",
            format!("need t, x, y > 0, got ({t}, {x}, {y})"),
        ));
    }
    // e^{-a} - e^{-b} = e^{-a}(1 - e^{-(b-a)}) with b - a = 2xy/t
    let a = (y - x).powi(2) / (2.0 * t);
    Ok((-a).exp() * -(-2.0 * x * y / t).exp_m1() / (2.0 * PI * t).sqrt())
}

/// `(y/x) 𝗊_{t/(1+σ)}(x, y)`, the transition density of the
/// 3-dimensional Bessel process run at speed `1/(1+σ)`.
pub fn bessel3d_transition(q: &KernelQuery) -> Result<f64> {
    Ok(q.y / q.x * killed_bm_kernel(q.dilated_time(), q.x, q.y)?)
}

/// `c² x e^{-cx}` on `x > 0`.
pub fn xi0_density(x: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("c must be positive, got {c}")));
    }
    Ok(if x > 0.0 { c * c * x * (-c * x).exp() } else { 0.0 })
}

fn bessel_arg(x: f64) -> Result<f64> {
    let z = (-x).exp();
    if z < MIN_BESSEL_ARG {
        return Err(Error::AccuracyLoss {
            func: "yakubovich_kernel",
            detail: format!("e^(-x) = {z:e} is below {MIN_BESSEL_ARG:e} at x = {x}"),
        });
    }
    Ok(z)
}

/// Upper limit of the spectral integral: `e^{-tU²/2} < e^{-40}`.
pub fn yakubovich_cutoff(t: f64) -> f64 {
    (80.0 / t).sqrt().max(10.0)
}

/// `𝗉_t(x, y) = (2/π) ∫₀^∞ e^{-tu²/2} K_{iu}(e^{-x}) K_{iu}(e^{-y}) du / |Γ(iu)|²`,
/// truncated at [`yakubovich_cutoff`] and evaluated by panel doubling.
pub fn yakubovich_kernel(t: f64, x: f64, y: f64, quad: &QuadPolicy) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("yakubovich_kernel", format!("t must be positive, got {t}")));
    }
    let (zx, zy) = (bessel_arg(x)?, bessel_arg(y)?);
    let upper = yakubovich_cutoff(t);
    let rule = GaussLegendre::new(16);
    let estimate = |panels: usize| -> Result<(f64, f64)> {
        let h = upper / panels as f64;
        let mut us = Vec::with_capacity(panels * 16);
        let mut ws = Vec::with_capacity(panels * 16);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (&node, &w) in rule.nodes().iter().zip(rule.weights()) {
                us.push(mid + 0.5 * h * node);
                ws.push(0.5 * h * w);
            }
        }
        let kx = bessel_k_imag_many(&us, zx)?;
        let ky = if zy == zx { kx.clone() } else { bessel_k_imag_many(&us, zy)? };
        let mut sum = 0.0;
        let mut mag = 0.0;
        for i in 0..us.len() {
            let u = us[i];
            let v = ws[i] * (-t * u * u / 2.0).exp() * kx[i] * ky[i] * inv_gamma_abs_imag_sq(u);
            sum += v;
            mag += v.abs();
        }
        Ok((2.0 / PI * sum, 2.0 / PI * mag))
    };
    let mut panels = quad.initial_panels.max(2);
    let (mut prev, _) = estimate(panels)?;
    loop {
        panels *= 2;
        if panels * 16 > quad.max_nodes {
            return Err(Error::NonConvergence {
                what: "yakubovich_kernel",
                limit: quad.max_nodes,
            });
        }
        let (cur, mag) = estimate(panels)?;
        let tol = (quad.rel_tol * cur.abs()).max(quad.abs_tol).max(64.0 * f64::EPSILON * mag);
        if (cur - prev).abs() <= tol {
            return Ok(cur.max(0.0));
        }
        prev = cur;
    }
}

/// `[K₀(e^{-y}) / K₀(e^{-x})] 𝗉_{t/(1+σ)}(x, y)`.
pub fn zeta_transition(q: &KernelQuery, quad: &QuadPolicy) -> Result<f64> {
    let ratio = bessel_k_imag(0.0, bessel_arg(q.y)?)? / bessel_k_imag(0.0, bessel_arg(q.x)?)?;
    Ok(ratio * yakubovich_kernel(q.dilated_time(), q.x, q.y, quad)?)
}

/// `4 / (2^c Γ(c/2)²) · e^{-cx} K₀(e^{-x})`.
pub fn zeta0_density(x: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("c must be positive, got {c}")));
    }
    if !x.is_finite() {
        return Err(Error::domain("zeta0_density", "x must be finite"));
    }
    let z = (-x).exp();
    if z > 700.0 {
        return Ok(0.0);
    }
    let g = gamma(c / 2.0);
    Ok(4.0 / (2f64.powf(c) * g * g) * (-c * x).exp() * bessel_k_imag(0.0, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, integrate_segments};
    use approx::assert_relative_eq;
    use statrs::function::erf::erf;

    #[test]
    fn killed_kernel_values() {
        let v = killed_bm_kernel(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, (1.0 - (-2.0f64).exp()) / (2.0 * PI).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(v, 0.344954, max_relative = 1e-5);
        assert!(killed_bm_kernel(1.0, 1.0, 1e-12).unwrap() < 1e-11);
        assert!(killed_bm_kernel(0.0, 1.0, 1.0).is_err());
        assert!(killed_bm_kernel(1.0, -1.0, 1.0).is_err());
        for (t, x, y) in [(0.3, 0.5, 2.0), (2.0, 1.5, 0.1)] {
            let k = killed_bm_kernel(t, x, y).unwrap();
            let gauss = (-(y - x) * (y - x) / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
            assert!(k >= 0.0 && k <= gauss);
            assert_relative_eq!(k, killed_bm_kernel(t, y, x).unwrap(), max_relative = 1e-15);
        }
    }

    #[test]
    fn killed_mass_is_erf() {
        let pol = QuadPolicy::default().with_rel_tol(1e-13);
        let mass = integrate_segments(|y| killed_bm_kernel(1.0, 1.0, y).unwrap(), &[0.0, 1.0, 4.0, 12.0], &pol).unwrap();
        // statrs erf is accurate to about 1e-10 here
        assert_relative_eq!(mass, erf(1.0 / 2f64.sqrt()), max_relative = 1e-9);
        assert_relative_eq!(mass, 0.682_689_492_137_086, max_relative = 1e-13);
        assert!(mass < 1.0);
    }

    #[test]
    fn bessel3d_is_a_density() {
        let pol = QuadPolicy::default().with_rel_tol(1e-13);
        for sigma in [0.3, 1.0] {
            let q = |y| KernelQuery::new(1.0, 0.7, y, sigma).unwrap();
            let mass = integrate_segments(|y| bessel3d_transition(&q(y)).unwrap(), &[0.0, 0.7, 3.0, 12.0], &pol).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
        }
        let a = bessel3d_transition(&KernelQuery::new(2.0, 1.0, 1.3, 1.0).unwrap()).unwrap();
        assert_relative_eq!(a, 1.3 * killed_bm_kernel(1.0, 1.0, 1.3).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn xi0_properties() {
        let pol = QuadPolicy::default().with_rel_tol(1e-13);
        for c in [0.5, 1.0, 3.0] {
            let m = integrate_segments(|x| xi0_density(x, c).unwrap(), &[0.0, 1.0 / c, 10.0 / c, 60.0 / c], &pol).unwrap();
            assert!((m - 1.0).abs() < 1e-10);
            let at = |x: f64| xi0_density(x, c).unwrap();
            assert!(at(1.0 / c) > at(0.99 / c) && at(1.0 / c) > at(1.01 / c));
        }
        assert_relative_eq!(xi0_density(1.0, 1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(xi0_density(-1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn chapman_kolmogorov_killed() {
        let pol = QuadPolicy::default().with_rel_tol(1e-12);
        let lhs = integrate_segments(
            |z| killed_bm_kernel(0.5, 1.0, z).unwrap() * killed_bm_kernel(0.5, z, 1.5).unwrap(),
            &[0.0, 1.0, 1.5, 5.0, 12.0],
            &pol,
        )
        .unwrap();
        assert!((lhs - killed_bm_kernel(1.0, 1.0, 1.5).unwrap()).abs() < 1e-6);
    }

    fn ypol() -> QuadPolicy {
        QuadPolicy::default().with_rel_tol(1e-10).with_abs_tol(1e-14)
    }

    #[test]
    fn yakubovich_symmetry_and_decay() {
        let a = yakubovich_kernel(0.7, 0.3, -0.4, &ypol()).unwrap();
        let b = yakubovich_kernel(0.7, -0.4, 0.3, &ypol()).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
        assert!(a > 0.0);
        let p1 = yakubovich_kernel(1.0, 0.0, 0.0, &ypol()).unwrap();
        let p50 = yakubovich_kernel(50.0, 0.0, 0.0, &ypol()).unwrap();
        assert!(p50 < p1 / 4.0);
        assert!(yakubovich_kernel(1.0, 30.0, 0.0, &ypol()).is_err());
    }

    #[test]
    fn zeta_transition_is_a_density() {
        let pol = ypol();
        let q = |y| KernelQuery::new(1.0, 0.0, y, 1.0).unwrap();
        let mass = integrate(|y| zeta_transition(&q(y), &pol).unwrap(), -4.0, 10.0, &QuadPolicy::default().with_rel_tol(1e-9)).unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
    }

    #[test]
    fn zeta0_properties() {
        let pol = QuadPolicy::default().with_rel_tol(1e-11);
        for c in [1.0, 2.0, 3.5] {
            let m = integrate(|x| zeta0_density(x, c).unwrap(), -5.0, 27.0, &pol).unwrap();
            assert!((m - 1.0).abs() < 1e-7, "c={c} mass {m}");
        }
        let k0 = bessel_k_imag(0.0, 1.0).unwrap();
        assert_relative_eq!(zeta0_density(0.0, 2.0).unwrap(), k0, max_relative = 1e-14);
        assert!(zeta0_density(0.0, 0.0).is_err());
    }
}
