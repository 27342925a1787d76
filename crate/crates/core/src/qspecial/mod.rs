//! q-series and special-function primitives.
//!
//! All functions are pure. Infinite q-products are truncated once the
//! additive tail bound `|a| q^k / (1-q)` falls below the policy tolerance;
//! products that would under- or overflow in double precision are carried
//! in log form (see [`ln_qpoch_infinite`]).

mod bessel;
mod gamma;
mod pochhammer;
mod theta;

pub use bessel::{bessel_k_imag, bessel_k_imag_many, BESSEL_K_MIN_ARG};
pub use gamma::{gamma_abs_imag_sq, inv_gamma_abs_imag_sq, ln_q_gamma, q_gamma};
pub use pochhammer::{
    ln_qpoch_infinite, qpoch_finite, qpoch_infinite, qpoch_infinite_multi, ramanujan_ratio,
};
pub use theta::{theta1, theta1_triple_product, theta4};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The base `q` of the q-series, restricted to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QBase(f64);

impl QBase {
    pub fn new(q: f64) -> Result<Self> {
        if (0.0..1.0).contains(&q) {
            Ok(QBase(q))
        } else {
            Err(Error::invalid(format!("q must lie in [0, 1), got {q}")))
        }
    }

    /// `q = exp(-2/m)`, the scaling used for the `q -> 1` limits.
    pub fn from_scale(m: f64) -> Result<Self> {
        if m > 0.0 && m.is_finite() {
            Self::new((-2.0 / m).exp())
        } else {
            Err(Error::invalid(format!("scale must be positive, got {m}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `q^k` for integer `k >= 0`, with `0^0 = 1`.
    #[inline]
    pub fn powi(self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else if self.0 == 0.0 {
            0.0
        } else if k <= i32::MAX as usize {
            self.0.powi(k as i32)
        } else {
            (k as f64 * self.0.ln()).exp()
        }
    }

    /// `q^z` on the principal branch; `0^z` is 0 for `Re z > 0`.
    pub fn powc(self, z: Complex64) -> Result<Complex64> {
        if self.0 == 0.0 {
            if z == Complex64::new(0.0, 0.0) {
                Ok(Complex64::new(1.0, 0.0))
            } else if z.re > 0.0 {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                Err(Error::domain("q^z", format!("0^{z} is undefined")))
            }
        } else {
            Ok((z * self.0.ln()).exp())
        }
    }
}

impl TryFrom<f64> for QBase {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        QBase::new(q)
    }
}

/// Truncation rule for infinite series and products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            rel_tol: 1e-15,
            max_terms: 10_000_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::invalid(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::invalid("max_terms must be at least 1"));
        }
        Ok(TruncationPolicy { rel_tol, max_terms })
    }
}

/// The q-number `[n]_q = 1 + q + ... + q^{n-1}`.
pub fn q_number(n: usize, q: QBase) -> f64 {
    let q = q.value();
    if n == 0 {
        0.0
    } else if q == 0.0 {
        1.0
    } else {
        let lq = q.ln();
        (n as f64 * lq).exp_m1() / lq.exp_m1()
    }
}

/// `ln(1 + w)` accurate for small `|w|`.
pub(crate) fn ln_1p(w: Complex64) -> Complex64 {
    let re = if w.norm() < 0.5 {
        0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p()
    } else {
        (1.0 + w).norm().ln()
    };
    Complex64::new(re, w.im.atan2(1.0 + w.re))
}

pub(crate) fn check_finite(z: Complex64, what: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Overflow(what))
    }
}
