use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_finite, ln_qpoch_infinite, QBase, TruncationPolicy};
use crate::error::{Error, Result};

const POLE_TOL: f64 = 1e-12;

fn near_nonpositive_integer(z: Complex64) -> bool {
    z.im.abs() < POLE_TOL && z.re < 0.5 && (z.re - z.re.round()).abs() < POLE_TOL
}

/// `ln Γ_q(z)`, with the imaginary part left unreduced.
pub fn ln_q_gamma(z: Complex64, q: QBase, policy: &TruncationPolicy) -> Result<Complex64> {
    if near_nonpositive_integer(z) {
        return Err(Error::Pole {
            func: "q_gamma",
            at: format!("{z}"),
        });
    }
    let qv = q.value();
    if qv == 0.0 {
        return if z.re > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::domain("q_gamma", "q = 0 requires Re z > 0"))
        };
    }
    let qz = q.powc(z)?;
    let den = ln_qpoch_infinite(qz, q, policy)?;
    if den.re == f64::NEG_INFINITY {
        return Err(Error::Pole {
            func: "q_gamma",
            at: format!("{z}"),
        });
    }
    let num = ln_qpoch_infinite(Complex64::new(qv, 0.0), q, policy)?;
    Ok((1.0 - z) * (-qv).ln_1p() + num - den)
}

/// The q-Gamma function `(1-q)^{1-z} (q;q)_∞ / (q^z;q)_∞`.
pub fn q_gamma(z: Complex64, q: QBase, policy: &TruncationPolicy) -> Result<Complex64> {
    check_finite(ln_q_gamma(z, q, policy)?.exp(), "q_gamma")
}

/// `|Γ(iu)|² = π / (u sinh πu)`.
pub fn gamma_abs_imag_sq(u: f64) -> Result<f64> {
    if u == 0.0 {
        return Err(Error::Pole {
            func: "gamma_abs_imag_sq",
            at: "u = 0".into(),
        });
    }
    if !u.is_finite() {
        return Err(Error::domain("gamma_abs_imag_sq", format!("u = {u}")));
    }
    Ok(PI / (u * (PI * u).sinh()))
}

/// `1 / |Γ(iu)|² = u sinh(πu) / π`, continued by 0 at `u = 0`.
pub fn inv_gamma_abs_imag_sq(u: f64) -> f64 {
    u * (PI * u).sinh() / PI
}
