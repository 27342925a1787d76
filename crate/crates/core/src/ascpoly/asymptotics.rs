use num_complex::Complex64;

use super::{asc_eval, asc_normalized_scaled, AscParams};
use crate::error::{Error, Result};
use crate::qspecial::{ln_qpoch_infinite, QBase, TruncationPolicy};

fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.sin() / u
    }
}

/// `(1/M) Q_M(1 - u²/(2M²))` at fixed `q`.
pub fn asc_endpoint_limit_fixed_q(m: usize, u: f64, p: &AscParams) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("M must be positive"));
    }
    let mf = m as f64;
    Ok(asc_eval(m, 1.0 - u * u / (2.0 * mf * mf), p)? / mf)
}

/// `(sin u / u) (a, b; q)_∞ / (q; q)_∞`, the large-`M` limit of
/// [`asc_endpoint_limit_fixed_q`].
pub fn asc_endpoint_target_fixed_q(u: f64, p: &AscParams, policy: &TruncationPolicy) -> Result<f64> {
    let q = p.q();
    let ln = ln_qpoch_infinite(p.a(), q, policy)? + ln_qpoch_infinite(p.b(), q, policy)?
        - ln_qpoch_infinite(Complex64::new(q.value(), 0.0), q, policy)?;
    Ok(sinc(u) * ln.exp().re)
}

/// `m = ⌊Mx⌋ + ⌊M log(M √(2(1+σ)))⌋`, the degree used in the `q -> 1` limit.
pub fn endpoint_index_q_to_1(m: f64, x: f64, sigma: f64) -> Result<usize> {
    let idx = (m * x).floor() + (m * (m * (2.0 * (1.0 + sigma)).sqrt()).ln()).floor();
    if idx < 0.0 || !idx.is_finite() {
        return Err(Error::domain(
            "asc_endpoint_limit_q_to_1",
            format!("degree is negative for M = {m}, x = {x}"),
        ));
    }
    Ok(idx as usize)
}

/// `(q;q)²_∞ / (M (a,b;q)_∞) · Q_m(cos(u/M)) / (q;q)_m` with `q = e^{-2/M}`,
/// `a = -q e^{iα}`, `b = -q e^{-iα}`, `σ = cos α`; tends to `K_{i|u|}(e^{-x})`.
pub fn asc_endpoint_limit_q_to_1(m: usize, u: f64, x: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    if m == 0 {
        return Err(Error::invalid("M must be positive"));
    }
    let mf = m as f64;
    let q = QBase::from_scale(mf)?;
    let alpha = sigma.acos();
    let a = -q.value() * Complex64::from_polar(1.0, alpha);
    let p = AscParams::new(a, a.conj(), q)?;
    let deg = endpoint_index_q_to_1(mf, x, sigma)?;
    let policy = TruncationPolicy::default();
    let ln_pre = 2.0 * ln_qpoch_infinite(Complex64::new(q.value(), 0.0), q, &policy)?.re
        - mf.ln()
        - (ln_qpoch_infinite(p.a(), q, &policy)? + ln_qpoch_infinite(p.b(), q, &policy)?).re;
    let (mant, scale) = asc_normalized_scaled(deg, (u / mf).cos(), &p)?;
    Ok(mant * (ln_pre + scale).exp())
}
