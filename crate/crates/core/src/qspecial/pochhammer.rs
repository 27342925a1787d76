use num_complex::Complex64;

use super::{check_finite, ln_1p, QBase, TruncationPolicy};
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `(a;q)_n`, the finite product of `1 - a q^k` for `k < n`.
pub fn qpoch_finite(a: Complex64, q: QBase, n: usize) -> Complex64 {
    let mut prod = ONE;
    for k in 0..n {
        prod *= ONE - a * q.powi(k);
    }
    prod
}

/// `ln (a;q)_∞` as a sum of principal logarithms of the factors.
///
/// The imaginary part is the sum of the factor arguments and is not reduced
/// to `(-π, π]`, so `exp` of the result is the product itself. A vanishing
/// factor yields a real part of `-∞`.
pub fn ln_qpoch_infinite(a: Complex64, q: QBase, policy: &TruncationPolicy) -> Result<Complex64> {
    if a == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let qv = q.value();
    if qv == 0.0 {
        return Ok(ln_1p(-a));
    }
    let abs_a = a.norm();
    let tail_scale = 1.0 / (1.0 - qv);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..policy.max_terms {
        let qk = q.powi(k);
        if abs_a * qk * tail_scale < policy.rel_tol {
            return Ok(sum);
        }
        let w = -a * qk;
        if w == -ONE {
            return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
        }
        sum += ln_1p(w);
    }
    Err(Error::NonConvergence {
        what: "q-Pochhammer product",
        limit: policy.max_terms,
    })
}

/// `(a;q)_∞`, truncated once the tail bound `|a| q^k / (1-q)` drops below
/// `policy.rel_tol`.
pub fn qpoch_infinite(a: Complex64, q: QBase, policy: &TruncationPolicy) -> Result<Complex64> {
    let ln = ln_qpoch_infinite(a, q, policy)?;
    if ln.re == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    check_finite(ln.exp(), "q-Pochhammer product")
}

/// `(a_1, ..., a_r; q)_∞`, the product of the individual symbols.
pub fn qpoch_infinite_multi(
    args: &[Complex64],
    q: QBase,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    let mut ln = Complex64::new(0.0, 0.0);
    for &a in args {
        ln += ln_qpoch_infinite(a, q, policy)?;
    }
    if ln.re == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    check_finite(ln.exp(), "q-Pochhammer product")
}

/// `(z;q)_∞ / (z q^λ;q)_∞`, which tends to `(1-z)^λ` as `q -> 1`.
pub fn ramanujan_ratio(
    z: Complex64,
    lambda: Complex64,
    q: QBase,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::domain(
            "ramanujan_ratio",
            format!("z = {} lies on the cut [1, ∞)", z.re),
        ));
    }
    let ql = q.powc(lambda)?;
    let num = ln_qpoch_infinite(z, q, policy)?;
    let den = ln_qpoch_infinite(z * ql, q, policy)?;
    if den.re == f64::NEG_INFINITY {
        return Err(Error::Pole {
            func: "ramanujan_ratio",
            at: format!("z = {z}, lambda = {lambda}"),
        });
    }
    check_finite((num - den).exp(), "ramanujan_ratio")
}
