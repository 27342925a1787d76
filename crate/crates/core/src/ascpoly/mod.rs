//! Al-Salam–Chihara polynomials and their specialization to the q-model.
//!
//! `Q_n(x; a, b | q)` is defined by `Q_{-1} = 0`, `Q_0 = 1` and
//!
//! ```text
//! 2x Q_n = Q_{n+1} + (a+b) q^n Q_n + (1-q^n)(1-ab q^{n-1}) Q_{n-1}.
//! ```
//!
//! For `a`, `b` real or complex conjugate only `a+b` and `ab` enter, so
//! everything is evaluated in real arithmetic.

mod asymptotics;
mod density;
mod qmodel;

pub use asymptotics::{
    asc_endpoint_limit_fixed_q, asc_endpoint_limit_q_to_1, asc_endpoint_target_fixed_q,
    endpoint_index_q_to_1,
};
pub use density::{asc_density, AscDensity, OrthogonalityMeasure};
pub(crate) use qmodel::s_range;
pub use qmodel::{
    motzkin_poly_eval, motzkin_poly_values, pi_tilde_value, pi_value, s_value, s_values,
    QModelParams, SupportInterval,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qspecial::QBase;

/// Degree cap for forward recurrences.
pub const MAX_DEGREE: usize = 100_000;

/// Parameters `(a, b, q)` with `a`, `b` both real or complex conjugate.
///
/// `|ab| ≤ 1` is accepted so that the boundary case `ab = 1` of the maximum
/// bound can be evaluated; the orthogonality density needs `|a|, |b| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscParams {
    a: Complex64,
    b: Complex64,
    q: QBase,
}

impl AscParams {
    pub fn new(a: Complex64, b: Complex64, q: QBase) -> Result<Self> {
        let scale = 1.0 + a.norm() + b.norm();
        let real = a.im.abs() <= 1e-14 * scale && b.im.abs() <= 1e-14 * scale;
        let conj = (a - b.conj()).norm() <= 1e-14 * scale;
        if !(real || conj) {
            return Err(Error::invalid(format!(
                "a = {a} and b = {b} must be real or complex conjugates"
            )));
        }
        let (a, b) = if real && !conj {
            (Complex64::new(a.re, 0.0), Complex64::new(b.re, 0.0))
        } else {
            (a, a.conj())
        };
        if !((a * b).norm() <= 1.0 + 1e-15) {
            return Err(Error::invalid(format!("|ab| must not exceed 1, got {}", (a * b).norm())));
        }
        Ok(AscParams { a, b, q })
    }

    pub fn real(a: f64, b: f64, q: QBase) -> Result<Self> {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0), q)
    }

    /// `a = -r e^{iα}`, `b = -r e^{-iα}`.
    pub fn polar(r: f64, alpha: f64, q: QBase) -> Result<Self> {
        let a = -Complex64::from_polar(r, alpha);
        Self::new(a, a.conj(), q)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn q(&self) -> QBase {
        self.q
    }

    /// `a + b`, real by construction.
    pub fn sum(&self) -> f64 {
        (self.a + self.b).re
    }

    /// `ab`, real by construction.
    pub fn product(&self) -> f64 {
        (self.a * self.b).re
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        Err(Error::SizeGuard(format!("degree {n} exceeds {MAX_DEGREE}")))
    } else {
        Ok(())
    }
}

/// `Q_n(x; a, b | q)` by forward recurrence.
pub fn asc_eval(n: usize, x: f64, p: &AscParams) -> Result<f64> {
    check_degree(n)?;
    let (s, ab) = (p.sum(), p.product());
    let q = p.q();
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let qk = q.powi(k);
        let back = if k == 0 {
            0.0
        } else {
            (1.0 - qk) * (1.0 - ab * q.powi(k - 1))
        };
        let next = (2.0 * x - s * qk) * cur - back * prev;
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::Overflow("asc_eval"))
    }
}

/// `Q_n(x)/(q;q)_n` as mantissa and natural-log scale, `value = m·e^{scale}`.
///
/// Runs the normalized recurrence
/// `R_{n+1} = ((2x - (a+b) q^n) R_n - (1 - ab q^{n-1}) R_{n-1}) / (1 - q^{n+1})`
/// with periodic rescaling, so it stays finite when `Q_n/(q;q)_n` is far
/// outside the double range (as for `q -> 1`).
pub fn asc_normalized_scaled(n: usize, x: f64, p: &AscParams) -> Result<(f64, f64)> {
    check_degree(n)?;
    let (s, ab) = (p.sum(), p.product());
    let qv = p.q().value();
    let lq = if qv > 0.0 { qv.ln() } else { f64::NEG_INFINITY };
    let qpow = |k: usize| if k == 0 { 1.0 } else if qv == 0.0 { 0.0 } else { (k as f64 * lq).exp() };
    let one_minus_qpow = |k: usize| {
        if qv == 0.0 {
            1.0
        } else {
            -(k as f64 * lq).exp_m1()
        }
    };
    let (mut prev, mut cur, mut scale) = (0.0f64, 1.0f64, 0.0f64);
    for k in 0..n {
        let back = if k == 0 { 0.0 } else { 1.0 - ab * qpow(k - 1) };
        let next = ((2.0 * x - s * qpow(k)) * cur - back * prev) / one_minus_qpow(k + 1);
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            prev /= m;
            cur /= m;
            scale += m.ln();
        }
    }
    if cur.is_finite() {
        Ok((cur, scale))
    } else {
        Err(Error::Overflow("asc_normalized_scaled"))
    }
}

/// `Q_n(1)/(q;q)_n` as the convolution `Σ_k (a;q)_k (b;q)_{n-k} / ((q;q)_k (q;q)_{n-k})`.
pub fn asc_at_one(n: usize, p: &AscParams) -> Result<f64> {
    check_degree(n)?;
    let ca = pochhammer_ratios(p.a(), p.q(), n);
    let cb = pochhammer_ratios(p.b(), p.q(), n);
    convolve_real(&ca, &cb, n, "asc_at_one")
}

/// `(a;q)_k/(q;q)_k` for `k = 0..=n`.
pub(crate) fn pochhammer_ratios(a: Complex64, q: QBase, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = Complex64::new(1.0, 0.0);
    out.push(cur);
    for k in 0..n {
        let qk = q.powi(k);
        cur *= (1.0 - a * qk) / (1.0 - q.powi(k + 1));
        out.push(cur);
    }
    out
}

/// Real part of `Σ_k x_k y_{n-k}` after checking the imaginary residue
/// against the scale `Σ_k |x_k y_{n-k}|`.
pub(crate) fn convolve_real(
    x: &[Complex64],
    y: &[Complex64],
    n: usize,
    what: &'static str,
) -> Result<f64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for k in 0..=n {
        let t = x[k] * y[n - k];
        sum += t;
        mag += t.norm();
    }
    let residue = sum.im.abs() / mag.max(f64::MIN_POSITIVE);
    if residue > 1e-9 {
        return Err(Error::ImaginaryResidue { what, residue });
    }
    if !sum.re.is_finite() {
        return Err(Error::Overflow(what));
    }
    Ok(sum.re)
}

/// `(q;q)_n` as a real number.
#[cfg(test)]
pub(crate) fn q_factorial(q: QBase, n: usize) -> f64 {
    crate::qspecial::qpoch_finite(Complex64::new(q.value(), 0.0), q, n).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn qb(v: f64) -> QBase {
        QBase::new(v).unwrap()
    }

    #[test]
    fn low_degrees() {
        let p = AscParams::real(0.3, -0.6, qb(0.4)).unwrap();
        assert_eq!(asc_eval(0, 0.7, &p).unwrap(), 1.0);
        assert_relative_eq!(asc_eval(1, 0.7, &p).unwrap(), 1.4 + 0.3, max_relative = 1e-15);
    }

    #[test]
    fn second_degree_closed_form() {
        for qv in [0.1, 0.5, 0.9] {
            let p = AscParams::real(qv, qv, qb(qv)).unwrap();
            for x in [-1.0, -0.3, 0.0, 0.8, 1.0] {
                let want = 3.0 * qv.powi(3) + qv * qv + qv - 1.0 - 4.0 * (1.0 + qv) * qv * x + 4.0 * x * x;
                assert_relative_eq!(asc_eval(2, x, &p).unwrap(), want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn params_validation() {
        let q = qb(0.5);
        assert!(AscParams::new(Complex64::new(0.1, 0.2), Complex64::new(0.1, 0.3), q).is_err());
        assert!(AscParams::real(2.0, 0.9, q).is_err());
        assert!(AscParams::polar(1.0, 0.4, q).is_ok());
        let p = AscParams::polar(0.5, 0.4, q).unwrap();
        assert_relative_eq!(p.product(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(p.sum(), -(0.4f64).cos(), max_relative = 1e-15);
    }

    #[test]
    fn at_one_small_case() {
        let q = qb(0.5);
        let p = AscParams::real(0.0, 0.0, q).unwrap();
        let f = |k| q_factorial(q, k);
        let want = 1.0 / f(2) + 1.0 / (f(1) * f(1)) + 1.0 / f(2);
        assert_relative_eq!(asc_at_one(2, &p).unwrap(), want, max_relative = 1e-15);
        assert_eq!(asc_at_one(0, &p).unwrap(), 1.0);
    }

    #[test]
    fn degree_guard() {
        let p = AscParams::real(0.0, 0.0, qb(0.5)).unwrap();
        assert!(matches!(asc_eval(MAX_DEGREE + 1, 0.0, &p), Err(Error::SizeGuard(_))));
    }

    proptest! {
        #[test]
        fn convolution_matches_recurrence(n in 0usize..=30, r in 0.0f64..0.99, alpha in -1.5f64..1.5, qv in 0.0f64..0.9) {
            let p = AscParams::polar(r, alpha, qb(qv)).unwrap();
            let conv = asc_at_one(n, &p).unwrap();
            let rec = asc_eval(n, 1.0, &p).unwrap() / q_factorial(p.q(), n);
            prop_assert!((conv - rec).abs() <= 1e-10 * conv.abs().max(1.0));
        }

        #[test]
        fn scaled_matches_plain(n in 0usize..=40, x in -1.0f64..1.0, r in 0.0f64..0.99, alpha in -1.5f64..1.5, qv in 0.0f64..0.9) {
            let p = AscParams::polar(r, alpha, qb(qv)).unwrap();
            let (m, s) = asc_normalized_scaled(n, x, &p).unwrap();
            let plain = asc_eval(n, x, &p).unwrap() / q_factorial(p.q(), n);
            prop_assert!((m * s.exp() - plain).abs() <= 1e-9 * (1.0 + plain.abs()));
        }
    }
}
