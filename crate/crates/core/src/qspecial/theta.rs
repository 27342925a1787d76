use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_finite, qpoch_infinite_multi, QBase, TruncationPolicy};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `ln sin w`, stable for large `|Im w|`.
fn ln_sin(w: Complex64) -> Complex64 {
    if w.im > 20.0 {
        -I * w + (1.0 - (2.0 * I * w).exp()).ln() + Complex64::new(0.5, 0.0).ln() + I * (PI / 2.0)
    } else if w.im < -20.0 {
        I * w + (1.0 - (-2.0 * I * w).exp()).ln() + Complex64::new(0.5, 0.0).ln() - I * (PI / 2.0)
    } else {
        w.sin().ln()
    }
}

/// `ln cos w`, stable for large `|Im w|`.
fn ln_cos(w: Complex64) -> Complex64 {
    if w.im > 20.0 {
        -I * w + (1.0 + (2.0 * I * w).exp()).ln() - 2f64.ln()
    } else if w.im < -20.0 {
        I * w + (1.0 + (-2.0 * I * w).exp()).ln() - 2f64.ln()
    } else {
        w.cos().ln()
    }
}

fn check_tau(tau: Complex64, func: &'static str) -> Result<()> {
    if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("Im(tau) must be positive, got tau = {tau}")))
    }
}

/// Sums `Σ_{n≥0} sign_n exp(πiτ e(n)) f(n)` where `ln_f(n)` gives `ln f(n)`
/// and `|f(n)| ≤ exp(growth(n))`. `e(n)` is the exponent of the nome.
#[allow(clippy::too_many_arguments)]
fn theta_series(
    tau: Complex64,
    policy: &TruncationPolicy,
    start: usize,
    exponent: impl Fn(f64) -> f64,
    growth: impl Fn(f64) -> f64,
    term: impl Fn(usize) -> Complex64,
    peak: f64,
    what: &'static str,
) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for n in start..start + policy.max_terms {
        let nf = n as f64;
        let t = term(n);
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::Overflow(what));
        }
        sum += t;
        if nf >= peak {
            let ln_bound = -PI * tau.im * exponent(nf + 1.0) + growth(nf + 1.0);
            let bound = ln_bound.exp();
            if bound <= policy.rel_tol * sum.norm() || bound < f64::MIN_POSITIVE {
                return Ok(sum);
            }
        }
    }
    Err(Error::NonConvergence {
        what,
        limit: policy.max_terms,
    })
}

/// Jacobi theta function
/// `θ₁(v|τ) = 2 Σ_{n≥0} (-1)^n q^{(n+1/2)²} sin((2n+1)πv)`, nome `q = e^{πiτ}`.
pub fn theta1(v: Complex64, tau: Complex64, policy: &TruncationPolicy) -> Result<Complex64> {
    check_tau(tau, "theta1")?;
    let av = v.im.abs();
    // |term_n| ≤ exp(-π Im τ (n+1/2)² + (2n+1)π|Im v|), maximal near n = |Im v|/Im τ
    let peak = av / tau.im;
    let sum = theta_series(
        tau,
        policy,
        0,
        |n| (n + 0.5) * (n + 0.5),
        |n| (2.0 * n + 1.0) * PI * av,
        |n| {
            let nf = n as f64;
            let w = (2.0 * nf + 1.0) * PI * v;
            let ln_t = I * PI * tau * (nf + 0.5) * (nf + 0.5) + ln_sin(w);
            let s = if n % 2 == 0 { 2.0 } else { -2.0 };
            if v == Complex64::new(0.0, 0.0) {
                Complex64::new(0.0, 0.0)
            } else {
                s * ln_t.exp()
            }
        },
        peak,
        "theta1 series",
    )?;
    check_finite(sum, "theta1")
}

/// Jacobi theta function
/// `θ₄(v|τ) = 1 + 2 Σ_{n≥1} (-1)^n q^{n²} cos(2nπv)`, nome `q = e^{πiτ}`.
pub fn theta4(v: Complex64, tau: Complex64, policy: &TruncationPolicy) -> Result<Complex64> {
    check_tau(tau, "theta4")?;
    let av = v.im.abs();
    let peak = av / tau.im;
    let sum = theta_series(
        tau,
        policy,
        1,
        |n| n * n,
        |n| 2.0 * n * PI * av,
        |n| {
            let nf = n as f64;
            let ln_t = I * PI * tau * nf * nf + ln_cos(2.0 * nf * PI * v);
            let s = if n % 2 == 0 { 2.0 } else { -2.0 };
            s * ln_t.exp()
        },
        peak,
        "theta4 series",
    )?;
    check_finite(1.0 + sum, "theta4")
}

/// `θ₁` through Jacobi's triple product
/// `2 q^{1/4} sin(πv) (q², q² e^{2πiv}, q² e^{-2πiv}; q²)_∞`.
pub fn theta1_triple_product(
    v: Complex64,
    tau: Complex64,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    check_tau(tau, "theta1_triple_product")?;
    let nome = (I * PI * tau).exp();
    let q2 = nome * nome;
    if q2.im.abs() > 0.0 || q2.re < 0.0 {
        // complex base: sum logs of the factors directly
        return triple_product_complex_base(v, tau, policy);
    }
    let base = QBase::new(q2.re)?;
    let e = (2.0 * PI * I * v).exp();
    let prod = qpoch_infinite_multi(&[q2, q2 * e, q2 / e], base, policy)?;
    let pre = 2.0 * (I * PI * tau / 4.0).exp() * (PI * v).sin();
    check_finite(pre * prod, "theta1_triple_product")
}

fn triple_product_complex_base(
    v: Complex64,
    tau: Complex64,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    let q2 = (2.0 * I * PI * tau).exp();
    let e = (2.0 * PI * I * v).exp();
    let r = q2.norm();
    let scale = 1.0 / (1.0 - r);
    let mut ln = Complex64::new(0.0, 0.0);
    let mut qk = q2;
    for _ in 0..policy.max_terms {
        let mag = qk.norm() * (1.0 + e.norm() + 1.0 / e.norm()) * scale;
        if mag < policy.rel_tol {
            let pre = 2.0 * (I * PI * tau / 4.0).exp() * (PI * v).sin();
            return check_finite(pre * ln.exp(), "theta1_triple_product");
        }
        ln += (1.0 - qk).ln() + (1.0 - qk * e).ln() + (1.0 - qk / e).ln();
        qk *= q2;
    }
    Err(Error::NonConvergence {
        what: "theta1 triple product",
        limit: policy.max_terms,
    })
}
