use num_complex::Complex64;

use rayon::prelude::*;

use super::{check_degree, pochhammer_ratios, AscParams};
use crate::error::{Error, Result};
use crate::qspecial::{q_number, QBase};

/// Parameters of the q-model: edge weights `a_n = [n+2]_q`,
/// `b_n = 2σ[n+1]_q`, `c_n = [n]_q` and boundary weights
/// `α_n = ρ₀ⁿ[n+1]_q`, `β_n = ρ₁ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QModelParams {
    q: QBase,
    sigma: f64,
    rho0: f64,
    rho1: f64,
}

impl QModelParams {
    pub fn new(q: f64, sigma: f64, rho0: f64, rho1: f64) -> Result<Self> {
        let q = QBase::new(q)?;
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::invalid(format!("sigma must lie in (0, 1], got {sigma}")));
        }
        for (name, r) in [("rho0", rho0), ("rho1", rho1)] {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1), got {r}")));
            }
        }
        Ok(QModelParams { q, sigma, rho0, rho1 })
    }

    pub fn q(&self) -> QBase {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn with_rho(self, rho0: f64, rho1: f64) -> Result<Self> {
        Self::new(self.q.value(), self.sigma, rho0, rho1)
    }

    /// `a = -q(σ + i√(1-σ²))`; `b` is its conjugate.
    pub fn asc_a(&self) -> Complex64 {
        let s = self.sigma;
        -self.q.value() * Complex64::new(s, (1.0 - s * s).max(0.0).sqrt())
    }

    pub fn asc_params(&self) -> AscParams {
        let a = self.asc_a();
        AscParams::new(a, a.conj(), self.q).expect("q-model parameters are conjugate with |ab| = q²")
    }

    pub fn support(&self) -> SupportInterval {
        let w = 1.0 - self.q.value();
        SupportInterval {
            a: -2.0 * (1.0 - self.sigma) / w,
            b: 2.0 * (1.0 + self.sigma) / w,
        }
    }

    pub fn up(&self, n: usize) -> f64 {
        q_number(n + 2, self.q)
    }

    pub fn flat(&self, n: usize) -> f64 {
        2.0 * self.sigma * q_number(n + 1, self.q)
    }

    pub fn down(&self, n: usize) -> f64 {
        q_number(n, self.q)
    }

    /// `x ↦ 2(x + σ)/(1-q)`, mapping `[-1, 1]` onto `[A, B]`.
    pub fn to_path_variable(&self, x: f64) -> f64 {
        2.0 * (x + self.sigma) / (1.0 - self.q.value())
    }

    /// Inverse of [`QModelParams::to_path_variable`].
    pub fn from_path_variable(&self, y: f64) -> f64 {
        (1.0 - self.q.value()) * y / 2.0 - self.sigma
    }
}

/// The support `[A, B]` of the orthogonality measure of the q-model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    pub a: f64,
    pub b: f64,
}

/// `s_n = Σ_k (a;q)_k (b;q)_{n-k} / ((q;q)_k (q;q)_{n-k})` for the q-model.
pub fn s_value(n: usize, m: &QModelParams) -> Result<f64> {
    Ok(s_range(n, n, m)?[0])
}

/// `s_0, ..., s_{n_max}` sharing the Pochhammer ratios.
pub fn s_values(n_max: usize, m: &QModelParams) -> Result<Vec<f64>> {
    s_range(0, n_max, m)
}

/// `s_lo, ..., s_hi`. With `b = ā` each term pairs with its conjugate, so
/// `s_n = Σ_k Re(c_k) Re(c_{n-k}) + Im(c_k) Im(c_{n-k})` for
/// `c_k = (a;q)_k/(q;q)_k`.
pub(crate) fn s_range(lo: usize, hi: usize, m: &QModelParams) -> Result<Vec<f64>> {
    check_degree(hi)?;
    let ca = pochhammer_ratios(m.asc_a(), m.q(), hi);
    let (re, im): (Vec<f64>, Vec<f64>) = ca.iter().map(|z| (z.re, z.im)).unzip();
    let out: Vec<f64> = (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let (r, i) = (&re[..=n], &im[..=n]);
            r.iter().zip(r.iter().rev()).map(|(x, y)| x * y).sum::<f64>()
                + i.iter().zip(i.iter().rev()).map(|(x, y)| x * y).sum::<f64>()
        })
        .collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("s_value"));
    }
    Ok(out)
}

/// `π_n = p_n(B) = s_n / [n+1]_q`.
pub fn pi_value(n: usize, m: &QModelParams) -> Result<f64> {
    Ok(s_value(n, m)? / q_number(n + 1, m.q()))
}

/// `π̃_n = [n+1]_q π_n = s_n`.
pub fn pi_tilde_value(n: usize, m: &QModelParams) -> Result<f64> {
    s_value(n, m)
}

/// `p_n(x)` from `x p_n = a_n p_{n+1} + b_n p_n + c_n p_{n-1}`.
pub fn motzkin_poly_eval(n: usize, x: f64, m: &QModelParams) -> Result<f64> {
    Ok(*motzkin_poly_values(n, x, m)?.last().expect("nonempty"))
}

/// `p_0(x), ..., p_{n_max}(x)`.
pub fn motzkin_poly_values(n_max: usize, x: f64, m: &QModelParams) -> Result<Vec<f64>> {
    check_degree(n_max)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    let mut prev = 0.0;
    for k in 0..n_max {
        let cur = out[k];
        let next = ((x - m.flat(k)) * cur - m.down(k) * prev) / m.up(k);
        if !next.is_finite() {
            return Err(Error::Overflow("motzkin_poly_values"));
        }
        prev = cur;
        out.push(next);
    }
    Ok(out)
}
