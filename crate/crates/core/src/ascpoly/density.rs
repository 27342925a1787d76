use std::f64::consts::PI;

use num_complex::Complex64;

use super::{AscParams, QModelParams};
use crate::error::{Error, Result};
use crate::qspecial::{ln_qpoch_infinite, TruncationPolicy};
use crate::quad::{integrate_vec, QuadPolicy};

/// The orthogonality density `g` of the Al-Salam–Chihara polynomials on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct AscDensity {
    params: AscParams,
    policy: TruncationPolicy,
    ln_const: f64,
}

impl AscDensity {
    pub fn new(params: AscParams, policy: TruncationPolicy) -> Result<Self> {
        if params.a().norm() >= 1.0 || params.b().norm() >= 1.0 {
            return Err(Error::domain(
                "asc_density",
                format!("requires |a|, |b| < 1, got a = {}, b = {}", params.a(), params.b()),
            ));
        }
        let q = params.q();
        let ln_const = ln_qpoch_infinite(Complex64::new(q.value(), 0.0), q, &policy)?.re
            + ln_qpoch_infinite(Complex64::new(params.product(), 0.0), q, &policy)?.re;
        Ok(AscDensity {
            params,
            policy,
            ln_const,
        })
    }

    pub fn params(&self) -> &AscParams {
        &self.params
    }

    /// `g(cos θ) sin θ`, the density of `θ = arccos x` on `[0, π]`.
    pub fn weight_theta(&self, theta: f64) -> Result<f64> {
        let s = theta.sin();
        if s <= 0.0 {
            return Ok(0.0);
        }
        let q = self.params.q();
        let e = Complex64::from_polar(1.0, theta);
        let ln_num = ln_qpoch_infinite(q.value() * e * e, q, &self.policy)?.re;
        let ln_den = ln_qpoch_infinite(self.params.a() * e, q, &self.policy)?.re
            + ln_qpoch_infinite(self.params.b() * e, q, &self.policy)?.re;
        Ok(2.0 * s * s / PI * (self.ln_const + 2.0 * ln_num - 2.0 * ln_den).exp())
    }

    /// `g(x)` for `|x| < 1`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x.abs() < 1.0) {
            return Err(Error::domain("asc_density", format!("|x| must be < 1, got {x}")));
        }
        let theta = x.acos();
        Ok(self.weight_theta(theta)? / theta.sin())
    }

    /// `∫₀^π f(θ) g(cos θ) sin θ dθ` for a vector-valued `f`, split at the
    /// given θ breakpoints.
    pub fn integrate_theta_vec<F>(
        &self,
        mut f: F,
        dim: usize,
        breakpoints: &[f64],
        policy: &QuadPolicy,
    ) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &mut [f64]),
    {
        let mut pts = vec![0.0];
        pts.extend(breakpoints.iter().copied().filter(|t| *t > 0.0 && *t < PI));
        pts.push(PI);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        let mut err = None;
        let mut total = vec![0.0; dim];
        for w in pts.windows(2) {
            let part = integrate_vec(
                |t, out| {
                    let wt = match self.weight_theta(t) {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    };
                    f(t, out);
                    out.iter_mut().for_each(|o| *o *= wt);
                },
                dim,
                w[0],
                w[1],
                policy,
            )?;
            total.iter_mut().zip(part).for_each(|(t, p)| *t += p);
        }
        match err {
            Some(e) => Err(e),
            None => Ok(total),
        }
    }
}

/// `g(x)` for the given parameters.
pub fn asc_density(x: f64, p: &AscParams, policy: &TruncationPolicy) -> Result<f64> {
    AscDensity::new(*p, *policy)?.eval(x)
}

/// The orthogonality measure `ν` of the q-model polynomials `p_n`, the image
/// of `g` under `x ↦ 2(x+σ)/(1-q)`, supported on `[A, B]`.
#[derive(Debug, Clone)]
pub struct OrthogonalityMeasure {
    model: QModelParams,
    density: AscDensity,
}

impl OrthogonalityMeasure {
    pub fn new(model: QModelParams) -> Result<Self> {
        let density = AscDensity::new(model.asc_params(), TruncationPolicy::default())?;
        Ok(OrthogonalityMeasure { model, density })
    }

    pub fn model(&self) -> &QModelParams {
        &self.model
    }

    /// Density of `ν` at `y ∈ (A, B)`.
    pub fn density(&self, y: f64) -> Result<f64> {
        let q = self.model.q().value();
        Ok((1.0 - q) / 2.0 * self.density.eval(self.model.from_path_variable(y))?)
    }

    /// `∫ f(y) ν(dy)` computed as `∫₀^π f(y(θ)) g(cos θ) sin θ dθ` with
    /// `y(θ) = 2(cos θ + σ)/(1-q)`; `y_breaks` are points of `(A, B)` where
    /// `f` may jump.
    pub fn integrate_vec<F>(
        &self,
        mut f: F,
        dim: usize,
        y_breaks: &[f64],
        policy: &QuadPolicy,
    ) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &mut [f64]),
    {
        let theta_breaks: Vec<f64> = y_breaks
            .iter()
            .map(|&y| self.model.from_path_variable(y))
            .filter(|x| x.abs() < 1.0)
            .map(f64::acos)
            .collect();
        let m = self.model;
        self.density
            .integrate_theta_vec(|t, out| f(m.to_path_variable(t.cos()), out), dim, &theta_breaks, policy)
    }

    pub fn integrate<F>(&self, mut f: F, policy: &QuadPolicy) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        Ok(self.integrate_vec(|y, out| out[0] = f(y), 1, &[], policy)?[0])
    }
}
