//! The boundary birth–death chains `X` (left end) and `Y` (right end) of a
//! weighted Motzkin path measure, their transition rows, initial laws,
//! k-step laws and simulation.

mod distribution;
mod evolve;

use std::borrow::Cow;

use num_complex::Complex64;

use crate::ascpoly::{s_range, s_value, QModelParams};
use crate::error::{Error, Result};
use crate::motzkin::WeightModel;
use crate::qspecial::{ln_qpoch_infinite, q_number, TruncationPolicy};

pub use distribution::Distribution;
pub use evolve::{kstep_distribution, kstep_transition_integral, simulate_chain, simulate_chain_from, simulate_chains};

/// Which boundary chain: `X` starts from `α_n π_n`, `Y` from `β_n π̃_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

/// Transition probabilities `(down, flat, up)` of one state.
pub type Row = [f64; 3];

#[derive(Debug, Clone)]
enum Source {
    /// Rows from `s_n`; `s` holds `s_0..=s_{height+1}`.
    Q { model: QModelParams, s: Vec<f64> },
    /// Rows from `a_n π_{n+1}/(B π_n)`, `b_n/B`, `c_n π_{n-1}/(B π_n)`.
    General { weights: WeightModel, b: f64, pi: Vec<f64> },
}

/// A boundary chain with transition rows cached for states `0..=height`.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    source: Source,
    rows: Vec<Row>,
}

fn q_row(n: usize, model: &QModelParams, s_prev: f64, s: f64, s_next: f64) -> Row {
    let q = model.q();
    let sigma = model.sigma();
    let f = q_number(n + 1, q) * (1.0 - q.value()) / (1.0 + sigma);
    [f * s_prev / (2.0 * s), f * sigma, f * s_next / (2.0 * s)]
}

impl ChainSpec {
    /// The q-model chain with rows
    /// `(1-q^{n+1})/(1+σ) · (s_{n-1}/(2s_n), σ, s_{n+1}/(2s_n))`,
    /// cached for `n ≤ height`.
    pub fn q_model(model: QModelParams, height: usize) -> Result<Self> {
        let s = s_range(0, height + 1, &model)?;
        if s.iter().any(|&v| v <= 0.0) {
            return Err(Error::domain("ChainSpec::q_model", "s_n must be positive"));
        }
        let rows = (0..=height)
            .map(|n| q_row(n, &model, if n == 0 { 0.0 } else { s[n - 1] }, s[n], s[n + 1]))
            .collect();
        Ok(ChainSpec {
            source: Source::Q { model, s },
            rows,
        })
    }

    /// A chain from general weights, the right endpoint `B` of the support
    /// of the orthogonality measure and `π_n = p_n(B)` for `n = 0..=height+1`.
    pub fn from_weights(weights: WeightModel, b: f64, pi: Vec<f64>) -> Result<Self> {
        if pi.len() < 2 {
            return Err(Error::invalid("need at least pi_0 and pi_1"));
        }
        if pi.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::invalid("pi_n must be positive and finite"));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("B must be positive"));
        }
        let rows = (0..pi.len() - 1).map(|n| general_row_x(&weights, b, &pi, n)).collect();
        Ok(ChainSpec {
            source: Source::General { weights, b, pi },
            rows,
        })
    }

    /// Largest state with a cached row.
    pub fn height(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn q_params(&self) -> Option<&QModelParams> {
        match &self.source {
            Source::Q { model, .. } => Some(model),
            Source::General { .. } => None,
        }
    }

    pub fn weights(&self) -> WeightModel {
        match &self.source {
            Source::Q { model, .. } => WeightModel::q_model(*model),
            Source::General { weights, .. } => weights.clone(),
        }
    }

    /// Right endpoint `B` of the support of the orthogonality measure.
    pub fn right_endpoint(&self) -> f64 {
        match &self.source {
            Source::Q { model, .. } => model.support().b,
            Source::General { b, .. } => *b,
        }
    }

    /// `π_n = p_n(B)`.
    pub fn pi(&self, n: usize) -> Result<f64> {
        match &self.source {
            Source::Q { model, s } => {
                let sn = match s.get(n) {
                    Some(&v) => v,
                    None => s_value(n, model)?,
                };
                Ok(sn / q_number(n + 1, model.q()))
            }
            Source::General { pi, .. } => pi.get(n).copied().ok_or(Error::CapInsufficient {
                what: "pi table",
                cap: pi.len() - 1,
                needed: n,
            }),
        }
    }

    /// `π̃_n = π_n Π_{k<n} a_k / c_{k+1}`.
    pub fn pi_tilde(&self, n: usize) -> Result<f64> {
        let w = self.weights();
        let ln: f64 = (0..n).map(|k| (w.up(k) / w.down(k + 1)).ln()).sum();
        Ok(self.pi(n)? * ln.exp())
    }

    /// Cached rows for states `0..=n_max`, extended on demand.
    pub(crate) fn rows_up_to(&self, n_max: usize) -> Result<Cow<'_, [Row]>> {
        if n_max <= self.height() {
            return Ok(Cow::Borrowed(&self.rows[..=n_max]));
        }
        match &self.source {
            Source::Q { model, s } => {
                let mut s = s.clone();
                let start = s.len();
                let extra = s_range(start, n_max + 1, model)?;
                s.extend(extra);
                let mut rows = self.rows.clone();
                rows.extend((rows.len()..=n_max).map(|n| q_row(n, model, s[n - 1], s[n], s[n + 1])));
                Ok(Cow::Owned(rows))
            }
            Source::General { pi, .. } => Err(Error::CapInsufficient {
                what: "pi table",
                cap: pi.len() - 2,
                needed: n_max,
            }),
        }
    }

    /// A copy with rows cached up to `height`.
    pub fn extended(&self, height: usize) -> Result<Self> {
        let rows = self.rows_up_to(height)?.into_owned();
        let source = match &self.source {
            Source::Q { model, s } if s.len() < height + 2 => {
                let mut s = s.clone();
                let extra = s_range(s.len(), height + 1, model)?;
                s.extend(extra);
                Source::Q { model: *model, s }
            }
            other => other.clone(),
        };
        Ok(ChainSpec { source, rows })
    }

    /// The row of state `n` from the general formula
    /// `(1/B)(c_n π_{n-1}/π_n, b_n, a_n π_{n+1}/π_n)`.
    pub fn general_row_x(&self, n: usize) -> Result<Row> {
        let w = self.weights();
        let b = self.right_endpoint();
        let pi: Vec<f64> = (n.saturating_sub(1)..=n + 1).map(|k| self.pi(k)).collect::<Result<_>>()?;
        let (prev, cur, next) = if n == 0 { (0.0, pi[0], pi[1]) } else { (pi[0], pi[1], pi[2]) };
        Ok([w.down(n) * prev / (b * cur), w.flat(n) / b, w.up(n) * next / (b * cur)])
    }

    /// The row of state `n` of `Y` from
    /// `(1/B)(a_{n-1} π̃_{n-1}/π̃_n, b_n, c_{n+1} π̃_{n+1}/π̃_n)`.
    pub fn general_row_y(&self, n: usize) -> Result<Row> {
        let w = self.weights();
        let b = self.right_endpoint();
        let cur = self.pi_tilde(n)?;
        let next = self.pi_tilde(n + 1)?;
        let down = if n == 0 { 0.0 } else { w.up(n - 1) * self.pi_tilde(n - 1)? / (b * cur) };
        Ok([down, w.flat(n) / b, w.down(n + 1) * next / (b * cur)])
    }
}

fn general_row_x(w: &WeightModel, b: f64, pi: &[f64], n: usize) -> Row {
    let prev = if n == 0 { 0.0 } else { pi[n - 1] };
    [w.down(n) * prev / (b * pi[n]), w.flat(n) / b, w.up(n) * pi[n + 1] / (b * pi[n])]
}

/// Transition probabilities from `n` to `n-1, n, n+1`.
pub fn transition_row(n: usize, spec: &ChainSpec) -> Result<Distribution> {
    let row = match spec.rows.get(n) {
        Some(r) => *r,
        None => match &spec.source {
            Source::Q { model, .. } => {
                let s = s_range(n.saturating_sub(1), n + 1, model)?;
                if n == 0 {
                    q_row(n, model, 0.0, s[0], s[1])
                } else {
                    q_row(n, model, s[0], s[1], s[2])
                }
            }
            Source::General { .. } => spec.rows_up_to(n)?[n],
        },
    };
    if n == 0 {
        Distribution::new(0, vec![row[1], row[2]])
    } else {
        Distribution::new(n - 1, row.to_vec())
    }
}

/// `Σ_n ρⁿ s_n = (aρ, bρ; q)_∞ / (ρ; q)_∞²` for the q-model.
pub fn initial_normalizer(rho: f64, model: &QModelParams) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Divergent(format!("rho = {rho} must lie in [0, 1)")));
    }
    let policy = TruncationPolicy::default();
    let a = model.asc_a();
    let r = Complex64::new(rho, 0.0);
    let ln = ln_qpoch_infinite(a * rho, model.q(), &policy)?
        + ln_qpoch_infinite(a.conj() * rho, model.q(), &policy)?
        - 2.0 * ln_qpoch_infinite(r, model.q(), &policy)?;
    Ok(ln.re.exp())
}

/// Largest state considered by [`initial_law`].
pub const INITIAL_LAW_CAP: usize = 1 << 20;

/// The law of `X_0` (`∝ α_n π_n`) or `Y_0` (`∝ β_n π̃_n`), truncated once
/// the remaining mass is below `tail_tol` and renormalized.
///
/// For the q-model both are `∝ ρⁿ s_n` and the stopping rule uses the
/// closed-form normalizer, with a tail bound assuming `s_n` grows at most
/// linearly as a fallback when the closed form is not accurate to `tail_tol`.
pub fn initial_law(side: Side, spec: &ChainSpec, tail_tol: f64) -> Result<Distribution> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::invalid("tail_tol must lie in (0, 1)"));
    }
    match &spec.source {
        Source::Q { model, s } => {
            let rho = match side {
                Side::X => model.rho0(),
                Side::Y => model.rho1(),
            };
            if rho == 0.0 {
                return Ok(Distribution::point(0));
            }
            let c = initial_normalizer(rho, model)?;
            let ln_rho = rho.ln();
            let mut probs = Vec::new();
            let mut total = 0.0;
            let mut s = Cow::Borrowed(s.as_slice());
            for n in 0..INITIAL_LAW_CAP {
                if n >= s.len() {
                    let mut grown = s.into_owned();
                    let start = grown.len();
                    let extra = s_range(start, 2 * start - 1, model)?;
                    grown.extend(extra);
                    s = Cow::Owned(grown);
                }
                let term = (n as f64 * ln_rho).exp() * s[n];
                probs.push(term);
                total += term;
                let tail = term * rho * (1.0 / (1.0 - rho) + rho / ((n + 1) as f64 * (1.0 - rho).powi(2)));
                if c - total <= tail_tol * c || tail <= 1e-3 * tail_tol * total {
                    probs.iter_mut().for_each(|p| *p /= total);
                    return Distribution::new(0, probs);
                }
            }
            Err(Error::CapInsufficient {
                what: "initial law",
                cap: INITIAL_LAW_CAP,
                needed: INITIAL_LAW_CAP + 1,
            })
        }
        Source::General { weights, pi, .. } => {
            let mut probs = Vec::with_capacity(pi.len());
            for n in 0..pi.len() {
                probs.push(match side {
                    Side::X => weights.alpha(n) * pi[n],
                    Side::Y => weights.beta(n) * spec.pi_tilde(n)?,
                });
            }
            let total: f64 = probs.iter().sum();
            if !(total > 0.0 && total.is_finite()) {
                return Err(Error::invalid("initial weights must have positive finite mass"));
            }
            let last = *probs.last().expect("nonempty");
            let support_ends = weights.boundary_support().is_some_and(|k| k < pi.len());
            let tail_ok = match weights.boundary_rate() {
                Some(r) if r < 1.0 => last * r / (1.0 - r) <= tail_tol * total,
                _ => false,
            };
            if !(support_ends || tail_ok) {
                return Err(Error::CapInsufficient {
                    what: "pi table for the initial law",
                    cap: pi.len() - 1,
                    needed: pi.len(),
                });
            }
            probs.iter_mut().for_each(|p| *p /= total);
            Distribution::new(0, probs)
        }
    }
}
