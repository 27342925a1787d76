use crate::ascpoly::QModelParams;
use crate::error::{Error, Result};
use crate::qspecial::q_number;

/// Edge weights `(a_n, b_n, c_n)` and boundary weights `(α_n, β_n)` of a
/// path measure.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightModel {
    /// `a_n = [n+2]_q`, `b_n = 2σ[n+1]_q`, `c_n = [n]_q`,
    /// `α_n = ρ₀ⁿ[n+1]_q`, `β_n = ρ₁ⁿ`.
    Q(QModelParams),
    /// All edge weights 1, `α_n = ρ₀ⁿ`, `β_n = ρ₁ⁿ`.
    Unit { rho0: f64, rho1: f64 },
    /// Explicit tables. Edge weights past the end repeat the last entry;
    /// boundary weights past the end are 0.
    Table(TabulatedWeights),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedWeights {
    up: Vec<f64>,
    flat: Vec<f64>,
    down: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl TabulatedWeights {
    pub fn new(
        up: Vec<f64>,
        flat: Vec<f64>,
        down: Vec<f64>,
        alpha: Vec<f64>,
        beta: Vec<f64>,
    ) -> Result<Self> {
        if up.is_empty() || flat.is_empty() || down.is_empty() {
            return Err(Error::invalid("edge weight tables must be nonempty"));
        }
        if alpha.is_empty() || beta.is_empty() {
            return Err(Error::invalid("boundary weight tables must be nonempty"));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if ![&up, &flat, &down, &alpha, &beta].iter().all(|v| finite(v)) {
            return Err(Error::invalid("weights must be finite"));
        }
        if up.iter().any(|&x| x <= 0.0) {
            return Err(Error::invalid("up weights a_n must be positive"));
        }
        if flat.iter().any(|&x| x < 0.0) {
            return Err(Error::invalid("flat weights b_n must be nonnegative"));
        }
        if down.iter().skip(1).any(|&x| x <= 0.0) || down[0] < 0.0 {
            return Err(Error::invalid("down weights c_n must be positive for n >= 1"));
        }
        if alpha.iter().chain(&beta).any(|&x| x < 0.0) {
            return Err(Error::invalid("boundary weights must be nonnegative"));
        }
        Ok(TabulatedWeights {
            up,
            flat,
            down,
            alpha,
            beta,
        })
    }

    pub fn up_table(&self) -> &[f64] {
        &self.up
    }

    pub fn flat_table(&self) -> &[f64] {
        &self.flat
    }

    pub fn down_table(&self) -> &[f64] {
        &self.down
    }

    pub fn alpha_table(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta_table(&self) -> &[f64] {
        &self.beta
    }
}

fn at(v: &[f64], n: usize) -> f64 {
    v[n.min(v.len() - 1)]
}

impl WeightModel {
    pub fn q_model(p: QModelParams) -> Self {
        WeightModel::Q(p)
    }

    pub fn unit(rho0: f64, rho1: f64) -> Result<Self> {
        if !(rho0 >= 0.0 && rho1 >= 0.0 && rho0.is_finite() && rho1.is_finite()) {
            return Err(Error::invalid("rho0 and rho1 must be finite and nonnegative"));
        }
        Ok(WeightModel::Unit { rho0, rho1 })
    }

    pub fn as_q_model(&self) -> Option<&QModelParams> {
        match self {
            WeightModel::Q(p) => Some(p),
            _ => None,
        }
    }

    pub fn up(&self, n: usize) -> f64 {
        match self {
            WeightModel::Q(p) => p.up(n),
            WeightModel::Unit { .. } => 1.0,
            WeightModel::Table(t) => at(&t.up, n),
        }
    }

    pub fn flat(&self, n: usize) -> f64 {
        match self {
            WeightModel::Q(p) => p.flat(n),
            WeightModel::Unit { .. } => 1.0,
            WeightModel::Table(t) => at(&t.flat, n),
        }
    }

    pub fn down(&self, n: usize) -> f64 {
        match self {
            WeightModel::Q(p) => p.down(n),
            WeightModel::Unit { .. } => {
                if n == 0 {
                    0.0
                } else {
                    1.0
                }
            }
            WeightModel::Table(t) => at(&t.down, n),
        }
    }

    pub fn alpha(&self, n: usize) -> f64 {
        match self {
            WeightModel::Q(p) => p.rho0().powi(n as i32) * q_number(n + 1, p.q()),
            WeightModel::Unit { rho0, .. } => rho0.powi(n as i32),
            WeightModel::Table(t) => t.alpha.get(n).copied().unwrap_or(0.0),
        }
    }

    pub fn beta(&self, n: usize) -> f64 {
        match self {
            WeightModel::Q(p) => p.rho1().powi(n as i32),
            WeightModel::Unit { rho1, .. } => rho1.powi(n as i32),
            WeightModel::Table(t) => t.beta.get(n).copied().unwrap_or(0.0),
        }
    }

    /// Upper bound on every row sum `a_n + b_n + c_n` and column sum
    /// `a_{n-1} + b_n + c_{n+1}` of `M_1`.
    pub fn edge_sum_bound(&self) -> f64 {
        match self {
            WeightModel::Q(p) => p.support().b,
            WeightModel::Unit { .. } => 3.0,
            WeightModel::Table(t) => {
                let len = t.up.len().max(t.flat.len()).max(t.down.len()) + 1;
                (0..len)
                    .map(|n| {
                        let row = at(&t.up, n) + at(&t.flat, n) + at(&t.down, n);
                        let prev_up = if n == 0 { 0.0 } else { at(&t.up, n - 1) };
                        let col = prev_up + at(&t.flat, n) + at(&t.down, n + 1);
                        row.max(col)
                    })
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Upper bounds on `Σ_{n>h} α_n` and `Σ_{n>h} β_n`; `h = None` bounds the
    /// full sums.
    pub fn boundary_tails(&self, h: Option<usize>) -> Result<(f64, f64)> {
        let start = h.map_or(0, |h| h + 1);
        let geo = |r: f64| -> Result<f64> {
            if r >= 1.0 {
                Err(Error::Divergent(format!(
                    "boundary weights decay like {r}^n and are not summable"
                )))
            } else if r == 0.0 {
                Ok(if start == 0 { 1.0 } else { 0.0 })
            } else {
                Ok(r.powi(start as i32) / (1.0 - r))
            }
        };
        match self {
            WeightModel::Q(p) => {
                let cap = 1.0 / (1.0 - p.q().value());
                Ok((geo(p.rho0())? * cap, geo(p.rho1())?))
            }
            WeightModel::Unit { rho0, rho1 } => Ok((geo(*rho0)?, geo(*rho1)?)),
            WeightModel::Table(t) => {
                let tail = |v: &[f64]| v.iter().skip(start).sum::<f64>();
                Ok((tail(&t.alpha), tail(&t.beta)))
            }
        }
    }

    /// Geometric decay rate of the boundary weights, used to size the
    /// truncation; `None` for finitely supported tables.
    pub(crate) fn boundary_rate(&self) -> Option<f64> {
        match self {
            WeightModel::Q(p) => Some(p.rho0().max(p.rho1())),
            WeightModel::Unit { rho0, rho1 } => Some(rho0.max(*rho1)),
            WeightModel::Table(_) => None,
        }
    }

    /// Largest index with a nonzero boundary weight, if finite.
    pub(crate) fn boundary_support(&self) -> Option<usize> {
        match self {
            WeightModel::Table(t) => Some(t.alpha.len().max(t.beta.len()) - 1),
            _ => None,
        }
    }

    /// Heuristic check that the boundary weights are summable against the
    /// model. Tables are finitely supported; geometric weights need rate
    /// below 1. This is a numerical sanity check, not a proof of
    /// integrability for general models.
    pub fn check_summable(&self) -> Result<()> {
        self.boundary_tails(None).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn q_model_boundary_weights() {
        let p = QModelParams::new(0.6, 0.5, 0.3, 0.4).unwrap();
        let m = WeightModel::q_model(p);
        for n in 0..10 {
            assert_relative_eq!(m.alpha(n), 0.3f64.powi(n as i32) * q_number(n + 1, p.q()), max_relative = 1e-14);
            assert_relative_eq!(m.beta(n), 0.4f64.powi(n as i32), max_relative = 1e-14);
        }
        assert_eq!(m.down(0), 0.0);
    }

    #[test]
    fn divergence_and_tables() {
        assert!(matches!(
            WeightModel::unit(1.0, 0.5).unwrap().check_summable(),
            Err(Error::Divergent(_))
        ));
        let t = TabulatedWeights::new(vec![1.0, 2.0], vec![0.5], vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0]).unwrap();
        let m = WeightModel::Table(t);
        assert_eq!(m.up(7), 2.0);
        assert_eq!(m.alpha(2), 0.0);
        assert_eq!(m.boundary_tails(Some(0)).unwrap(), (1.0, 0.0));
        assert!(m.edge_sum_bound() >= 3.5);
        assert!(TabulatedWeights::new(vec![0.0], vec![1.0], vec![1.0], vec![1.0], vec![1.0]).is_err());
    }
}
