use super::WeightModel;
use crate::error::{Error, Result};

/// Default upper limit on the truncated state space for operations that do
/// not take an explicit cap.
pub const DEFAULT_HEIGHT_CAP: usize = 1 << 20;

/// The tridiagonal matrix `M_t` restricted to heights `0..size`: superdiagonal
/// `a_n t`, diagonal `b_n`, subdiagonal `c_n / t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    t: f64,
    sup: Vec<f64>,
    diag: Vec<f64>,
    sub: Vec<f64>,
}

impl TruncatedOperator {
    pub fn new(model: &WeightModel, size: usize, t: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("operator size must be positive"));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid(format!("t must be positive, got {t}")));
        }
        Ok(TruncatedOperator {
            t,
            sup: (0..size).map(|n| model.up(n) * t).collect(),
            diag: (0..size).map(|n| model.flat(n)).collect(),
            sub: (0..size).map(|n| model.down(n) / t).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if j == i + 1 {
            self.sup[i]
        } else if j == i {
            self.diag[i]
        } else if i == j + 1 {
            self.sub[i]
        } else {
            0.0
        }
    }

    /// `out = vᵀ M`.
    pub fn row_apply(&self, v: &[f64], out: &mut [f64]) {
        let s = self.size();
        for j in 0..s {
            let mut acc = v[j] * self.diag[j];
            if j > 0 {
                acc += v[j - 1] * self.sup[j - 1];
            }
            if j + 1 < s {
                acc += v[j + 1] * self.sub[j + 1];
            }
            out[j] = acc;
        }
    }

    /// `out = M w`.
    pub fn col_apply(&self, w: &[f64], out: &mut [f64]) {
        let s = self.size();
        for j in 0..s {
            let mut acc = self.diag[j] * w[j];
            if j > 0 {
                acc += self.sub[j] * w[j - 1];
            }
            if j + 1 < s {
                acc += self.sup[j] * w[j + 1];
            }
            out[j] = acc;
        }
    }
}

/// A nonnegative vector stored as `data · e^{ln_scale}` with `max data = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledVector {
    pub data: Vec<f64>,
    pub ln_scale: f64,
}

impl ScaledVector {
    pub fn new(data: Vec<f64>) -> Self {
        let mut v = ScaledVector { data, ln_scale: 0.0 };
        v.normalize();
        v
    }

    pub fn normalize(&mut self) {
        let m = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if m > 0.0 && m.is_finite() {
            self.data.iter_mut().for_each(|x| *x /= m);
            self.ln_scale += m.ln();
        }
    }

    /// `ln(self · w)` for a nonnegative result; `-∞` if it vanishes.
    pub fn ln_dot(&self, w: &[f64]) -> f64 {
        let d: f64 = self.data.iter().zip(w).map(|(a, b)| a * b).sum();
        d.ln() + self.ln_scale
    }

    pub fn value(&self, i: usize) -> f64 {
        self.data[i] * self.ln_scale.exp()
    }

    pub fn ln_value(&self, i: usize) -> f64 {
        self.data[i].ln() + self.ln_scale
    }
}

/// Operators `M_t` for the distinct `t` values of a step sequence.
struct OperatorCache {
    ops: Vec<TruncatedOperator>,
}

impl OperatorCache {
    fn new() -> Self {
        OperatorCache { ops: Vec::new() }
    }

    fn get(&mut self, model: &WeightModel, size: usize, t: f64) -> Result<&TruncatedOperator> {
        let idx = match self.ops.iter().position(|o| o.t == t) {
            Some(i) => i,
            None => {
                self.ops.push(TruncatedOperator::new(model, size, t)?);
                self.ops.len() - 1
            }
        };
        Ok(&self.ops[idx])
    }
}

/// `V(z0)ᵀ M_{t_1} ... M_{t_L}` with `V_m = α_m z0^m` for `m ≤ h`, on `h + L + 1` states.
pub(crate) fn propagate_alpha(
    model: &WeightModel,
    h: usize,
    z0: f64,
    steps: &[f64],
) -> Result<ScaledVector> {
    let size = h + steps.len() + 1;
    let mut v = vec![0.0; size];
    for (m, x) in v.iter_mut().enumerate().take(h + 1) {
        *x = model.alpha(m) * z0.powi(m as i32);
    }
    let mut v = ScaledVector::new(v);
    let mut cache = OperatorCache::new();
    let mut out = vec![0.0; size];
    for &t in steps {
        cache.get(model, size, t)?.row_apply(&v.data, &mut out);
        std::mem::swap(&mut v.data, &mut out);
        v.normalize();
    }
    Ok(v)
}

/// `W(z1)` restricted to `n ≤ h` and padded to `size`.
pub(crate) fn beta_vector(model: &WeightModel, h: usize, z1: f64, size: usize) -> Vec<f64> {
    (0..size)
        .map(|n| if n <= h { model.beta(n) * z1.powi(n as i32) } else { 0.0 })
        .collect()
}

fn ln_sandwich(model: &WeightModel, h: usize, z0: f64, z1: f64, steps: &[f64]) -> Result<f64> {
    let v = propagate_alpha(model, h, z0, steps)?;
    let w = beta_vector(model, h, z1, v.data.len());
    Ok(v.ln_dot(&w))
}

/// Chooses the boundary truncation height `h` so that boundary altitudes
/// above `h` carry at most `tail_tol` of the normalizing constant.
///
/// The discarded mass is bounded by `G^L (Σ_{m>h} α_m Σ β + Σ α Σ_{n>h} β_n)`
/// where `G` bounds the row and column sums of every `M_{t_j}`.
pub(crate) fn boundary_height(
    model: &WeightModel,
    steps: &[f64],
    tail_tol: f64,
    height_cap: usize,
) -> Result<(usize, f64)> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::invalid(format!("tail_tol must lie in (0, 1), got {tail_tol}")));
    }
    let l = steps.len();
    let ones = vec![1.0; l];
    let check_cap = |h: usize| {
        if h + l + 1 > height_cap + 1 {
            Err(Error::CapInsufficient {
                what: "boundary truncation",
                cap: height_cap,
                needed: h + l,
            })
        } else {
            Ok(())
        }
    };
    if let Some(h) = model.boundary_support() {
        check_cap(h)?;
        let ln_c = ln_sandwich(model, h, 1.0, 1.0, &ones)?;
        return finite_constant(h, ln_c);
    }
    model.check_summable()?;
    let g = model.edge_sum_bound();
    let ln_growth: f64 = steps.iter().map(|t| (g * t.max(1.0 / t)).ln()).sum();
    let (alpha_total, beta_total) = model.boundary_tails(None)?;
    let rate = model.boundary_rate().unwrap_or(0.0);
    let mut h = 4usize;
    loop {
        check_cap(h)?;
        let ln_c = ln_sandwich(model, h, 1.0, 1.0, &ones)?;
        let (at, bt) = model.boundary_tails(Some(h))?;
        let tail = at * beta_total + alpha_total * bt;
        if tail == 0.0 {
            return finite_constant(h, ln_c);
        }
        let deficit = ln_growth + tail.ln() - tail_tol.ln() - ln_c;
        if deficit <= 0.0 {
            return finite_constant(h, ln_c);
        }
        let step = (deficit / -rate.ln()).ceil() as usize + 1;
        h += step.max(1);
    }
}

fn finite_constant(h: usize, ln_c: f64) -> Result<(usize, f64)> {
    if ln_c.is_finite() {
        Ok((h, ln_c))
    } else {
        Err(Error::invalid("the normalizing constant vanishes for this model"))
    }
}

/// `ln 𝔚^{(L)}_{m,n}`, the log of the total weight of paths from `m` to `n`.
pub fn ln_partition_weight(
    l: usize,
    m: usize,
    n: usize,
    model: &WeightModel,
    height_cap: usize,
) -> Result<f64> {
    // paths from m to n in L steps stay below ⌊(m+n+L)/2⌋
    let needed = ((m + n + l) / 2).max(m).max(n);
    if height_cap < needed {
        return Err(Error::CapInsufficient {
            what: "partition_weight",
            cap: height_cap,
            needed,
        });
    }
    if m.abs_diff(n) > l {
        return Ok(f64::NEG_INFINITY);
    }
    let size = needed + 1;
    let op = TruncatedOperator::new(model, size, 1.0)?;
    let mut v = vec![0.0; size];
    v[m] = 1.0;
    let mut v = ScaledVector::new(v);
    let mut out = vec![0.0; size];
    for _ in 0..l {
        op.row_apply(&v.data, &mut out);
        std::mem::swap(&mut v.data, &mut out);
        v.normalize();
    }
    Ok(v.data[n].ln() + v.ln_scale)
}

/// `𝔚^{(L)}_{m,n} = Σ_{γ ∈ 𝓜^{(L)}_{m,n}} w(γ)` by transfer recursion.
pub fn partition_weight(
    l: usize,
    m: usize,
    n: usize,
    model: &WeightModel,
    height_cap: usize,
) -> Result<f64> {
    let v = ln_partition_weight(l, m, n, model, height_cap)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("partition_weight"))
    }
}

/// `ln 𝔠_L`, the log of `Σ_{m,n} α_m 𝔚^{(L)}_{m,n} β_n`.
pub fn ln_normalizing_constant(l: usize, model: &WeightModel, tail_tol: f64) -> Result<f64> {
    Ok(boundary_height(model, &vec![1.0; l], tail_tol, DEFAULT_HEIGHT_CAP)?.1)
}

/// `𝔠_L = V_α(1)ᵀ M_1^L W_β(1)` with the boundary sums truncated at relative
/// tail `tail_tol`.
pub fn normalizing_constant(l: usize, model: &WeightModel, tail_tol: f64) -> Result<f64> {
    let v = ln_normalizing_constant(l, model, tail_tol)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("normalizing_constant"))
    }
}

pub(crate) fn check_generating_args(z0: f64, z1: f64, t: &[f64], s: &[f64], l: usize) -> Result<()> {
    if t.len() != s.len() {
        return Err(Error::invalid("t and s must have the same length K"));
    }
    if 2 * t.len() > l {
        return Err(Error::invalid(format!("2K = {} exceeds L = {l}", 2 * t.len())));
    }
    for z in [z0, z1] {
        if !(z > 0.0 && z <= 1.0) {
            return Err(Error::invalid(format!("z must lie in (0, 1], got {z}")));
        }
    }
    if t.iter().chain(s).any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::invalid("t and s entries must be positive"));
    }
    Ok(())
}

/// Steps `t_1, ..., t_K, 1, ..., 1, 1/s_K, ..., 1/s_1`.
pub(crate) fn step_sequence(t: &[f64], s: &[f64], l: usize) -> Vec<f64> {
    let k = t.len();
    let mut steps = Vec::with_capacity(l);
    steps.extend_from_slice(t);
    steps.extend(std::iter::repeat(1.0).take(l - 2 * k));
    steps.extend(s.iter().rev().map(|x| 1.0 / x));
    steps
}

/// `E[z0^{γ_0} Π t_j^{γ_j - γ_{j-1}} Π s_j^{γ_{L-j} - γ_{L-j+1}} z1^{γ_L}]`
/// as `V_α(z0)ᵀ M_{t_1}…M_{t_K} M_1^{L-2K} M_{1/s_K}…M_{1/s_1} W_β(z1) / 𝔠_L`.
#[allow(clippy::too_many_arguments)]
pub fn matrix_ansatz_expectation(
    z0: f64,
    z1: f64,
    t: &[f64],
    s: &[f64],
    l: usize,
    model: &WeightModel,
    height_cap: usize,
    tail_tol: f64,
) -> Result<f64> {
    check_generating_args(z0, z1, t, s, l)?;
    let steps = step_sequence(t, s, l);
    let (h, ln_c) = boundary_height(model, &steps, tail_tol, height_cap)?;
    let ln_num = ln_sandwich(model, h, z0, z1, &steps)?;
    Ok((ln_num - ln_c).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ascpoly::QModelParams;
    use crate::motzkin::{enumerate_paths, path_weight};
    use approx::assert_relative_eq;

    fn qm(q: f64, sigma: f64, rho: f64) -> WeightModel {
        WeightModel::q_model(QModelParams::new(q, sigma, rho, rho).unwrap())
    }

    #[test]
    fn operator_pattern() {
        let m = qm(0.3, 0.5, 0.2);
        let op = TruncatedOperator::new(&m, 5, 2.0).unwrap();
        assert_eq!(op.entry(1, 2), m.up(1) * 2.0);
        assert_eq!(op.entry(2, 2), m.flat(2));
        assert_eq!(op.entry(2, 1), m.down(2) / 2.0);
        assert_eq!(op.entry(0, 3), 0.0);
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        let mut out = [0.0; 5];
        op.row_apply(&v, &mut out);
        for j in 0..5 {
            let want: f64 = (0..5).map(|i| v[i] * op.entry(i, j)).sum();
            assert_relative_eq!(out[j], want, max_relative = 1e-15);
        }
        op.col_apply(&v, &mut out);
        for i in 0..5 {
            let want: f64 = (0..5).map(|j| op.entry(i, j) * v[j]).sum();
            assert_relative_eq!(out[i], want, max_relative = 1e-15);
        }
    }

    #[test]
    fn unit_weights_count_paths() {
        let m = WeightModel::unit(0.5, 0.5).unwrap();
        assert_relative_eq!(partition_weight(4, 0, 0, &m, 10).unwrap(), 9.0, max_relative = 1e-14);
        assert_relative_eq!(partition_weight(0, 3, 3, &m, 10).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(partition_weight(0, 3, 2, &m, 10).unwrap(), 0.0);
        assert!(matches!(
            partition_weight(10, 0, 0, &m, 4),
            Err(Error::CapInsufficient { .. })
        ));
        assert_relative_eq!(partition_weight(10, 0, 0, &m, 5).unwrap(), 2188.0, max_relative = 1e-14);
    }

    #[test]
    fn partition_weight_matches_enumeration() {
        let m = qm(0.35, 0.6, 0.3);
        for l in 0..=8 {
            for a in 0..3 {
                for b in 0..3 {
                    let brute: f64 = enumerate_paths(l, a, b).unwrap().iter().map(|p| path_weight(p, &m)).sum();
                    let tm = partition_weight(l, a, b, &m, 20).unwrap();
                    assert!((brute - tm).abs() <= 1e-12 * brute.max(1e-300), "l={l} {a}->{b}");
                }
            }
        }
    }

    #[test]
    fn normalizing_constant_at_zero_length() {
        let p = QModelParams::new(0.4, 0.5, 0.3, 0.6).unwrap();
        let m = WeightModel::q_model(p);
        let want: f64 = (0..200)
            .map(|n| (0.18f64).powi(n) * crate::qspecial::q_number(n as usize + 1, p.q()))
            .sum();
        assert_relative_eq!(normalizing_constant(0, &m, 1e-14).unwrap(), want, max_relative = 1e-12);
    }

    #[test]
    fn trivial_expectation_and_argument_checks() {
        let m = qm(0.2, 0.9, 0.4);
        let e = matrix_ansatz_expectation(1.0, 1.0, &[1.0, 1.0], &[1.0, 1.0], 6, &m, 1000, 1e-13).unwrap();
        assert_relative_eq!(e, 1.0, max_relative = 1e-13);
        assert!(matrix_ansatz_expectation(1.0, 1.0, &[1.0; 4], &[1.0; 4], 6, &m, 1000, 1e-13).is_err());
        assert!(matrix_ansatz_expectation(1.5, 1.0, &[], &[], 6, &m, 1000, 1e-13).is_err());
        assert!(matches!(
            matrix_ansatz_expectation(0.5, 1.0, &[], &[], 6, &m, 8, 1e-13),
            Err(Error::CapInsufficient { .. })
        ));
    }

    #[test]
    fn divergent_boundary() {
        let m = WeightModel::unit(1.2, 0.1).unwrap();
        assert!(matches!(normalizing_constant(3, &m, 1e-10), Err(Error::Divergent(_))));
    }
}
