use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::transfer::{beta_vector, boundary_height, ScaledVector, TruncatedOperator};
use super::{path_weight, MotzkinPath, WeightModel};
use crate::error::{Error, Result};

/// The path measure `Pr_L(γ) = α_{γ_0} β_{γ_L} w(γ) / 𝔠_L` with boundary
/// altitudes truncated at a height `h` chosen from `tail_tol`.
///
/// Stores the forward vectors `f_k = V_α(1)ᵀ M_1^k` and backward vectors
/// `u_k = M_1^{L-k} W_β(1)` for all `k`, which give exact marginals of
/// path prefixes and suffixes and drive the exact sequential sampler.
#[derive(Debug, Clone)]
pub struct PathMeasure {
    model: WeightModel,
    len: usize,
    h: usize,
    op: TruncatedOperator,
    forward: Vec<ScaledVector>,
    backward: Vec<ScaledVector>,
    ln_c: f64,
}

impl PathMeasure {
    pub fn new(model: &WeightModel, l: usize, height_cap: usize, tail_tol: f64) -> Result<Self> {
        let (h, _) = boundary_height(model, &vec![1.0; l], tail_tol, height_cap)?;
        let size = h + l + 1;
        let op = TruncatedOperator::new(model, size, 1.0)?;
        let mut forward = Vec::with_capacity(l + 1);
        let init: Vec<f64> = (0..size).map(|m| if m <= h { model.alpha(m) } else { 0.0 }).collect();
        forward.push(ScaledVector::new(init));
        let mut buf = vec![0.0; size];
        for k in 0..l {
            let mut next = forward[k].clone();
            op.row_apply(&forward[k].data, &mut buf);
            next.data.copy_from_slice(&buf);
            next.normalize();
            forward.push(next);
        }
        let mut backward = vec![ScaledVector::new(beta_vector(model, h, 1.0, size))];
        for _ in 0..l {
            let last = backward.last().expect("nonempty");
            let mut next = last.clone();
            op.col_apply(&last.data, &mut buf);
            next.data.copy_from_slice(&buf);
            next.normalize();
            backward.push(next);
        }
        backward.reverse();
        let ln_c = forward[0].ln_dot(&backward[0].data) + backward[0].ln_scale;
        if !ln_c.is_finite() {
            return Err(Error::invalid("the normalizing constant vanishes for this model"));
        }
        Ok(PathMeasure {
            model: model.clone(),
            len: l,
            h,
            op,
            forward,
            backward,
            ln_c,
        })
    }

    pub fn model(&self) -> &WeightModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Largest boundary altitude kept by the truncation.
    pub fn boundary_height(&self) -> usize {
        self.h
    }

    /// Number of states of the truncated operator, `h + L + 1`.
    pub fn size(&self) -> usize {
        self.op.size()
    }

    pub fn ln_normalizing_constant(&self) -> f64 {
        self.ln_c
    }

    fn step_weight(&self, from: usize, to: usize) -> f64 {
        match to as i64 - from as i64 {
            1 => self.model.up(from),
            0 => self.model.flat(from),
            -1 => self.model.down(from),
            _ => 0.0,
        }
    }

    fn steps_weight(alt: &[usize], w: impl Fn(usize, usize) -> f64) -> f64 {
        alt.windows(2).map(|p| w(p[0], p[1])).product()
    }

    /// `P(γ_0 = p_0, ..., γ_j = p_j)`.
    pub fn prefix_probability(&self, prefix: &[usize]) -> f64 {
        let j = prefix.len().saturating_sub(1);
        if prefix.is_empty() || j > self.len || prefix.iter().any(|&x| x >= self.size()) {
            return 0.0;
        }
        if prefix[0] > self.h {
            return 0.0;
        }
        let w = Self::steps_weight(prefix, |a, b| self.step_weight(a, b));
        let u = &self.backward[j];
        let last = prefix[j];
        times_exp(self.model.alpha(prefix[0]) * w * u.data[last], u.ln_scale - self.ln_c)
    }

    /// `P(γ_L = r_0, γ_{L-1} = r_1, ..., γ_{L-j} = r_j)`.
    pub fn suffix_probability(&self, reversed: &[usize]) -> f64 {
        let j = reversed.len().saturating_sub(1);
        if reversed.is_empty() || j > self.len || reversed.iter().any(|&x| x >= self.size()) {
            return 0.0;
        }
        if reversed[0] > self.h {
            return 0.0;
        }
        let forward_order: Vec<usize> = reversed.iter().rev().copied().collect();
        let w = Self::steps_weight(&forward_order, |a, b| self.step_weight(a, b));
        let f = &self.forward[self.len - j];
        times_exp(f.data[reversed[j]] * w * self.model.beta(reversed[0]), f.ln_scale - self.ln_c)
    }

    /// `P(γ = path)`.
    pub fn path_probability(&self, path: &MotzkinPath) -> f64 {
        if path.len() != self.len || path.start() > self.h || path.end() > self.h {
            return 0.0;
        }
        let w = path_weight(path, &self.model);
        times_exp(self.model.alpha(path.start()) * w * self.model.beta(path.end()), -self.ln_c)
    }

    /// Joint law of `(γ_0, γ_L)` on `{0..=h}²`, row-major.
    pub fn endpoint_law(&self) -> Vec<Vec<f64>> {
        let size = self.size();
        (0..=self.h)
            .into_par_iter()
            .map(|m| {
                let mut v = vec![0.0; size];
                v[m] = 1.0;
                let mut v = ScaledVector::new(v);
                let mut buf = vec![0.0; size];
                for _ in 0..self.len {
                    self.op.row_apply(&v.data, &mut buf);
                    std::mem::swap(&mut v.data, &mut buf);
                    v.normalize();
                }
                (0..=self.h)
                    .map(|n| {
                        times_exp(
                            self.model.alpha(m) * v.data[n] * self.model.beta(n),
                            v.ln_scale - self.ln_c,
                        )
                    })
                    .collect()
            })
            .collect()
    }

    /// Draws one path: `γ_0 ∝ α_m u_0[m]`, then each step `∝ (edge weight) · u_{k+1}[next]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MotzkinPath {
        let mut alt = Vec::with_capacity(self.len + 1);
        let start_weights: Vec<f64> = (0..=self.h)
            .map(|m| self.model.alpha(m) * self.backward[0].data[m])
            .collect();
        alt.push(pick(rng, &start_weights));
        for k in 0..self.len {
            let cur = alt[k];
            let u = &self.backward[k + 1].data;
            let lo = cur.saturating_sub(1);
            let hi = (cur + 1).min(self.size() - 1);
            let w: Vec<f64> = (lo..=hi).map(|n| self.step_weight(cur, n) * u[n]).collect();
            alt.push(lo + pick(rng, &w));
        }
        MotzkinPath::new(alt).expect("sampled steps are unit or flat")
    }

    /// `count` independent paths; task `i` uses stream `i` of the ChaCha
    /// generator seeded with `seed`, so the output does not depend on
    /// scheduling.
    pub fn sample_many(&self, count: usize, seed: u64) -> Vec<MotzkinPath> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = task_rng(seed, i as u64);
                self.sample(&mut rng)
            })
            .collect()
    }
}

/// A ChaCha generator for task `task` of a run seeded with `seed`.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

fn pick<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// `x e^{shift}` for `x ≥ 0` without overflow in `e^{shift}`.
fn times_exp(x: f64, shift: f64) -> f64 {
    (x.ln() + shift).exp()
}

/// One exact sample from `Pr_L` for the given seed.
pub fn sample_path(
    l: usize,
    model: &WeightModel,
    height_cap: usize,
    tail_tol: f64,
    seed: u64,
) -> Result<MotzkinPath> {
    let m = PathMeasure::new(model, l, height_cap, tail_tol)?;
    Ok(m.sample(&mut task_rng(seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ascpoly::QModelParams;
    use crate::motzkin::{enumerate_paths, matrix_ansatz_expectation};
    use approx::assert_relative_eq;

    fn model() -> WeightModel {
        WeightModel::q_model(QModelParams::new(0.3, 0.6, 0.35, 0.25).unwrap())
    }

    #[test]
    fn probabilities_sum_to_one() {
        let m = model();
        for l in 0..=6 {
            let pm = PathMeasure::new(&m, l, 10_000, 1e-14).unwrap();
            let mut total = 0.0;
            for a in 0..=pm.boundary_height() {
                for b in a.saturating_sub(l)..=(a + l).min(pm.boundary_height()) {
                    total += enumerate_paths(l, a, b).unwrap().iter().map(|p| pm.path_probability(p)).sum::<f64>();
                }
            }
            assert!((total - 1.0).abs() < 1e-12, "l={l} total={total}");
        }
    }

    #[test]
    fn prefix_and_suffix_marginals() {
        let m = model();
        let pm = PathMeasure::new(&m, 5, 10_000, 1e-14).unwrap();
        let h = pm.boundary_height();
        let p0: f64 = (0..=h).map(|a| pm.prefix_probability(&[a])).sum();
        assert_relative_eq!(p0, 1.0, max_relative = 1e-12);
        // E[z^{γ_0}] two ways
        let z: f64 = 0.6;
        let gen: f64 = (0..=h).map(|a| pm.prefix_probability(&[a]) * z.powi(a as i32)).sum();
        let ma = matrix_ansatz_expectation(z, 1.0, &[], &[], 5, &m, 10_000, 1e-14).unwrap();
        assert_relative_eq!(gen, ma, max_relative = 1e-12);
        // two-step prefix marginal sums to the one-step marginal
        let a = 2;
        let one = pm.prefix_probability(&[a, a + 1]);
        let two: f64 = (a..=a + 2).map(|c| pm.prefix_probability(&[a, a + 1, c])).sum();
        assert_relative_eq!(one, two, max_relative = 1e-12);
        let s1: f64 = (0..=h).map(|b| pm.suffix_probability(&[b])).sum();
        assert_relative_eq!(s1, 1.0, max_relative = 1e-12);
        let joint = pm.endpoint_law();
        let total: f64 = joint.iter().flatten().sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        let row0: f64 = joint[0].iter().sum();
        assert_relative_eq!(row0, pm.prefix_probability(&[0]), max_relative = 1e-12);
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let m = model();
        let a = sample_path(20, &m, 10_000, 1e-12, 7).unwrap();
        let b = sample_path(20, &m, 10_000, 1e-12, 7).unwrap();
        assert_eq!(a, b);
        let pm = PathMeasure::new(&m, 20, 10_000, 1e-12).unwrap();
        assert_eq!(pm.sample_many(50, 3), pm.sample_many(50, 3));
        for p in pm.sample_many(50, 3) {
            assert_eq!(p.len(), 20);
        }
    }
}
