use std::borrow::Cow;

use rand::Rng;
use rayon::prelude::*;

use super::{initial_law, ChainSpec, Distribution, Row, Side};
use crate::ascpoly::{motzkin_poly_values, OrthogonalityMeasure};
use crate::error::{Error, Result};
use crate::motzkin::task_rng;
use crate::qspecial::q_number;
use crate::quad::QuadPolicy;

/// Node cap for [`kstep_transition_integral`].
pub const KSTEP_MAX_NODES: usize = 1 << 15;

/// The law after `k` steps from `start`, by iterating the tridiagonal
/// transition operator on states `0..=height_cap`.
pub fn kstep_distribution(
    start: &Distribution,
    k: usize,
    spec: &ChainSpec,
    height_cap: usize,
) -> Result<Distribution> {
    let needed = start.max_state() + k;
    if needed > height_cap {
        return Err(Error::CapInsufficient {
            what: "k-step distribution",
            cap: height_cap,
            needed,
        });
    }
    if k == 0 {
        return Ok(start.clone());
    }
    let rows = spec.rows_up_to(needed - 1)?;
    let mut lo = start.offset();
    let mut cur = vec![0.0; needed + 1];
    cur[lo..=start.max_state()].copy_from_slice(start.probs());
    let mut next = vec![0.0; needed + 1];
    let mut hi = start.max_state();
    for _ in 0..k {
        let new_lo = lo.saturating_sub(1);
        next[new_lo..=hi + 1].iter_mut().for_each(|v| *v = 0.0);
        for i in lo..=hi {
            let p = cur[i];
            if p == 0.0 {
                continue;
            }
            let [d, f, u] = rows[i];
            if i > 0 {
                next[i - 1] += p * d;
            }
            next[i] += p * f;
            next[i + 1] += p * u;
        }
        std::mem::swap(&mut cur, &mut next);
        lo = new_lo;
        hi += 1;
    }
    Distribution::new(lo, cur[lo..=hi].to_vec())
}

/// `P(X_k = n | X_0 = m) = (π_n/π_m) B^{-k} ∫ x^k p_m(x) p̃_n(x) ν(dx)` with
/// `p̃_n = [n+1]_q p_n`, by quadrature over `ν`. Gives up with
/// `NonConvergence` past 2¹⁵ nodes.
pub fn kstep_transition_integral(
    m: usize,
    n: usize,
    k: usize,
    spec: &ChainSpec,
    quad: &QuadPolicy,
) -> Result<f64> {
    let model = *spec
        .q_params()
        .ok_or_else(|| Error::invalid("the integral route needs a q-model chain"))?;
    let nu = OrthogonalityMeasure::new(model)?;
    let b = model.support().b;
    let top = m.max(n);
    let policy = quad.with_max_nodes(quad.max_nodes.min(KSTEP_MAX_NODES));
    let mut err = None;
    let v = nu.integrate_vec(
        |x, out| match motzkin_poly_values(top, x, &model) {
            Ok(p) => out[0] = (x / b).powi(k as i32) * p[m] * p[n],
            Err(e) => {
                err.get_or_insert(e);
                out[0] = 0.0;
            }
        },
        1,
        &[],
        &policy,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(spec.pi(n)? / spec.pi(m)? * q_number(n + 1, model.q()) * v[0])
}

fn step<R: Rng + ?Sized>(row: &Row, n: usize, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    if u < row[0] {
        n - 1
    } else if u < row[0] + row[1] {
        n
    } else {
        n + 1
    }
}

fn run<R: Rng + ?Sized>(spec: &ChainSpec, start: usize, steps: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut rows: Cow<'_, [Row]> = spec.rows_up_to(spec.height().max(start + 1))?;
    let mut path = Vec::with_capacity(steps + 1);
    let mut n = start;
    path.push(n);
    for _ in 0..steps {
        if n >= rows.len() {
            rows = Cow::Owned(spec.rows_up_to(2 * n)?.into_owned());
        }
        n = step(&rows[n], n, rng);
        path.push(n);
    }
    Ok(path)
}

/// A trajectory `X_0, ..., X_steps` (or `Y`) with `X_0` drawn from the
/// initial law. Deterministic in `seed`.
pub fn simulate_chain(spec: &ChainSpec, side: Side, steps: usize, seed: u64) -> Result<Vec<usize>> {
    let law = initial_law(side, spec, 1e-12)?;
    let mut rng = task_rng(seed, 0);
    let start = law.quantile(rng.gen());
    run(spec, start, steps, &mut rng)
}

/// A trajectory started from a fixed state.
pub fn simulate_chain_from(spec: &ChainSpec, start: usize, steps: usize, seed: u64) -> Result<Vec<usize>> {
    run(spec, start, steps, &mut task_rng(seed, 0))
}

/// `count` independent trajectories, trajectory `i` using stream `i` of `seed`.
pub fn simulate_chains(
    spec: &ChainSpec,
    side: Side,
    steps: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    let law = initial_law(side, spec, 1e-12)?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let start = law.quantile(rng.gen());
            run(spec, start, steps, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ascpoly::QModelParams;
    use crate::chains::transition_row;
    use approx::assert_relative_eq;

    fn spec(q: f64, sigma: f64) -> ChainSpec {
        ChainSpec::q_model(QModelParams::new(q, sigma, 0.5, 0.5).unwrap(), 64).unwrap()
    }

    #[test]
    fn trivial_steps() {
        let s = spec(0.4, 0.6);
        let p = Distribution::point(3);
        assert_eq!(kstep_distribution(&p, 0, &s, 10).unwrap(), p);
        let one = kstep_distribution(&p, 1, &s, 10).unwrap();
        assert!(one.tv_distance(&transition_row(3, &s).unwrap()) < 1e-16);
        assert!(matches!(
            kstep_distribution(&p, 8, &s, 10),
            Err(Error::CapInsufficient { .. })
        ));
    }

    fn enumerate(s: &ChainSpec, n: usize, k: usize, acc: f64, out: &mut Vec<f64>) {
        if k == 0 {
            out[n] += acc;
            return;
        }
        let r = transition_row(n, s).unwrap();
        for (m, p) in r.iter() {
            if p > 0.0 {
                enumerate(s, m, k - 1, acc * p, out);
            }
        }
    }

    #[test]
    fn six_steps_match_trajectory_sum() {
        let s = spec(0.3, 0.7);
        for start in [0, 2, 5] {
            let mut brute = vec![0.0; start + 7];
            enumerate(&s, start, 6, 1.0, &mut brute);
            let d = kstep_distribution(&Distribution::point(start), 6, &s, 100).unwrap();
            for (n, b) in brute.iter().enumerate() {
                assert_relative_eq!(d.prob(n), *b, max_relative = 1e-13, epsilon = 1e-300);
            }
            assert_relative_eq!(d.total(), 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn integral_route_agrees() {
        let quad = QuadPolicy::default().with_rel_tol(1e-11);
        let s = spec(0.3, 0.7);
        assert_relative_eq!(kstep_transition_integral(2, 2, 0, &s, &quad).unwrap(), 1.0, max_relative = 1e-10);
        assert!(kstep_transition_integral(1, 3, 0, &s, &quad).unwrap().abs() < 1e-8);
        let d = kstep_distribution(&Distribution::point(1), 5, &s, 100).unwrap();
        let i = kstep_transition_integral(1, 2, 5, &s, &quad).unwrap();
        assert!((i - d.prob(2)).abs() < 1e-7);
        let s2 = spec(0.6, 0.4);
        for k in [1, 7, 20] {
            let d = kstep_distribution(&Distribution::point(3), k, &s2, 100).unwrap();
            for n in [0, 3, 6] {
                let i = kstep_transition_integral(3, n, k, &s2, &quad).unwrap();
                assert!((i - d.prob(n)).abs() < 1e-7, "k={k} n={n}: {i} vs {}", d.prob(n));
            }
        }
    }

    #[test]
    fn simulation_properties() {
        let s = spec(0.5, 0.5);
        let a = simulate_chain(&s, Side::X, 500, 9).unwrap();
        assert_eq!(a, simulate_chain(&s, Side::X, 500, 9).unwrap());
        assert!(a.windows(2).all(|w| w[0].abs_diff(w[1]) <= 1));
        let many = simulate_chains(&s, Side::Y, 50, 8, 3).unwrap();
        assert_eq!(many.len(), 8);
        assert_eq!(many, simulate_chains(&s, Side::Y, 50, 8, 3).unwrap());
    }

    #[test]
    fn flat_frequency_at_height() {
        // sigma = 1, q = 0: flat probability 1/2 away from the origin
        let s = ChainSpec::q_model(QModelParams::new(0.0, 1.0, 0.5, 0.5).unwrap(), 16).unwrap();
        let steps = 1_000_000;
        let path = simulate_chain_from(&s, 1000, steps, 17).unwrap();
        let flats = path.windows(2).filter(|w| w[0] == w[1]).count() as f64 / steps as f64;
        let se = (0.25 / steps as f64).sqrt();
        assert!((flats - 0.5).abs() < 4.0 * se, "flat frequency {flats}");
    }

    #[test]
    fn simulated_mean_drifts_upward() {
        let s = spec(0.5, 0.8);
        let k = 200;
        let paths = simulate_chains(&s, Side::X, k, 4000, 5).unwrap();
        let law0 = initial_law(Side::X, &s, 1e-14).unwrap();
        let exact = kstep_distribution(&law0, k, &s, law0.max_state() + k).unwrap().mean();
        assert!(exact > law0.mean());
        let mean_end = paths.iter().map(|p| p[k] as f64).sum::<f64>() / paths.len() as f64;
        let var_end = paths.iter().map(|p| (p[k] as f64 - mean_end).powi(2)).sum::<f64>() / paths.len() as f64;
        let se = (var_end / paths.len() as f64).sqrt();
        assert!((mean_end - exact).abs() < 4.0 * se, "{mean_end} vs {exact}");
        let mean_start = paths.iter().map(|p| p[0] as f64).sum::<f64>() / paths.len() as f64;
        assert!(mean_end > mean_start);
    }
}
