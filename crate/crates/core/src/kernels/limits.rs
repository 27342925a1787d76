use rayon::prelude::*;

use super::{bessel3d_transition, xi0_density, zeta0_density, zeta_transition, KernelQuery};
use crate::ascpoly::{s_value, QModelParams};
use crate::chains::{initial_normalizer, kstep_distribution, ChainSpec, Distribution};
use crate::error::{Error, Result};
use crate::quad::QuadPolicy;

/// A lattice quantity, its continuum limit and `|lhs - rhs| / |rhs|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitComparison {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

impl LimitComparison {
    fn new(lhs: f64, rhs: f64) -> Self {
        LimitComparison {
            lhs,
            rhs,
            rel_err: (lhs - rhs).abs() / rhs.abs(),
        }
    }
}

/// Lattice index `J_z^N = ⌊z√N⌋ + ⌊√N log √(2N(1+σ))⌋` of the `q → 1`
/// scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexMap {
    n: usize,
    sigma: f64,
}

impl IndexMap {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::invalid(format!("sigma must lie in (0, 1], got {sigma}")));
        }
        Ok(IndexMap { n, sigma })
    }

    /// `⌊√N log √(2N(1+σ))⌋`.
    pub fn centering(&self) -> i64 {
        let n = self.n as f64;
        (n.sqrt() * 0.5 * (2.0 * n * (1.0 + self.sigma)).ln()).floor() as i64
    }

    pub fn index(&self, z: f64) -> Result<usize> {
        let j = (z * (self.n as f64).sqrt()).floor() as i64 + self.centering();
        usize::try_from(j).map_err(|_| Error::domain("IndexMap::index", format!("J_{z} is negative")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("local limit", format!("{name} must be positive, got {v}")))
    }
}

/// `P(X_k = to | X_0 = from)` by tridiagonal iteration.
fn transition_probability(model: QModelParams, from: usize, to: usize, k: usize) -> Result<f64> {
    if to > from + k || from > to + k {
        return Ok(0.0);
    }
    let spec = ChainSpec::q_model(model, from + k)?;
    Ok(kstep_distribution(&Distribution::point(from), k, &spec, from + k)?.prob(to))
}

/// `P(X_0 = n) = ρⁿ s_n / Σ_m ρ^m s_m` under the model's `ρ₀`.
fn initial_probability(model: &QModelParams, n: usize) -> Result<f64> {
    let rho = model.rho0();
    let c = initial_normalizer(rho, model)?;
    Ok((n as f64 * rho.ln()).exp() * s_value(n, model)? / c)
}

fn sqrt_n(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    Ok((n as f64).sqrt())
}

/// `√N P(X_{⌊Nt⌋} = ⌊y√N⌋ | X_0 = ⌊x√N⌋)` against `(y/x) 𝗊_{t/(1+σ)}(x, y)`.
pub fn local_limit_error_fixed_q(
    n: usize,
    t: f64,
    x: f64,
    y: f64,
    model: &QModelParams,
) -> Result<LimitComparison> {
    let r = sqrt_n(n)?;
    for (name, v) in [("t", t), ("x", x), ("y", y)] {
        check_positive(name, v)?;
    }
    let k = (n as f64 * t).floor() as usize;
    let (from, to) = ((x * r).floor() as usize, (y * r).floor() as usize);
    let lhs = r * transition_probability(*model, from, to, k)?;
    let rhs = bessel3d_transition(&KernelQuery::new(t, x, y, model.sigma())?)?;
    Ok(LimitComparison::new(lhs, rhs))
}

/// `√N P(X_0 = ⌊x√N⌋)` with `ρ₀ = e^{-c/√N}` against `c² x e^{-cx}`.
pub fn initial_limit_fixed_q(n: usize, x: f64, c: f64, model: &QModelParams) -> Result<LimitComparison> {
    let r = sqrt_n(n)?;
    check_positive("x", x)?;
    check_positive("c", c)?;
    let m = model.with_rho((-c / r).exp(), model.rho1())?;
    let lhs = r * initial_probability(&m, (x * r).floor() as usize)?;
    Ok(LimitComparison::new(lhs, xi0_density(x, c)?))
}

fn q_to_1_model(n: usize, sigma: f64, rho0: f64) -> Result<QModelParams> {
    QModelParams::new((-2.0 / sqrt_n(n)?).exp(), sigma, rho0, 0.5)
}

/// `√N P(X_{⌊Nt⌋} = J_y^N | X_0 = J_x^N)` with `q = e^{-2/√N}` against
/// `[K₀(e^{-y})/K₀(e^{-x})] 𝗉_{t/(1+σ)}(x, y)`.
pub fn local_limit_error_q_to_1(
    n: usize,
    t: f64,
    x: f64,
    y: f64,
    sigma: f64,
    quad: &QuadPolicy,
) -> Result<LimitComparison> {
    let r = sqrt_n(n)?;
    check_positive("t", t)?;
    let map = IndexMap::new(n, sigma)?;
    let model = q_to_1_model(n, sigma, 0.5)?;
    let k = (n as f64 * t).floor() as usize;
    let lhs = r * transition_probability(model, map.index(x)?, map.index(y)?, k)?;
    let rhs = zeta_transition(&KernelQuery::new(t, x, y, sigma)?, quad)?;
    Ok(LimitComparison::new(lhs, rhs))
}

/// `√N P(X_0 = J_x^N)` with `q = e^{-2/√N}`, `ρ₀ = e^{-c/√N}` against the
/// density `4/(2^c Γ(c/2)²) e^{-cx} K₀(e^{-x})`.
pub fn initial_limit_q_to_1(n: usize, x: f64, c: f64, sigma: f64) -> Result<LimitComparison> {
    let r = sqrt_n(n)?;
    check_positive("c", c)?;
    let map = IndexMap::new(n, sigma)?;
    let model = q_to_1_model(n, sigma, (-c / r).exp())?;
    let lhs = r * initial_probability(&model, map.index(x)?)?;
    Ok(LimitComparison::new(lhs, zeta0_density(x, c)?))
}

/// `N P(X_0 = ⌊x₀√N⌋, X_{⌊Nt⌋} = ⌊x₁√N⌋)` with `ρ₀ = e^{-c/√N}` against
/// `c² x₀ e^{-c x₀} (x₁/x₀) 𝗊_{t/(1+σ)}(x₀, x₁)`.
pub fn joint_mass_fixed_q(
    n: usize,
    t: f64,
    x0: f64,
    x1: f64,
    c: f64,
    model: &QModelParams,
) -> Result<LimitComparison> {
    let a = initial_limit_fixed_q(n, x0, c, model)?;
    let b = local_limit_error_fixed_q(n, t, x0, x1, model)?;
    Ok(LimitComparison::new(a.lhs * b.lhs, a.rhs * b.rhs))
}

/// `N P(X_0 = J_{x₀}^N, X_{⌊Nt⌋} = J_{x₁}^N)` with `q = e^{-2/√N}`,
/// `ρ₀ = e^{-c/√N}` against the product of the initial density and the
/// transition density of the limit process.
pub fn joint_mass_q_to_1(
    n: usize,
    t: f64,
    x0: f64,
    x1: f64,
    c: f64,
    sigma: f64,
    quad: &QuadPolicy,
) -> Result<LimitComparison> {
    let a = initial_limit_q_to_1(n, x0, c, sigma)?;
    let b = local_limit_error_q_to_1(n, t, x0, x1, sigma, quad)?;
    Ok(LimitComparison::new(a.lhs * b.lhs, a.rhs * b.rhs))
}

/// Scaling regime of a local-limit error table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    FixedQ(QModelParams),
    QToOne { sigma: f64 },
}

/// One row `(N, t, x, y, lhs, rhs, rel_err)` of an error table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub n: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// Local-limit comparisons over `ns`, computed in parallel and returned in
/// the order of `ns`.
pub fn local_limit_table(
    regime: Regime,
    ns: &[usize],
    t: f64,
    x: f64,
    y: f64,
    quad: &QuadPolicy,
) -> Result<Vec<ErrorRow>> {
    ns.par_iter()
        .map(|&n| {
            let c = match regime {
                Regime::FixedQ(m) => local_limit_error_fixed_q(n, t, x, y, &m)?,
                Regime::QToOne { sigma } => local_limit_error_q_to_1(n, t, x, y, sigma, quad)?,
            };
            Ok(ErrorRow {
                n,
                t,
                x,
                y,
                lhs: c.lhs,
                rhs: c.rhs,
                rel_err: c.rel_err,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{initial_law, Side};
    use crate::qspecial::bessel_k_imag;
    use approx::assert_relative_eq;

    fn qm(q: f64, sigma: f64) -> QModelParams {
        QModelParams::new(q, sigma, 0.5, 0.5).unwrap()
    }

    #[test]
    fn index_map() {
        let m = IndexMap::new(2500, 1.0).unwrap();
        let centering = (50.0 * 0.5 * 10000f64.ln()).floor() as i64;
        assert_eq!(m.centering(), centering);
        assert_eq!(m.index(0.0).unwrap(), centering as usize);
        assert_eq!(m.index(0.5).unwrap(), centering as usize + 25);
        assert!(m.index(-10.0).is_err());
        assert!(IndexMap::new(0, 1.0).is_err());
    }

    #[test]
    fn fixed_q_local_limit() {
        let m = qm(0.5, 1.0);
        let a = local_limit_error_fixed_q(2500, 1.0, 1.0, 1.0, &m).unwrap();
        assert!(a.rel_err < 0.05, "{a:?}");
        let b = local_limit_error_fixed_q(10_000, 1.0, 1.0, 1.0, &m).unwrap();
        assert!(b.rel_err < a.rel_err);
        assert_eq!(a.rhs, b.rhs);
        let far = local_limit_error_fixed_q(100, 0.1, 1.0, 5.0, &m).unwrap();
        assert_eq!(far.lhs, 0.0);
    }

    #[test]
    fn fixed_q_initial_limit() {
        let m = qm(0.5, 1.0);
        let a = initial_limit_fixed_q(10_000, 1.0, 1.0, &m).unwrap();
        assert!(a.rel_err < 0.03, "{a:?}");
        let small = initial_limit_fixed_q(10_000, 0.01, 1.0, &m).unwrap();
        assert!(small.lhs < 0.05 && small.rhs < 0.01);
        // initial law routes agree at N = 2500
        let mm = m.with_rho((-1.0 / 50.0f64).exp(), 0.5).unwrap();
        let law = initial_law(Side::X, &ChainSpec::q_model(mm, 10).unwrap(), 1e-12).unwrap();
        assert_relative_eq!(law.total(), 1.0, max_relative = 1e-12);
        let direct = initial_probability(&mm, 70).unwrap();
        assert_relative_eq!(law.prob(70), direct, max_relative = 1e-9);
    }

    #[test]
    fn q_to_1_initial_limit() {
        let a = initial_limit_q_to_1(10_000, 0.0, 1.0, 1.0).unwrap();
        assert!(a.lhs >= 0.0);
        assert!(a.rel_err < 0.10, "{a:?}");
        let c2 = initial_limit_q_to_1(10_000, 0.0, 2.0, 1.0).unwrap();
        assert_relative_eq!(c2.rhs, bessel_k_imag(0.0, 1.0).unwrap(), max_relative = 1e-14);
        assert_relative_eq!(c2.rhs, 0.421024, max_relative = 1e-5);
    }
}
