//! Composite Gauss–Legendre quadrature.
//!
//! A fixed-order Gauss–Legendre rule is applied on equal panels; the panel
//! count is doubled until two successive estimates agree. Every integral in
//! the crate goes through [`integrate`] or [`integrate_vec`].

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_n`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Points per panel of the composite rule.
pub const PANEL_ORDER: usize = 16;

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
}

/// Stopping rule for panel doubling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPolicy {
    /// Relative change between successive estimates that counts as converged.
    pub rel_tol: f64,
    /// Absolute change that counts as converged (for integrals near zero).
    pub abs_tol: f64,
    pub initial_panels: usize,
    /// Hard cap on the total node count of one estimate.
    pub max_nodes: usize,
}

impl Default for QuadPolicy {
    fn default() -> Self {
        QuadPolicy {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            initial_panels: 4,
            max_nodes: 1 << 20,
        }
    }
}

impl QuadPolicy {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_initial_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }
}

fn composite<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    panels: usize,
    value: &mut [f64],
    magnitude: &mut [f64],
    scratch: &mut [f64],
) {
    let rule = panel_rule();
    let h = (b - a) / panels as f64;
    value.iter_mut().for_each(|v| *v = 0.0);
    magnitude.iter_mut().for_each(|v| *v = 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            f(mid + 0.5 * h * x, scratch);
            let wh = 0.5 * h * w;
            for ((v, m), s) in value.iter_mut().zip(magnitude.iter_mut()).zip(scratch.iter()) {
                *v += wh * s;
                *m += wh * s.abs();
            }
        }
    }
}

/// Integrates a vector-valued function over `[a, b]`; every component must
/// meet the stopping rule.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    dim: usize,
    a: f64,
    b: f64,
    policy: &QuadPolicy,
) -> Result<Vec<f64>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("quadrature bounds must be finite"));
    }
    if a == b || dim == 0 {
        return Ok(vec![0.0; dim]);
    }
    let mut panels = policy.initial_panels.max(1);
    let mut prev = vec![0.0; dim];
    let mut cur = vec![0.0; dim];
    let mut mag = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    composite(&mut f, a, b, panels, &mut prev, &mut mag, &mut scratch);
    loop {
        panels *= 2;
        if panels * PANEL_ORDER > policy.max_nodes {
            return Err(Error::NonConvergence {
                what: "Gauss-Legendre panel doubling",
                limit: policy.max_nodes,
            });
        }
        composite(&mut f, a, b, panels, &mut cur, &mut mag, &mut scratch);
        let converged = cur.iter().zip(&prev).zip(&mag).all(|((c, p), m)| {
            let tol = (policy.rel_tol * c.abs())
                .max(policy.abs_tol)
                .max(64.0 * f64::EPSILON * m);
            (c - p).abs() <= tol
        });
        if cur.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow("quadrature"));
        }
        if converged {
            return Ok(cur);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
}

/// Integrates a scalar function over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    policy: &QuadPolicy,
) -> Result<f64> {
    integrate_vec(|x, out| out[0] = f(x), 1, a, b, policy).map(|v| v[0])
}

/// Integrates over consecutive segments `[pts[i], pts[i+1]]`, so that
/// integrands with kinks or jumps at the breakpoints are handled exactly.
pub fn integrate_segments<F: FnMut(f64) -> f64>(
    mut f: F,
    pts: &[f64],
    policy: &QuadPolicy,
) -> Result<f64> {
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += integrate(&mut f, w[0], w[1], policy)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the highest exact degree for 8 points
        let val = rule.integrate(-1.0, 1.0, |x| x.powi(14));
        assert_relative_eq!(val, 2.0 / 15.0, max_relative = 1e-14);
        let w: f64 = rule.weights().iter().sum();
        assert_relative_eq!(w, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn composite_handles_smooth_and_oscillatory() {
        let p = QuadPolicy::default();
        let v = integrate(|x| x.exp(), 0.0, 1.0, &p).unwrap();
        assert_relative_eq!(v, std::f64::consts::E - 1.0, max_relative = 1e-13);
        let v = integrate(|x| (20.0 * x).cos(), 0.0, std::f64::consts::PI, &p).unwrap();
        assert!(v.abs() < 1e-13);
    }

    #[test]
    fn segments_resolve_a_jump() {
        let p = QuadPolicy::default();
        let v = integrate_segments(|x| if x > 0.3 { 1.0 } else { 0.0 }, &[0.0, 0.3, 1.0], &p)
            .unwrap();
        assert_relative_eq!(v, 0.7, max_relative = 1e-14);
    }

    #[test]
    fn node_cap_is_enforced() {
        let p = QuadPolicy::default().with_max_nodes(64).with_rel_tol(1e-15);
        let r = integrate(|x| (1000.0 * x).sin() * x, 0.0, 10.0, &p);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
