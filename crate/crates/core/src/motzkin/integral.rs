use super::transfer::{
    beta_vector, boundary_height, check_generating_args, propagate_alpha, TruncatedOperator,
};
use super::WeightModel;
use crate::ascpoly::{motzkin_poly_values, OrthogonalityMeasure, QModelParams};
use crate::error::{Error, Result};
use crate::qspecial::q_number;
use crate::quad::QuadPolicy;

/// `∫ p_m(x) p_n(x) x^L ν(dx)` for the q-model.
pub fn path_moment_integral(
    m: usize,
    n: usize,
    l: usize,
    model: &QModelParams,
    quad: &QuadPolicy,
) -> Result<f64> {
    let nu = OrthogonalityMeasure::new(*model)?;
    let top = m.max(n);
    let mut err = None;
    let v = nu.integrate_vec(
        |x, out| match motzkin_poly_values(top, x, model) {
            Ok(p) => out[0] = p[m] * p[n] * x.powi(l as i32),
            Err(e) => {
                err.get_or_insert(e);
                out[0] = 0.0;
            }
        },
        1,
        &[],
        quad,
    )?;
    err.map_or(Ok(v[0]), Err)
}

/// Coefficient vectors `V_α(z0)ᵀ M_{t_1}…M_{t_K}` and
/// `M_{1/s_K}…M_{1/s_1} W_β(z1)` on `h + K + 1` states, with their log scales.
fn boundary_coefficients(
    model: &WeightModel,
    h: usize,
    z0: f64,
    z1: f64,
    t: &[f64],
    s: &[f64],
) -> Result<((Vec<f64>, f64), (Vec<f64>, f64))> {
    let left = propagate_alpha(model, h, z0, t)?;
    let size = left.data.len();
    let mut w = beta_vector(model, h, z1, size);
    let mut out = vec![0.0; size];
    for &sj in s {
        TruncatedOperator::new(model, size, 1.0 / sj)?.col_apply(&w, &mut out);
        std::mem::swap(&mut w, &mut out);
    }
    let scale = w.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if scale > 0.0 {
        w.iter_mut().for_each(|x| *x /= scale);
    }
    Ok(((left.data, left.ln_scale), (w, scale.ln())))
}

/// The generating functional of [`super::matrix_ansatz_expectation`]
/// through the integral representation
/// `(1/𝔠_L) ∫ x^{L-2K} Ψ₀(x) Ψ₁(x) ν(dx)`, with
/// `Ψ₀ = V_α(z0)ᵀ M_{t_1}…M_{t_K} P(x)` and
/// `Ψ₁ = W_β(z1)ᵀ M̃_{s_1}…M̃_{s_K} Q(x)`, `M̃_s = M_{1/s}ᵀ`;
/// `𝔠_L` is computed by the same quadrature.
#[allow(clippy::too_many_arguments)]
pub fn integral_expectation(
    z0: f64,
    z1: f64,
    t: &[f64],
    s: &[f64],
    l: usize,
    model: &QModelParams,
    quad: &QuadPolicy,
    height_cap: usize,
    tail_tol: f64,
) -> Result<f64> {
    check_generating_args(z0, z1, t, s, l)?;
    let wm = WeightModel::q_model(*model);
    let steps = super::transfer::step_sequence(t, s, l);
    let (h, _) = boundary_height(&wm, &steps, tail_tol, height_cap)?;
    let k = t.len();
    let ((v, _), (w, _)) = boundary_coefficients(&wm, h, z0, z1, t, s)?;
    let ((v1, _), (w1, _)) = boundary_coefficients(&wm, h, 1.0, 1.0, &[], &[])?;
    let (num, den) = integrate_pair(model, &v, &w, &v1, &w1, l - 2 * k, l, quad)?;
    // restore the scales dropped above
    let ((_, lv), (_, lw)) = boundary_coefficients(&wm, h, z0, z1, t, s)?;
    let ((_, lv1), (_, lw1)) = boundary_coefficients(&wm, h, 1.0, 1.0, &[], &[])?;
    let b = model.support().b;
    let ln_ratio = lv + lw - lv1 - lw1 - 2.0 * k as f64 * b.ln();
    Ok(num / den * ln_ratio.exp())
}

/// `𝔠_L = ∫ x^L (V_α(1)ᵀ P(x)) (W_β(1)ᵀ Q(x)) ν(dx)`.
pub fn integral_normalizing_constant(
    l: usize,
    model: &QModelParams,
    quad: &QuadPolicy,
    height_cap: usize,
    tail_tol: f64,
) -> Result<f64> {
    let wm = WeightModel::q_model(*model);
    let (h, _) = boundary_height(&wm, &vec![1.0; l], tail_tol, height_cap)?;
    let ((v, lv), (w, lw)) = boundary_coefficients(&wm, h, 1.0, 1.0, &[], &[])?;
    let (num, _) = integrate_pair(model, &v, &w, &v, &w, l, l, quad)?;
    let b = model.support().b;
    let out = num * (lv + lw + l as f64 * b.ln()).exp();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Overflow("integral_normalizing_constant"))
    }
}

/// `(∫ (x/B)^{l0} Ψ(v,w) dν, ∫ (x/B)^{l1} Ψ(v1,w1) dν)` where
/// `Ψ(v,w) = (Σ v_n p_n)(Σ w_n p̃_n)`.
#[allow(clippy::too_many_arguments)]
fn integrate_pair(
    model: &QModelParams,
    v: &[f64],
    w: &[f64],
    v1: &[f64],
    w1: &[f64],
    l0: usize,
    l1: usize,
    quad: &QuadPolicy,
) -> Result<(f64, f64)> {
    let nu = OrthogonalityMeasure::new(*model)?;
    let top = v.len().max(w.len()).max(v1.len()).max(w1.len());
    let qn: Vec<f64> = (0..top).map(|n| q_number(n + 1, model.q())).collect();
    let b = model.support().b;
    let mut err = None;
    let r = nu.integrate_vec(
        |x, out| {
            let p = match motzkin_poly_values(top - 1, x, model) {
                Ok(p) => p,
                Err(e) => {
                    err.get_or_insert(e);
                    out.iter_mut().for_each(|o| *o = 0.0);
                    return;
                }
            };
            let dot = |c: &[f64], tilde: bool| -> f64 {
                c.iter()
                    .enumerate()
                    .map(|(n, cn)| cn * p[n] * if tilde { qn[n] } else { 1.0 })
                    .sum()
            };
            let y = x / b;
            out[0] = y.powi(l0 as i32) * dot(v, false) * dot(w, true);
            out[1] = y.powi(l1 as i32) * dot(v1, false) * dot(w1, true);
        },
        2,
        &[],
        quad,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok((r[0], r[1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motzkin::{matrix_ansatz_expectation, normalizing_constant, partition_weight};
    use approx::assert_relative_eq;

    fn qp() -> QuadPolicy {
        QuadPolicy::default().with_rel_tol(1e-12)
    }

    #[test]
    fn all_ones_is_one() {
        let m = QModelParams::new(0.4, 0.6, 0.3, 0.3).unwrap();
        let e = integral_expectation(1.0, 1.0, &[1.0], &[1.0], 8, &m, &qp(), 10_000, 1e-13).unwrap();
        assert_relative_eq!(e, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn agrees_with_transfer_matrices() {
        let m = QModelParams::new(0.4, 0.6, 0.3, 0.3).unwrap();
        let wm = WeightModel::q_model(m);
        let (t, s) = ([1.3], [0.7]);
        let a = integral_expectation(0.8, 0.5, &t, &s, 8, &m, &qp(), 10_000, 1e-13).unwrap();
        let b = matrix_ansatz_expectation(0.8, 0.5, &t, &s, 8, &wm, 10_000, 1e-13).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-7);
        let c_int = integral_normalizing_constant(8, &m, &qp(), 10_000, 1e-13).unwrap();
        let c_tm = normalizing_constant(8, &wm, 1e-13).unwrap();
        assert_relative_eq!(c_int, c_tm, max_relative = 1e-7);
    }

    #[test]
    fn moment_integral_is_path_sum() {
        let m = QModelParams::new(0.5, 0.8, 0.3, 0.3).unwrap();
        let wm = WeightModel::q_model(m);
        for (a, b, l) in [(0, 0, 4), (1, 3, 6), (2, 2, 5)] {
            let lhs = path_moment_integral(a, b, l, &m, &qp()).unwrap();
            let rhs = partition_weight(l, a, b, &wm, 100).unwrap() / q_number(b + 1, m.q());
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        }
    }
}
