use crate::error::{Error, Result};
use crate::quad::{integrate_vec, QuadPolicy};

/// Arguments below this are rejected: the integration horizon
/// `acosh(1 + 745/x)` grows without bound and `K_{iu}` oscillates
/// ever faster in `ln x`.
pub const BESSEL_K_MIN_ARG: f64 = 1e-12;

/// `K_{iu}(x) = ∫₀^∞ e^{-x cosh t} cos(ut) dt` for `x > 0`.
pub fn bessel_k_imag(u: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_imag_many(&[u], x)?[0])
}

/// `K_{iu}(x)` for several orders at a common argument, sharing nodes.
pub fn bessel_k_imag_many(us: &[f64], x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_k_imag", format!("x must be positive, got {x}")));
    }
    if x < BESSEL_K_MIN_ARG {
        return Err(Error::AccuracyLoss {
            func: "bessel_k_imag",
            detail: format!("x = {x:e} is below {BESSEL_K_MIN_ARG:e}"),
        });
    }
    if us.iter().any(|u| !u.is_finite()) {
        return Err(Error::domain("bessel_k_imag", "order must be finite"));
    }
    if us.is_empty() {
        return Ok(Vec::new());
    }
    // e^{-x cosh t} = e^{-x} e^{-x (cosh t - 1)}; past T the integrand is below e^{-745}
    let horizon = (1.0 + 745.0 / x).acosh();
    let umax = us.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let panels = (horizon * (1.0 + umax / 2.0).max(x.sqrt() / 4.0)).ceil() as usize;
    let policy = QuadPolicy::default()
        .with_rel_tol(1e-13)
        .with_initial_panels(panels.max(4))
        .with_max_nodes(1 << 24);
    let vals = integrate_vec(
        |t, out| {
            let w = (-x * (t.cosh() - 1.0)).exp();
            for (o, u) in out.iter_mut().zip(us) {
                *o = w * (u * t).cos();
            }
        },
        us.len(),
        0.0,
        horizon,
        &policy,
    )?;
    let ex = (-x).exp();
    Ok(vals.into_iter().map(|v| v * ex).collect())
}
