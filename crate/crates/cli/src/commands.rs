use std::f64::consts::PI;

use qmotzkin::chains::{simulate_chains, transition_row, ChainSpec, Side};
use qmotzkin::io::format_path;
use qmotzkin::kernels::{local_limit_table, Regime};
use qmotzkin::motzkin::{
    enumerate_paths, integral_expectation, matrix_ansatz_expectation, path_moment_integral, path_weight, PathMeasure,
    WeightModel,
};
use qmotzkin::qspecial::{
    bessel_k_imag, gamma_abs_imag_sq, q_gamma, q_number, qpoch_infinite, theta1, theta1_triple_product, theta4, QBase,
    TruncationPolicy,
};
use qmotzkin::quad::QuadPolicy;
use qmotzkin::Complex64;

use crate::config::{ModelKind, RegimeKind, RunConfig};
use crate::table::Table;
use crate::CliError;

/// Largest boundary height any command lets the path measure reach.
const HEIGHT_CAP: usize = 100_000;

pub fn enumerate(cfg: &RunConfig) -> Result<Table, CliError> {
    let wm = cfg.weight_model()?;
    let paths = enumerate_paths(cfg.l, cfg.from, cfg.to)?;
    let pm = PathMeasure::new(&wm, cfg.l, HEIGHT_CAP, cfg.tol)?;
    let mut t = Table::new(&["path", "weight", "probability"]);
    for p in &paths {
        t.push(vec![format_path(p).into(), path_weight(p, &wm).into(), pm.path_probability(p).into()]);
    }
    Ok(t)
}

pub fn sample(cfg: &RunConfig) -> Result<Table, CliError> {
    let pm = PathMeasure::new(&cfg.weight_model()?, cfg.l, HEIGHT_CAP, cfg.tol)?;
    let mut t = Table::new(&["sample", "start", "end", "path"]);
    for (i, p) in pm.sample_many(cfg.count, cfg.seed).iter().enumerate() {
        t.push(vec![i.into(), p.start().into(), p.end().into(), format_path(p).into()]);
    }
    Ok(t)
}

fn chain_spec(cfg: &RunConfig) -> Result<ChainSpec, CliError> {
    let height = cfg.l + 64;
    match cfg.model {
        ModelKind::Q => Ok(ChainSpec::q_model(cfg.q_params()?, height)?),
        ModelKind::Unit => {
            // all-ones weights: π_n = n + 1 solves π_{n+1} + π_n + π_{n-1} = 3π_n
            let rho = cfg.rho0.max(cfg.rho1);
            let tail = if rho > 0.0 { (cfg.tol.ln() / rho.ln()).ceil() as usize + 64 } else { 0 };
            let h = height.max(tail).min(HEIGHT_CAP);
            let pi = (0..=h + 1).map(|n| (n + 1) as f64).collect();
            Ok(ChainSpec::from_weights(cfg.weight_model()?, 3.0, pi)?)
        }
    }
}

pub fn chain(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = chain_spec(cfg)?;
    let side = if cfg.side_y { Side::Y } else { Side::X };
    let runs = simulate_chains(&spec, side, cfg.l, cfg.count, cfg.seed)?;
    let mut t = Table::new(&["trajectory", "step", "state"]);
    for (i, run) in runs.iter().enumerate() {
        for (k, s) in run.iter().enumerate() {
            t.push(vec![i.into(), k.into(), (*s).into()]);
        }
    }
    Ok(t)
}

pub fn locallimit(cfg: &RunConfig) -> Result<Table, CliError> {
    let regime = match cfg.regime {
        RegimeKind::FixedQ => Regime::FixedQ(cfg.q_params()?),
        RegimeKind::QToOne => Regime::QToOne { sigma: cfg.sigma },
    };
    let rows = local_limit_table(regime, &cfg.n, cfg.t, cfg.x, cfg.y, &QuadPolicy::default())?;
    let mut t = Table::new(&["N", "t", "x", "y", "lhs", "rhs", "rel_err"]);
    for r in rows {
        t.push(vec![r.n.into(), r.t.into(), r.x.into(), r.y.into(), r.lhs.into(), r.rhs.into(), r.rel_err.into()]);
    }
    Ok(t)
}

pub fn specialfn(cfg: &RunConfig) -> Result<Table, CliError> {
    let q = QBase::new(cfg.q)?;
    let pol = TruncationPolicy::default();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mut t = Table::new(&["function", "argument", "value"]);
    let rows = [
        ("q_number", format!("K={}", cfg.k), q_number(cfg.k, q)),
        ("qpoch_infinite", format!("x={}", cfg.x), qpoch_infinite(c(cfg.x, 0.0), q, &pol)?.re),
        ("q_gamma", format!("x={}", cfg.x), q_gamma(c(cfg.x, 0.0), q, &pol)?.re),
        ("abs_q_gamma", format!("1+{}i", cfg.y), q_gamma(c(1.0, cfg.y), q, &pol)?.norm()),
        ("bessel_k_imag", format!("order={}i x={}", cfg.y, cfg.x), bessel_k_imag(cfg.y, cfg.x)?),
        ("gamma_abs_imag_sq", format!("{}i", cfg.y), gamma_abs_imag_sq(cfg.y)?),
    ];
    for (name, arg, v) in rows {
        t.push(vec![name.into(), arg.into(), v.into()]);
    }
    Ok(t)
}

struct Check {
    name: &'static str,
    deviation: f64,
    tolerance: f64,
}

/// `E[z0^{γ_0} Π t^{Δγ} Π s^{-Δγ} z1^{γ_L}]` summed over every path with
/// both endpoints at most `h`.
fn enumerated_expectation(
    z0: f64,
    z1: f64,
    t: &[f64],
    s: &[f64],
    l: usize,
    model: &WeightModel,
    h: usize,
) -> Result<f64, CliError> {
    let (mut num, mut den) = (0.0, 0.0);
    for m in 0..=h {
        for n in m.saturating_sub(l)..=(m + l).min(h) {
            for p in enumerate_paths(l, m, n)? {
                let a = p.altitudes();
                let w = model.alpha(m) * path_weight(&p, model) * model.beta(n);
                let mut f = z0.powi(m as i32) * z1.powi(n as i32);
                for (j, tj) in t.iter().enumerate() {
                    f *= tj.powi(a[j + 1] as i32 - a[j] as i32);
                }
                for (j, sj) in s.iter().enumerate() {
                    f *= sj.powi(a[l - j - 1] as i32 - a[l - j] as i32);
                }
                num += w * f;
                den += w;
            }
        }
    }
    Ok(num / den)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a / b - 1.0).abs()
    }
}

fn verify_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let model = cfg.q_params()?;
    let wm = WeightModel::q_model(model);
    let quad = QuadPolicy::default().with_rel_tol(1e-12);
    let l = cfg.l.min(8);
    let k = cfg.k.min(l / 2);
    let ts = vec![cfg.t; k];
    let ss = vec![1.0 / cfg.t; k];
    let (z0, z1) = (0.8, 0.6);
    let mut checks = Vec::new();

    let ansatz = matrix_ansatz_expectation(z0, z1, &ts, &ss, l, &wm, HEIGHT_CAP, 1e-15)?;
    let enum_model = if cfg.inject_fault {
        let sigma = if model.sigma() <= 0.9 { model.sigma() + 0.1 } else { model.sigma() - 0.1 };
        WeightModel::q_model(qmotzkin::ascpoly::QModelParams::new(cfg.q, sigma, cfg.rho0, cfg.rho1)?)
    } else {
        wm.clone()
    };
    let rho = model.rho0().max(model.rho1());
    let h = if rho > 0.0 { ((1e-17f64).ln() / rho.ln()).ceil() as usize } else { 0 }.clamp(l, 400);
    let brute = enumerated_expectation(z0, z1, &ts, &ss, l, &enum_model, h)?;
    checks.push(Check {
        name: "matrix_ansatz_vs_enumeration",
        deviation: rel(ansatz, brute),
        tolerance: 1e-10,
    });

    let integral = integral_expectation(z0, z1, &ts, &ss, l, &model, &quad, HEIGHT_CAP, 1e-15)?;
    checks.push(Check {
        name: "integral_vs_matrix_ansatz",
        deviation: rel(integral, ansatz),
        tolerance: 1e-7,
    });

    let b = model.support().b;
    let mut viennot: f64 = 0.0;
    for m in 0..=3 {
        for n in 0..=3 {
            let lhs = path_moment_integral(m, n, l, &model, &quad)?;
            if m.abs_diff(n) > l {
                viennot = viennot.max(lhs.abs() / b.powi(l as i32));
                continue;
            }
            let paths: f64 = enumerate_paths(l, m, n)?.iter().map(|p| path_weight(p, &wm)).sum();
            viennot = viennot.max(rel(lhs, paths / q_number(n + 1, model.q())));
        }
    }
    checks.push(Check {
        name: "moment_integral_vs_path_sum",
        deviation: viennot,
        tolerance: 1e-7,
    });

    let spec = ChainSpec::q_model(model, 1000)?;
    let mut stoch: f64 = 0.0;
    for n in 0..=1000 {
        let row = transition_row(n, &spec)?;
        if row.probs().iter().any(|p| *p < 0.0) {
            stoch = f64::INFINITY;
        }
        stoch = stoch.max((row.total() - 1.0).abs());
    }
    checks.push(Check {
        name: "transition_rows_stochastic",
        deviation: stoch,
        tolerance: 1e-10,
    });

    let pol = TruncationPolicy::default();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mut triple: f64 = 0.0;
    for tau in [c(0.0, 1.0), c(0.3, 0.8), c(-0.2, 1.7)] {
        for v in [c(0.3, 0.0), c(-0.7, 0.2), c(0.15, -0.4)] {
            let a = theta1(v, tau, &pol)?;
            let tp = theta1_triple_product(v, tau, &pol)?;
            let shift = c(0.0, 1.0) * (c(0.0, PI) * tau / 4.0).exp() * (c(0.0, -PI) * v).exp() * theta4(v - tau / 2.0, tau, &pol)?;
            triple = triple.max((a - tp).norm() / a.norm()).max((a - shift).norm() / a.norm());
        }
    }
    checks.push(Check {
        name: "theta_triple_product",
        deviation: triple,
        tolerance: 1e-10,
    });

    let i = c(0.0, 1.0);
    let mut modular: f64 = 0.0;
    for (m, v) in [(1.0, c(0.3, 0.0)), (5.0, c(0.1, 0.7)), (20.0, c(0.0, 5.0 * PI))] {
        let tau = c(0.0, PI * m);
        let lhs = theta1(v, tau, &pol)?;
        let rhs = i * (i / tau).sqrt() * (-i * PI * v * v / tau).exp() * theta1(v / tau, -1.0 / tau, &pol)?;
        modular = modular.max((lhs - rhs).norm() / lhs.norm());
    }
    checks.push(Check {
        name: "theta_modular_transform",
        deviation: modular,
        tolerance: 1e-8,
    });
    Ok(checks)
}

/// The check table and whether every check passed.
pub fn verify(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let checks = verify_checks(cfg)?;
    let mut t = Table::new(&["check", "deviation", "tolerance", "pass"]);
    let mut all = true;
    for ch in checks {
        // NaN deviations fail
        let pass = ch.deviation <= ch.tolerance;
        all &= pass;
        t.push(vec![ch.name.into(), ch.deviation.into(), ch.tolerance.into(), pass.into()]);
    }
    Ok((t, all))
}
