//! Plain-text formats.
//!
//! - paths: one path per line, altitudes separated by commas (`0,1,1,0`);
//! - key=value files (models, configs): one entry per line, `#` starts a comment;
//! - distributions: CSV with columns `n,probability` over consecutive `n`;
//! - error tables: CSV with columns `N,t,x,y,lhs,rhs,rel_err`.
//!
//! Floats are written with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::ascpoly::QModelParams;
use crate::chains::Distribution;
use crate::error::{Error, Result};
use crate::kernels::ErrorRow;
use crate::motzkin::{MotzkinPath, TabulatedWeights, WeightModel};

/// Longest accepted path, in steps.
pub const MAX_PARSED_PATH_LEN: usize = 1 << 16;
/// Longest accepted weight table.
pub const MAX_TABLE_LEN: usize = 1 << 16;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// `x` with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Content of a line with any `#` comment and surrounding blanks removed.
fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_path_line(line: &str, lineno: usize) -> Result<MotzkinPath> {
    let mut alts = Vec::new();
    for field in line.split(',') {
        if alts.len() > MAX_PARSED_PATH_LEN {
            return Err(parse_err(lineno, format!("path longer than {MAX_PARSED_PATH_LEN} steps")));
        }
        let f = field.trim();
        let v: usize = f
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad altitude {f:?}")))?;
        alts.push(v);
    }
    MotzkinPath::new(alts).map_err(|e| parse_err(lineno, e.to_string()))
}

/// One path per nonblank line; `#` comments are ignored.
pub fn parse_paths(text: &str) -> Result<Vec<MotzkinPath>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if !line.is_empty() {
            out.push(parse_path_line(line, i + 1)?);
        }
    }
    Ok(out)
}

pub fn format_path(path: &MotzkinPath) -> String {
    path.to_string()
}

/// `key=value` entries. Keys are case-sensitive; repeated keys are an error.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(i + 1, "expected key=value"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(parse_err(i + 1, "empty key"));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(parse_err(i + 1, format!("duplicate key {k:?}")));
        }
    }
    Ok(out)
}

/// A config file: `key=value` lines with `#` comments.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    parse_key_values(text)
}

fn get_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    map.get(key)
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(0, format!("{key}: bad number {v:?}")))
        })
        .transpose()
}

fn need_f64(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    get_f64(map, key)?.ok_or_else(|| parse_err(0, format!("missing key {key:?}")))
}

fn get_list(map: &BTreeMap<String, String>, key: &str) -> Result<Vec<f64>> {
    let v = map
        .get(key)
        .ok_or_else(|| parse_err(0, format!("missing key {key:?}")))?;
    let mut out = Vec::new();
    for f in v.split(',') {
        if out.len() >= MAX_TABLE_LEN {
            return Err(parse_err(0, format!("{key}: more than {MAX_TABLE_LEN} entries")));
        }
        let x: f64 = f
            .trim()
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| parse_err(0, format!("{key}: bad number {:?}", f.trim())))?;
        out.push(x);
    }
    Ok(out)
}

/// A weight model from `key=value` lines:
///
/// - `model=q` with `q`, `sigma`, `rho0`, `rho1`;
/// - `model=unit` with `rho0`, `rho1`;
/// - `model=table` with comma lists `up`, `flat`, `down`, `alpha`, `beta`.
///
/// Unknown keys are rejected. Errors from parameter validation carry line 0.
pub fn parse_model(text: &str) -> Result<WeightModel> {
    let map = parse_key_values(text)?;
    let kind = map
        .get("model")
        .ok_or_else(|| parse_err(0, "missing key \"model\""))?;
    let allowed: &[&str] = match kind.as_str() {
        "q" => &["model", "q", "sigma", "rho0", "rho1"],
        "unit" => &["model", "rho0", "rho1"],
        "table" => &["model", "up", "flat", "down", "alpha", "beta"],
        other => return Err(parse_err(0, format!("unknown model {other:?}"))),
    };
    if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(parse_err(0, format!("unknown key {k:?} for model {kind}")));
    }
    let invalid = |e: Error| parse_err(0, e.to_string());
    match kind.as_str() {
        "q" => {
            let p = QModelParams::new(
                need_f64(&map, "q")?,
                need_f64(&map, "sigma")?,
                need_f64(&map, "rho0")?,
                need_f64(&map, "rho1")?,
            )
            .map_err(invalid)?;
            Ok(WeightModel::q_model(p))
        }
        "unit" => WeightModel::unit(need_f64(&map, "rho0")?, need_f64(&map, "rho1")?).map_err(invalid),
        _ => {
            let t = TabulatedWeights::new(
                get_list(&map, "up")?,
                get_list(&map, "flat")?,
                get_list(&map, "down")?,
                get_list(&map, "alpha")?,
                get_list(&map, "beta")?,
            )
            .map_err(invalid)?;
            Ok(WeightModel::Table(t))
        }
    }
}

/// Inverse of [`parse_model`].
pub fn format_model(model: &WeightModel) -> String {
    match model {
        WeightModel::Q(p) => format!(
            "model=q\nq={}\nsigma={}\nrho0={}\nrho1={}\n",
            p.q().value(),
            p.sigma(),
            p.rho0(),
            p.rho1()
        ),
        WeightModel::Unit { rho0, rho1 } => format!("model=unit\nrho0={rho0}\nrho1={rho1}\n"),
        WeightModel::Table(t) => {
            let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            format!(
                "model=table\nup={}\nflat={}\ndown={}\nalpha={}\nbeta={}\n",
                list(t.up_table()),
                list(t.flat_table()),
                list(t.down_table()),
                list(t.alpha_table()),
                list(t.beta_table())
            )
        }
    }
}

/// A distribution from CSV rows `n,probability` with consecutive `n`. An
/// optional header `n,probability` and `#` comments are skipped.
pub fn parse_distribution_csv(text: &str) -> Result<Distribution> {
    let mut offset = None;
    let mut probs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() || (offset.is_none() && line.replace(' ', "") == "n,probability") {
            continue;
        }
        let (n, p) = line
            .split_once(',')
            .ok_or_else(|| parse_err(i + 1, "expected n,probability"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| parse_err(i + 1, format!("bad state {:?}", n.trim())))?;
        let p: f64 = p
            .trim()
            .parse()
            .ok()
            .filter(|p: &f64| p.is_finite() && *p >= 0.0)
            .ok_or_else(|| parse_err(i + 1, format!("bad probability {:?}", p.trim())))?;
        let start = *offset.get_or_insert(n);
        if n.checked_sub(start) != Some(probs.len()) {
            return Err(parse_err(i + 1, format!("state {n} is not consecutive")));
        }
        if probs.len() >= MAX_TABLE_LEN {
            return Err(parse_err(i + 1, format!("more than {MAX_TABLE_LEN} rows")));
        }
        probs.push(p);
    }
    let offset = offset.ok_or_else(|| parse_err(0, "no rows"))?;
    Distribution::new(offset, probs).map_err(|e| parse_err(0, e.to_string()))
}

pub fn write_distribution_csv(d: &Distribution) -> String {
    let mut s = String::from("n,probability\n");
    for (n, p) in d.iter() {
        let _ = writeln!(s, "{n},{}", format_f64(p));
    }
    s
}

pub fn write_error_table_csv(rows: &[ErrorRow]) -> String {
    let mut s = String::from("N,t,x,y,lhs,rhs,rel_err\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n,
            format_f64(r.t),
            format_f64(r.x),
            format_f64(r.y),
            format_f64(r.lhs),
            format_f64(r.rhs),
            format_f64(r.rel_err)
        );
    }
    s
}
