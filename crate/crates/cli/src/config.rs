use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use qmotzkin::ascpoly::QModelParams;
use qmotzkin::io::parse_config;
use qmotzkin::motzkin::WeightModel;

use crate::args::Flags;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Q,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeKind {
    FixedQ,
    QToOne,
}

/// The effective settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub q: f64,
    pub sigma: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub c: f64,
    pub l: usize,
    pub n: Vec<usize>,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub k: usize,
    pub from: usize,
    pub to: usize,
    pub count: usize,
    pub side_y: bool,
    pub regime: RegimeKind,
    pub seed: u64,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub inject_fault: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::Q,
            q: 0.5,
            sigma: 0.7,
            rho0: 0.3,
            rho1: 0.3,
            c: 1.0,
            l: 4,
            n: vec![400, 2500, 10_000],
            t: 1.0,
            x: 1.0,
            y: 1.0,
            k: 1,
            from: 0,
            to: 0,
            count: 10,
            side_y: false,
            regime: RegimeKind::FixedQ,
            seed: 0,
            tol: 1e-12,
            out: None,
            format: Format::Csv,
            inject_fault: false,
        }
    }
}

const KEYS: &[&str] = &[
    "model", "q", "sigma", "rho0", "rho1", "c", "L", "N", "t", "x", "y", "K", "from", "to", "count", "side", "regime",
    "seed", "tol", "out", "format",
];

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| invalid(format!("{key}: cannot parse {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<usize>, CliError> {
    v.split(',').map(|s| parse_value(key, s)).collect()
}

fn parse_model(v: &str) -> Result<ModelKind, CliError> {
    match v {
        "q" => Ok(ModelKind::Q),
        "unit" => Ok(ModelKind::Unit),
        _ => Err(invalid(format!("model must be q or unit, got {v:?}"))),
    }
}

fn parse_side(v: &str) -> Result<bool, CliError> {
    match v {
        "x" | "X" => Ok(false),
        "y" | "Y" => Ok(true),
        _ => Err(invalid(format!("side must be x or y, got {v:?}"))),
    }
}

fn parse_regime(v: &str) -> Result<RegimeKind, CliError> {
    match v {
        "fixed-q" => Ok(RegimeKind::FixedQ),
        "q-to-1" => Ok(RegimeKind::QToOne),
        _ => Err(invalid(format!("regime must be fixed-q or q-to-1, got {v:?}"))),
    }
}

fn parse_format(v: &str) -> Result<Format, CliError> {
    match v {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(invalid(format!("format must be csv or json, got {v:?}"))),
    }
}

impl RunConfig {
    /// Defaults, overridden by the config file entries, overridden by flags.
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
            let map = parse_config(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))?;
            cfg.apply_file(&map)?;
        }
        cfg.apply_flags(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, map: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (k, v) in map {
            match k.as_str() {
                "model" => self.model = parse_model(v)?,
                "q" => self.q = parse_value(k, v)?,
                "sigma" => self.sigma = parse_value(k, v)?,
                "rho0" => self.rho0 = parse_value(k, v)?,
                "rho1" => self.rho1 = parse_value(k, v)?,
                "c" => self.c = parse_value(k, v)?,
                "L" => self.l = parse_value(k, v)?,
                "N" => self.n = parse_list(k, v)?,
                "t" => self.t = parse_value(k, v)?,
                "x" => self.x = parse_value(k, v)?,
                "y" => self.y = parse_value(k, v)?,
                "K" => self.k = parse_value(k, v)?,
                "from" => self.from = parse_value(k, v)?,
                "to" => self.to = parse_value(k, v)?,
                "count" => self.count = parse_value(k, v)?,
                "side" => self.side_y = parse_side(v)?,
                "regime" => self.regime = parse_regime(v)?,
                "seed" => self.seed = parse_value(k, v)?,
                "tol" => self.tol = parse_value(k, v)?,
                "out" => self.out = Some(PathBuf::from(v)),
                "format" => self.format = parse_format(v)?,
                _ => return Err(invalid(format!("unknown config key {k:?}; known keys: {}", KEYS.join(" ")))),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: &Flags) -> Result<(), CliError> {
        fn set<T: Clone>(dst: &mut T, src: &Option<T>) {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        if let Some(m) = &f.model {
            self.model = parse_model(m)?;
        }
        set(&mut self.q, &f.q);
        set(&mut self.sigma, &f.sigma);
        set(&mut self.rho0, &f.rho0);
        set(&mut self.rho1, &f.rho1);
        set(&mut self.c, &f.c);
        set(&mut self.l, &f.l);
        set(&mut self.n, &f.n);
        set(&mut self.t, &f.t);
        set(&mut self.x, &f.x);
        set(&mut self.y, &f.y);
        set(&mut self.k, &f.k);
        set(&mut self.from, &f.from);
        set(&mut self.to, &f.to);
        set(&mut self.count, &f.count);
        set(&mut self.seed, &f.seed);
        set(&mut self.tol, &f.tol);
        if let Some(s) = &f.side {
            self.side_y = parse_side(s)?;
        }
        if let Some(r) = &f.regime {
            self.regime = parse_regime(r)?;
        }
        if let Some(p) = &f.out {
            self.out = Some(p.clone());
        }
        if let Some(fmt) = &f.format {
            self.format = parse_format(fmt)?;
        }
        self.inject_fault |= f.inject_fault;
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        for (k, v) in [("q", self.q), ("sigma", self.sigma), ("rho0", self.rho0), ("rho1", self.rho1), ("c", self.c), ("t", self.t), ("x", self.x), ("y", self.y), ("tol", self.tol)] {
            if !v.is_finite() {
                return Err(invalid(format!("{k} must be finite")));
            }
        }
        self.weight_model()?;
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(invalid("N list must be nonempty with positive entries"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.t <= 0.0 {
            return Err(invalid(format!("t must be positive, got {}", self.t)));
        }
        if self.c <= 0.0 {
            return Err(invalid(format!("c must be positive, got {}", self.c)));
        }
        Ok(())
    }

    /// The q-model parameters; also used to validate the ranges.
    pub fn q_params(&self) -> Result<QModelParams, CliError> {
        QModelParams::new(self.q, self.sigma, self.rho0, self.rho1).map_err(|e| invalid(e.to_string()))
    }

    pub fn weight_model(&self) -> Result<WeightModel, CliError> {
        match self.model {
            ModelKind::Q => Ok(WeightModel::q_model(self.q_params()?)),
            ModelKind::Unit => WeightModel::unit(self.rho0, self.rho1).map_err(|e| invalid(e.to_string())),
        }
    }

    /// `key=value` pairs echoed into output headers.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let list = self.n.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
        vec![
            ("model", if self.model == ModelKind::Q { "q" } else { "unit" }.into()),
            ("q", self.q.to_string()),
            ("sigma", self.sigma.to_string()),
            ("rho0", self.rho0.to_string()),
            ("rho1", self.rho1.to_string()),
            ("c", self.c.to_string()),
            ("L", self.l.to_string()),
            ("N", list),
            ("t", self.t.to_string()),
            ("x", self.x.to_string()),
            ("y", self.y.to_string()),
            ("K", self.k.to_string()),
            ("from", self.from.to_string()),
            ("to", self.to.to_string()),
            ("count", self.count.to_string()),
            ("side", if self.side_y { "y" } else { "x" }.into()),
            ("regime", if self.regime == RegimeKind::FixedQ { "fixed-q" } else { "q-to-1" }.into()),
            ("seed", self.seed.to_string()),
            ("tol", self.tol.to_string()),
            ("format", if self.format == Format::Csv { "csv" } else { "json" }.into()),
            ("inject_fault", self.inject_fault.to_string()),
        ]
    }
}
