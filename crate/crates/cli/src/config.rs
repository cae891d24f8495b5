use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use cumruin::{BrownianParams, CramerLundbergParams, ModelParams};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cl,
    Bm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuinKind {
    Classical,
    Cumulative,
    Exponential,
    Parisian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Simulate,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Parameters that a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    T,
    R,
    X,
    Q,
    C,
    Lambda,
    Alpha,
    Sigma,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::T => "t",
            SweepVar::R => "r",
            SweepVar::X => "x",
            SweepVar::Q => "q",
            SweepVar::C => "c",
            SweepVar::Lambda => "lambda",
            SweepVar::Alpha => "alpha",
            SweepVar::Sigma => "sigma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    /// `steps` evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + i as f64 * h
                }
            })
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [var, start, stop, steps] = parts[..] else {
            return Err(format!(
                "sweep must look like var:start:stop:steps, got `{s}`"
            ));
        };
        let var = match var {
            "t" => SweepVar::T,
            "r" => SweepVar::R,
            "x" => SweepVar::X,
            "q" => SweepVar::Q,
            "c" => SweepVar::C,
            "lambda" => SweepVar::Lambda,
            "alpha" => SweepVar::Alpha,
            "sigma" => SweepVar::Sigma,
            other => return Err(format!("unknown sweep variable `{other}`")),
        };
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|e| format!("bad sweep bound `{v}`: {e}"))
        };
        let steps: usize = steps
            .parse()
            .map_err(|e| format!("bad sweep step count `{steps}`: {e}"))?;
        if steps == 0 {
            return Err("sweep needs at least one step".into());
        }
        Ok(Sweep {
            var,
            start: num(start)?,
            stop: num(stop)?,
            steps,
        })
    }
}

/// Flags shared by `compute` and `simulate`. Everything is optional so a
/// config file can fill the gaps; flags win on conflict.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// key=value file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Premium rate (drift for the Brownian model).
    #[arg(long)]
    pub c: Option<f64>,
    /// Claim arrival rate.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Rate of the exponential claim sizes.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Volatility of the Brownian model.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Initial capital.
    #[arg(long)]
    pub x: Option<f64>,
    /// Horizon.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_enum)]
    pub ruin: Option<RuinKind>,
    /// Allowance for cumulative and Parisian ruin.
    #[arg(long)]
    pub r: Option<f64>,
    /// Clock rate for exponential Parisian ruin.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Euler step for Brownian paths.
    #[arg(long)]
    pub dt: Option<f64>,
    /// var:start:stop:steps with var in t, r, x, q, c, lambda, alpha, sigma.
    #[arg(long)]
    pub sweep: Option<Sweep>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelKind,
    pub c: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub x: f64,
    pub t: f64,
    pub ruin: RuinKind,
    pub r: f64,
    pub q: f64,
    pub method: Method,
    pub paths: u64,
    pub seed: u64,
    pub dt: f64,
    pub sweep: Option<Sweep>,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<std::path::PathBuf>,
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ConfigError(format!("{}:{}: expected key=value", path.display(), n + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn from_file<T: FromStr>(
    map: &mut BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    match map.remove(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|e| ConfigError(format!("config key `{key}`: {e}"))),
    }
}

fn enum_from_file<T: ValueEnum>(
    map: &mut BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, ConfigError> {
    match map.remove(key) {
        None => Ok(None),
        Some(v) => T::from_str(&v, true)
            .map(Some)
            .map_err(|e| ConfigError(format!("config key `{key}`: {e}"))),
    }
}

impl RunArgs {
    pub fn resolve(&self, default_method: Method) -> Result<RunConfig, ConfigError> {
        let mut file = match &self.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        macro_rules! pick {
            ($field:ident, $default:expr) => {{
                let from_file = from_file(&mut file, stringify!($field))?;
                self.$field.or(from_file).unwrap_or($default)
            }};
        }
        macro_rules! pick_enum {
            ($field:ident, $default:expr) => {{
                let from_file = enum_from_file(&mut file, stringify!($field))?;
                self.$field.or(from_file).unwrap_or($default)
            }};
        }
        let cfg = RunConfig {
            model: pick_enum!(model, ModelKind::Cl),
            c: pick!(c, 2.0),
            lambda: pick!(lambda, 1.0),
            alpha: pick!(alpha, 1.0),
            sigma: pick!(sigma, 1.0),
            x: pick!(x, 0.0),
            t: pick!(t, 1.0),
            ruin: pick_enum!(ruin, RuinKind::Cumulative),
            r: pick!(r, 0.2),
            q: pick!(q, 2.0),
            method: pick_enum!(method, default_method),
            paths: pick!(paths, 100_000),
            seed: pick!(seed, 1),
            dt: pick!(dt, 1e-3),
            sweep: {
                let from_file = from_file(&mut file, "sweep")?;
                self.sweep.or(from_file)
            },
            format: pick_enum!(format, Format::Csv),
            out: {
                let from_file = file.remove("out").map(Into::into);
                self.out.clone().or(from_file)
            },
        };
        file.remove("config");
        if let Some(k) = file.keys().next() {
            return Err(ConfigError(format!("unknown config key `{k}`")));
        }
        cfg.check()?;
        Ok(cfg)
    }
}

impl RunConfig {
    fn check(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError(format!(
                    "{name} must be finite and > 0, got {v}"
                )))
            }
        };
        match self.model {
            ModelKind::Cl => {
                positive("c", self.c)?;
                positive("lambda", self.lambda)?;
                positive("alpha", self.alpha)?;
            }
            ModelKind::Bm => {
                positive("c", self.c)?;
                positive("sigma", self.sigma)?;
                positive("dt", self.dt)?;
            }
        }
        if !(self.x >= 0.0 && self.x.is_finite()) {
            return Err(ConfigError(format!(
                "x must be finite and >= 0, got {}",
                self.x
            )));
        }
        positive("t", self.t)?;
        match self.ruin {
            RuinKind::Cumulative | RuinKind::Parisian => positive("r", self.r)?,
            RuinKind::Exponential => positive("q", self.q)?,
            RuinKind::Classical => {}
        }
        if self.ruin == RuinKind::Parisian && self.method != Method::Simulate {
            return Err(ConfigError(
                "parisian ruin has no closed form here; use --method simulate".into(),
            ));
        }
        if self.method != Method::Formula && self.paths == 0 {
            return Err(ConfigError("paths must be >= 1".into()));
        }
        Ok(())
    }

    /// This configuration with the sweep variable set to `v`.
    pub fn at(&self, var: SweepVar, v: f64) -> Result<RunConfig, ConfigError> {
        let mut c = self.clone();
        match var {
            SweepVar::T => c.t = v,
            SweepVar::R => c.r = v,
            SweepVar::X => c.x = v,
            SweepVar::Q => c.q = v,
            SweepVar::C => c.c = v,
            SweepVar::Lambda => c.lambda = v,
            SweepVar::Alpha => c.alpha = v,
            SweepVar::Sigma => c.sigma = v,
        }
        c.check()?;
        Ok(c)
    }

    pub fn model_params(&self) -> cumruin::Result<ModelParams> {
        Ok(match self.model {
            ModelKind::Cl => CramerLundbergParams::new(self.c, self.lambda, self.alpha)?.into(),
            ModelKind::Bm => BrownianParams::new(self.c, self.sigma)?.into(),
        })
    }
}
