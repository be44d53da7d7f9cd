//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; blank lines and `#` comments are ignored. Real
//! values accept multiples of `pi` (`-pi/6`, `4*pi`, `0.5pi`). Unknown keys
//! are rejected.

use crate::analysis::{DiagramQuantity, DiagramSource};
use crate::error::{Error, Result};
use crate::evolve::default_record_every;
use crate::model::ModelParams;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use super::format::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepSource {
    Theory,
    Simulation,
    Both,
}

impl SweepSource {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "theory" => Some(Self::Theory),
            "simulation" => Some(Self::Simulation),
            "both" => Some(Self::Both),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::Theory => "theory",
            Self::Simulation => "simulation",
            Self::Both => "both",
        }
    }

    pub fn sources(self) -> Vec<DiagramSource> {
        match self {
            Self::Theory => vec![DiagramSource::Theory],
            Self::Simulation => vec![DiagramSource::Simulation],
            Self::Both => vec![DiagramSource::Theory, DiagramSource::Simulation],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitChoice {
    /// Exponential before the crossover time, Gaussian after.
    Auto,
    Exponential,
    Gaussian,
}

impl FitChoice {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "auto" => Some(Self::Auto),
            "exponential" => Some(Self::Exponential),
            "gaussian" => Some(Self::Gaussian),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::Auto => "auto",
            Self::Exponential => "exponential",
            Self::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kick_k: f64,
    pub lambda: f64,
    pub phi: f64,
    pub epsilon: f64,
    pub hbar_eff: f64,
    pub n_modes: usize,
    /// Largest lattice the automatic doubling may reach.
    pub max_modes: usize,
    pub t_max: u64,
    /// `None` means [`default_record_every`].
    pub record_every: Option<u64>,
    pub out: PathBuf,
    pub snapshots: Vec<u64>,
    pub write_snapshots: bool,

    /// Number of theory samples; zero selects the recorded integer grid.
    pub theory_points: usize,
    pub theory_t_min: f64,
    pub theory_log: bool,

    pub sweep_t_min: u64,
    pub sweep_t_max: u64,
    pub sweep_t_step: u64,
    pub sweep_lambda_min: f64,
    pub sweep_lambda_max: f64,
    pub sweep_lambda_points: usize,
    pub sweep_source: SweepSource,
    pub sweep_quantities: Vec<DiagramQuantity>,

    pub fit_kind: FitChoice,
    pub exp_floor: f64,
    pub gauss_floor: f64,
    pub drift_t: f64,

    pub table_t_max: u64,
    pub table_record_every: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let m = ModelParams::default();
        Self {
            kick_k: m.kick_strength,
            lambda: m.lambda,
            phi: m.phase,
            epsilon: m.epsilon,
            hbar_eff: m.hbar_eff,
            n_modes: m.n_modes,
            max_modes: crate::evolve::MAX_AUTO_MODES,
            t_max: 100,
            record_every: None,
            out: PathBuf::from("out"),
            snapshots: vec![2, 10, 1000, 3000],
            write_snapshots: false,
            theory_points: 0,
            theory_t_min: 0.0,
            theory_log: false,
            sweep_t_min: 1,
            sweep_t_max: 500,
            sweep_t_step: 1,
            sweep_lambda_min: 0.1,
            sweep_lambda_max: 1.5,
            sweep_lambda_points: 15,
            sweep_source: SweepSource::Both,
            sweep_quantities: DiagramQuantity::ALL.to_vec(),
            fit_kind: FitChoice::Auto,
            exp_floor: crate::analysis::FitOptions::EXPONENTIAL.floor,
            gauss_floor: crate::analysis::FitOptions::GAUSSIAN.floor,
            drift_t: 2000.0,
            table_t_max: 3000,
            table_record_every: 1,
        }
    }
}

/// Every recognised key, in serialisation order.
pub const KEYS: &[&str] = &[
    "kick_k",
    "lambda",
    "phi",
    "epsilon",
    "hbar_eff",
    "n_modes",
    "max_modes",
    "t_max",
    "record_every",
    "out",
    "snapshots",
    "write_snapshots",
    "theory_points",
    "theory_t_min",
    "theory_log",
    "sweep_t_min",
    "sweep_t_max",
    "sweep_t_step",
    "sweep_lambda_min",
    "sweep_lambda_max",
    "sweep_lambda_points",
    "sweep_source",
    "sweep_quantities",
    "fit_kind",
    "exp_floor",
    "gauss_floor",
    "drift_t",
    "table_t_max",
    "table_record_every",
];

fn bad(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("{key} = {value:?}: {what}"))
}

/// Parses a real number, optionally a product/quotient involving `pi`.
pub fn parse_real(text: &str) -> Option<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = &rest[..end];
        let factor = match token {
            "pi" => PI,
            _ => match token.strip_suffix("pi") {
                Some(num) if !num.is_empty() => num.parse::<f64>().ok()? * PI,
                _ => token.parse::<f64>().ok()?,
            },
        };
        if op == '*' {
            value *= factor;
        } else {
            value /= factor;
        }
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    Some(sign * value)
}

fn real(key: &str, value: &str) -> Result<f64> {
    parse_real(value)
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(key, value, "expected a real number"))
}

fn uint<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| bad(key, value, "expected a non-negative integer"))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

fn list<T>(value: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "kick_k" => self.kick_k = real(key, v)?,
            "lambda" => self.lambda = real(key, v)?,
            "phi" => self.phi = real(key, v)?,
            "epsilon" => self.epsilon = real(key, v)?,
            "hbar_eff" => self.hbar_eff = real(key, v)?,
            "n_modes" => self.n_modes = uint(key, v)?,
            "max_modes" => self.max_modes = uint(key, v)?,
            "t_max" => self.t_max = uint(key, v)?,
            "record_every" => {
                self.record_every = match v {
                    "auto" => None,
                    _ => Some(uint(key, v)?),
                }
            }
            "out" => self.out = PathBuf::from(v),
            "snapshots" => self.snapshots = list(v, |s| uint(key, s))?,
            "write_snapshots" => self.write_snapshots = boolean(key, v)?,
            "theory_points" => self.theory_points = uint(key, v)?,
            "theory_t_min" => self.theory_t_min = real(key, v)?,
            "theory_log" => self.theory_log = boolean(key, v)?,
            "sweep_t_min" => self.sweep_t_min = uint(key, v)?,
            "sweep_t_max" => self.sweep_t_max = uint(key, v)?,
            "sweep_t_step" => self.sweep_t_step = uint(key, v)?,
            "sweep_lambda_min" => self.sweep_lambda_min = real(key, v)?,
            "sweep_lambda_max" => self.sweep_lambda_max = real(key, v)?,
            "sweep_lambda_points" => self.sweep_lambda_points = uint(key, v)?,
            "sweep_source" => {
                self.sweep_source = SweepSource::parse(v)
                    .ok_or_else(|| bad(key, v, "expected theory, simulation or both"))?
            }
            "sweep_quantities" => {
                self.sweep_quantities = list(v, |s| {
                    DiagramQuantity::parse(s).ok_or_else(|| bad(key, s, "unknown quantity"))
                })?
            }
            "fit_kind" => {
                self.fit_kind = FitChoice::parse(v)
                    .ok_or_else(|| bad(key, v, "expected auto, exponential or gaussian"))?
            }
            "exp_floor" => self.exp_floor = real(key, v)?,
            "gauss_floor" => self.gauss_floor = real(key, v)?,
            "drift_t" => self.drift_t = real(key, v)?,
            "table_t_max" => self.table_t_max = uint(key, v)?,
            "table_record_every" => self.table_record_every = uint(key, v)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    fn value_of(&self, key: &str) -> String {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match key {
            "kick_k" => fmt_f64(self.kick_k),
            "lambda" => fmt_f64(self.lambda),
            "phi" => fmt_f64(self.phi),
            "epsilon" => fmt_f64(self.epsilon),
            "hbar_eff" => fmt_f64(self.hbar_eff),
            "n_modes" => self.n_modes.to_string(),
            "max_modes" => self.max_modes.to_string(),
            "t_max" => self.t_max.to_string(),
            "record_every" => self.record_every.map_or("auto".into(), |r| r.to_string()),
            "out" => self.out.display().to_string(),
            "snapshots" => join(&self.snapshots),
            "write_snapshots" => self.write_snapshots.to_string(),
            "theory_points" => self.theory_points.to_string(),
            "theory_t_min" => fmt_f64(self.theory_t_min),
            "theory_log" => self.theory_log.to_string(),
            "sweep_t_min" => self.sweep_t_min.to_string(),
            "sweep_t_max" => self.sweep_t_max.to_string(),
            "sweep_t_step" => self.sweep_t_step.to_string(),
            "sweep_lambda_min" => fmt_f64(self.sweep_lambda_min),
            "sweep_lambda_max" => fmt_f64(self.sweep_lambda_max),
            "sweep_lambda_points" => self.sweep_lambda_points.to_string(),
            "sweep_source" => self.sweep_source.as_str().into(),
            "sweep_quantities" => self
                .sweep_quantities
                .iter()
                .map(|q| q.name())
                .collect::<Vec<_>>()
                .join(","),
            "fit_kind" => self.fit_kind.as_str().into(),
            "exp_floor" => fmt_f64(self.exp_floor),
            "gauss_floor" => fmt_f64(self.gauss_floor),
            "drift_t" => fmt_f64(self.drift_t),
            "table_t_max" => self.table_t_max.to_string(),
            "table_record_every" => self.table_record_every.to_string(),
            _ => unreachable!("unlisted key {key}"),
        }
    }

    /// Every key with its current value, one per line.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.value_of(key));
        }
        out
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            kick_strength: self.kick_k,
            lambda: self.lambda,
            phase: self.phi,
            hbar_eff: self.hbar_eff,
            epsilon: self.epsilon,
            n_modes: self.n_modes,
        }
    }

    pub fn record_every(&self) -> u64 {
        self.record_every
            .unwrap_or_else(|| default_record_every(self.t_max))
    }

    /// Checks the whole configuration, reporting problems as config errors.
    pub fn validate(&self) -> Result<()> {
        self.model_params()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.max_modes < self.n_modes {
            return fail("max_modes must be >= n_modes");
        }
        if self.record_every == Some(0) {
            return fail("record_every must be >= 1");
        }
        if self.sweep_t_step == 0 || self.sweep_t_min > self.sweep_t_max {
            return fail("sweep t axis is empty");
        }
        if self.sweep_lambda_points == 0
            || !(self.sweep_lambda_min > 0.0 && self.sweep_lambda_min <= self.sweep_lambda_max)
        {
            return fail("sweep lambda axis must be non-empty and > 0");
        }
        if self.sweep_quantities.is_empty() {
            return fail("sweep_quantities is empty");
        }
        if !(self.exp_floor > 0.0
            && self.exp_floor < 1.0
            && self.gauss_floor > 0.0
            && self.gauss_floor < 1.0)
        {
            return fail("fit floors must lie in (0, 1)");
        }
        if self.theory_t_min < 0.0
            || (self.theory_log && self.theory_points > 0 && self.theory_t_min <= 0.0)
        {
            return fail("theory_t_min must be >= 0 (> 0 on a log grid)");
        }
        if self.table_record_every == 0 {
            return fail("table_record_every must be >= 1");
        }
        Ok(())
    }

    pub fn sweep_t_values(&self) -> Vec<u64> {
        (self.sweep_t_min..=self.sweep_t_max)
            .step_by(self.sweep_t_step as usize)
            .collect()
    }

    pub fn sweep_lambdas(&self) -> Vec<f64> {
        let n = self.sweep_lambda_points;
        if n == 1 {
            return vec![self.sweep_lambda_min];
        }
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                let i = i as f64;
                (self.sweep_lambda_min * (last - i) + self.sweep_lambda_max * i) / last
            })
            .collect()
    }

    /// Times at which the theory curve is sampled.
    pub fn theory_times(&self) -> Vec<f64> {
        let t_max = self.t_max as f64;
        let n = self.theory_points;
        match n {
            0 => {
                let every = self.record_every();
                (0..=self.t_max)
                    .filter(|t| t % every == 0)
                    .map(|t| t as f64)
                    .collect()
            }
            1 => vec![self.theory_t_min],
            _ if self.theory_log => {
                let (a, b) = (self.theory_t_min.ln(), t_max.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
            _ => (0..n)
                .map(|i| {
                    self.theory_t_min + (t_max - self.theory_t_min) * i as f64 / (n - 1) as f64
                })
                .collect(),
        }
    }
}
