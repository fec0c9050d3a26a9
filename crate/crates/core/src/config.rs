//! Run configuration: a plain `key = value` text file, one pair per line,
//! `#` starting a comment, with command-line overrides layered on top.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;

use crate::dynamics::TsspConfig;
use crate::error::{Result, SpsError};
use crate::grid::RadialGrid;
use crate::ground_state::GfdnConfig;
use crate::model::{ExternalPotential, PhysicsParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    GroundState,
    Evolve,
    Sweep,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::GroundState => "groundstate",
            Mode::Evolve => "evolve",
            Mode::Sweep => "sweep",
        }
    }
}

/// Ground-state discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Besp,
    Befd,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Besp => "besp",
            Method::Befd => "befd",
        }
    }
}

/// Reference solution for convergence sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    Method(Method),
    /// Closed-form trap ground state; only valid without interactions.
    Analytic,
}

impl Benchmark {
    pub fn as_str(self) -> &'static str {
        match self {
            Benchmark::Method(m) => m.as_str(),
            Benchmark::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Zero,
    Harmonic(f64),
    Tabulated(PathBuf),
}

impl PotentialSpec {
    fn render(&self) -> String {
        match self {
            PotentialSpec::Zero => "zero".to_string(),
            PotentialSpec::Harmonic(g) => format!("harmonic:{g}"),
            PotentialSpec::Tabulated(p) => format!("tabulated:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub c_p: f64,
    pub alpha: f64,
    pub potential: PotentialSpec,
    pub radius: f64,
    pub intervals: usize,
    pub dt: f64,
    pub tol_outer: f64,
    pub tol_inner: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub method: Method,
    pub t_final: f64,
    pub record_every: usize,
    pub snapshot_times: Vec<f64>,
    pub gaussian_width: f64,
    pub sweep_h: Vec<f64>,
    pub benchmark: Benchmark,
    pub benchmark_h: f64,
    pub out_dir: PathBuf,
    pub prefix: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::GroundState,
            c_p: 100.0,
            alpha: 1.0,
            potential: PotentialSpec::Harmonic(1.0),
            radius: 8.0,
            intervals: 128,
            dt: 0.01,
            tol_outer: 1e-10,
            tol_inner: 1e-13,
            max_outer: 100_000,
            max_inner: 500,
            method: Method::Besp,
            t_final: 10.0,
            record_every: 10,
            snapshot_times: Vec::new(),
            gaussian_width: 1.0,
            sweep_h: vec![1.0, 0.5, 0.25, 0.125],
            benchmark: Benchmark::Method(Method::Befd),
            benchmark_h: 1.0 / 64.0,
            out_dir: PathBuf::from("."),
            prefix: "sps".to_string(),
        }
    }
}

const KEYS: &[&str] = &[
    "mode",
    "c_p",
    "alpha",
    "potential",
    "R",
    "J",
    "dt",
    "tol_outer",
    "tol_inner",
    "max_outer",
    "max_inner",
    "method",
    "t_final",
    "record_every",
    "snapshot_times",
    "gaussian_width",
    "sweep_h",
    "benchmark",
    "benchmark_h",
    "out_dir",
    "prefix",
];

/// Accepts plain decimals and simple fractions such as `1/64`.
fn parse_number(key: &str, value: &str) -> Result<f64> {
    let parsed = match value.split_once('/') {
        Some((num, den)) => num
            .trim()
            .parse::<f64>()
            .ok()
            .zip(den.trim().parse::<f64>().ok())
            .map(|(a, b)| a / b),
        None => value.parse::<f64>().ok(),
    };
    match parsed {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(SpsError::config(
            key,
            format!("`{value}` is not a finite number"),
        )),
    }
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| SpsError::config(key, format!("`{value}` is not a nonnegative integer")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|s| parse_number(key, s.trim()))
        .collect()
}

fn parse_method(key: &str, value: &str) -> Result<Method> {
    match value {
        "besp" => Ok(Method::Besp),
        "befd" => Ok(Method::Befd),
        _ => Err(SpsError::config(
            key,
            format!("unknown method `{value}` (expected besp or befd)"),
        )),
    }
}

fn parse_potential(value: &str) -> Result<PotentialSpec> {
    let (kind, arg) = match value.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (value, None),
    };
    match (kind, arg) {
        ("zero", None) => Ok(PotentialSpec::Zero),
        ("harmonic", None) => Ok(PotentialSpec::Harmonic(1.0)),
        ("harmonic", Some(g)) => parse_number("potential", g).map(PotentialSpec::Harmonic),
        ("tabulated", Some(path)) if !path.is_empty() => {
            Ok(PotentialSpec::Tabulated(PathBuf::from(path)))
        }
        _ => Err(SpsError::config(
            "potential",
            format!("`{value}` is not one of zero, harmonic[:gamma], tabulated:<file>"),
        )),
    }
}

impl RunConfig {
    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "mode" => {
                self.mode = match value {
                    "groundstate" => Mode::GroundState,
                    "evolve" => Mode::Evolve,
                    "sweep" => Mode::Sweep,
                    _ => return Err(SpsError::config(key, format!("unknown mode `{value}`"))),
                }
            }
            "c_p" => self.c_p = parse_number(key, value)?,
            "alpha" => self.alpha = parse_number(key, value)?,
            "potential" => self.potential = parse_potential(value)?,
            "R" => self.radius = parse_number(key, value)?,
            "J" => self.intervals = parse_count(key, value)?,
            "dt" => self.dt = parse_number(key, value)?,
            "tol_outer" => self.tol_outer = parse_number(key, value)?,
            "tol_inner" => self.tol_inner = parse_number(key, value)?,
            "max_outer" => self.max_outer = parse_count(key, value)?,
            "max_inner" => self.max_inner = parse_count(key, value)?,
            "method" => self.method = parse_method(key, value)?,
            "t_final" => self.t_final = parse_number(key, value)?,
            "record_every" => self.record_every = parse_count(key, value)?,
            "snapshot_times" => self.snapshot_times = parse_list(key, value)?,
            "gaussian_width" => self.gaussian_width = parse_number(key, value)?,
            "sweep_h" => self.sweep_h = parse_list(key, value)?,
            "benchmark" => {
                self.benchmark = match value {
                    "analytic" => Benchmark::Analytic,
                    other => Benchmark::Method(parse_method(key, other)?),
                }
            }
            "benchmark_h" => self.benchmark_h = parse_number(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "prefix" => {
                if value.is_empty() || value.contains('/') {
                    return Err(SpsError::config(key, "must be a nonempty file name prefix"));
                }
                self.prefix = value.to_string()
            }
            _ => return Err(SpsError::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Parses config text. Returns the config and the keys it set.
    pub fn parse_str(text: &str) -> Result<(Self, Vec<String>)> {
        let mut config = RunConfig::default();
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SpsError::config(line, format!("line {lineno}: expected `key = value`"))
            })?;
            let key = key.trim();
            config.set(key, value).map_err(|e| match e {
                SpsError::Config { field, message } => SpsError::Config {
                    field,
                    message: format!("line {lineno}: {message}"),
                },
                other => other,
            })?;
            seen.push(key.to_string());
        }
        Ok((config, seen))
    }

    /// Loads an optional file, applies `key=value` overrides, validates and
    /// logs every field left at its default.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let (mut config, mut seen) = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| {
                    SpsError::config("config", format!("cannot read {}: {e}", p.display()))
                })?;
                Self::parse_str(&text)?
            }
            None => (RunConfig::default(), Vec::new()),
        };
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                SpsError::config(item.as_str(), "override must look like key=value")
            })?;
            config.set(key.trim(), value)?;
            seen.push(key.trim().to_string());
        }
        config.validate()?;
        let rendered = config.render();
        for line in rendered.lines() {
            let key = line.split(" = ").next().unwrap_or("");
            if !seen.iter().any(|s| s == key) {
                info!("default {line}");
            }
        }
        Ok(config)
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.radius, self.intervals)
    }

    /// Physics for a given grid; tabulated potentials are read here and must
    /// match the grid's node count.
    pub fn physics(&self, grid: &RadialGrid) -> Result<PhysicsParams> {
        let potential = match &self.potential {
            PotentialSpec::Zero => ExternalPotential::Zero,
            PotentialSpec::Harmonic(g) => ExternalPotential::Harmonic { gamma: *g },
            PotentialSpec::Tabulated(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    SpsError::config("potential", format!("cannot read {}: {e}", path.display()))
                })?;
                let values = text
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_number("potential", s))
                    .collect::<Result<Vec<_>>>()?;
                ExternalPotential::Tabulated(values)
            }
        };
        let params = PhysicsParams::new(self.c_p, self.alpha, potential)?;
        params.potential.on_nodes(grid)?;
        Ok(params)
    }

    pub fn gfdn(&self) -> GfdnConfig {
        GfdnConfig {
            dt: self.dt,
            tol_outer: self.tol_outer,
            tol_inner: self.tol_inner,
            max_outer: self.max_outer,
            max_inner: self.max_inner,
            initial_guess: None,
        }
    }

    pub fn tssp(&self) -> TsspConfig {
        TsspConfig {
            dt: self.dt,
            t_final: self.t_final,
            record_every: self.record_every,
            snapshot_times: self.snapshot_times.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        if let PotentialSpec::Harmonic(g) = self.potential {
            if !g.is_finite() {
                return Err(SpsError::config(
                    "potential",
                    "harmonic frequency must be finite",
                ));
            }
        }
        self.physics(&grid)?;
        self.gfdn().validate()?;
        match self.mode {
            Mode::Evolve => self.tssp().validate()?,
            Mode::Sweep => {
                if self.sweep_h.is_empty() {
                    return Err(SpsError::config(
                        "sweep_h",
                        "need at least one trial mesh size",
                    ));
                }
                RadialGrid::with_spacing(self.radius, self.benchmark_h)
                    .map_err(|e| SpsError::config("benchmark_h", e.to_string()))?;
                for &h in &self.sweep_h {
                    RadialGrid::with_spacing(self.radius, h)
                        .map_err(|e| SpsError::config("sweep_h", e.to_string()))?;
                    let ratio = h / self.benchmark_h;
                    if (ratio - ratio.round()).abs() > 1e-9 * ratio || ratio.round() < 1.0 {
                        return Err(SpsError::config(
                            "sweep_h",
                            format!(
                                "trial mesh {h} does not nest in the benchmark mesh {}: every trial spacing must be a whole multiple of benchmark_h",
                                self.benchmark_h
                            ),
                        ));
                    }
                }
                if self.benchmark == Benchmark::Analytic
                    && !(self.c_p == 0.0
                        && self.alpha == 0.0
                        && matches!(self.potential, PotentialSpec::Harmonic(_)))
                {
                    return Err(SpsError::config(
                        "benchmark",
                        "analytic benchmark needs c_p = 0, alpha = 0 and a harmonic potential",
                    ));
                }
            }
            Mode::GroundState => {}
        }
        Ok(())
    }

    /// Canonical `key = value` rendering of every field.
    pub fn render(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("mode", self.mode.as_str().to_string());
        line("c_p", self.c_p.to_string());
        line("alpha", self.alpha.to_string());
        line("potential", self.potential.render());
        line("R", self.radius.to_string());
        line("J", self.intervals.to_string());
        line("dt", self.dt.to_string());
        line("tol_outer", self.tol_outer.to_string());
        line("tol_inner", self.tol_inner.to_string());
        line("max_outer", self.max_outer.to_string());
        line("max_inner", self.max_inner.to_string());
        line("method", self.method.as_str().to_string());
        line("t_final", self.t_final.to_string());
        line("record_every", self.record_every.to_string());
        line("snapshot_times", list(&self.snapshot_times));
        line("gaussian_width", self.gaussian_width.to_string());
        line("sweep_h", list(&self.sweep_h));
        line("benchmark", self.benchmark.as_str().to_string());
        line("benchmark_h", self.benchmark_h.to_string());
        line("out_dir", self.out_dir.display().to_string());
        line("prefix", self.prefix.clone());
        debug_assert_eq!(out.lines().count(), KEYS.len());
        out
    }
}
