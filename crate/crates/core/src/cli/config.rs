//! Experiment configuration: built-in defaults, overridden by a `key=value`
//! file, overridden by command-line flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diagnostics::Observable;
use crate::integrators::Method;
use crate::system::{Cosine, Harmonic, Potential, State, SystemParams};

use super::format::fmt_f64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Integrate,
    Sweep,
    Dissipation,
    Structure,
}

impl Subcommand {
    pub fn as_str(&self) -> &'static str {
        match self {
            Subcommand::Integrate => "integrate",
            Subcommand::Sweep => "sweep",
            Subcommand::Dissipation => "dissipation",
            Subcommand::Structure => "structure",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Harmonic,
    Cosine,
}

impl PotentialKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PotentialKind::Harmonic => "harmonic",
            PotentialKind::Cosine => "cosine",
        }
    }

    pub fn build(&self, k: f64) -> Box<dyn Potential> {
        match self {
            PotentialKind::Harmonic => Box::new(Harmonic::new(k)),
            PotentialKind::Cosine => Box::new(Cosine::new(k)),
        }
    }
}

impl FromStr for PotentialKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "harmonic" => Ok(PotentialKind::Harmonic),
            "cosine" => Ok(PotentialKind::Cosine),
            _ => Err(format!(
                "unknown potential `{s}` (expected harmonic or cosine)"
            )),
        }
    }
}

/// Geometric stepsize grid `h_start · growthⁿ ≤ h_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub h_start: f64,
    pub growth: f64,
    pub h_max: f64,
}

impl SweepSpec {
    pub const DEFAULT: SweepSpec = SweepSpec {
        h_start: 0.0094,
        growth: 1.3,
        h_max: 0.5,
    };

    pub fn grid(&self) -> Vec<f64> {
        (0..)
            .map(|n| self.h_start * self.growth.powi(n))
            .take_while(|&h| h <= self.h_max)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepping {
    Single(f64),
    Sweep(SweepSpec),
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Subcommand,
    pub methods: Vec<Method>,
    pub potential: PotentialKind,
    pub k: f64,
    pub params: SystemParams,
    pub initial: State,
    pub stepping: Stepping,
    pub tsim: f64,
    pub observable: Observable,
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn build_potential(&self) -> Box<dyn Potential> {
        self.potential.build(self.k)
    }

    pub fn single_h(&self) -> Option<f64> {
        match self.stepping {
            Stepping::Single(h) => Some(h),
            Stepping::Sweep(_) => None,
        }
    }

    /// `key=value` pairs which parse back to this configuration.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let methods: Vec<&str> = self.methods.iter().map(Method::as_str).collect();
        let mut pairs = vec![
            ("method".to_string(), methods.join(",")),
            ("potential".into(), self.potential.as_str().into()),
            ("k".into(), fmt_f64(self.k)),
            ("mass".into(), fmt_f64(self.params.mass)),
            ("gamma".into(), fmt_f64(self.params.gamma)),
            ("temperature".into(), fmt_f64(self.params.temperature)),
            ("q0".into(), fmt_f64(self.initial.q)),
            ("p0".into(), fmt_f64(self.initial.p)),
            ("s0".into(), fmt_f64(self.initial.s)),
        ];
        match self.stepping {
            Stepping::Single(h) => pairs.push(("h".into(), fmt_f64(h))),
            Stepping::Sweep(s) => {
                pairs.push(("h-start".into(), fmt_f64(s.h_start)));
                pairs.push(("h-growth".into(), fmt_f64(s.growth)));
                pairs.push(("h-max".into(), fmt_f64(s.h_max)));
            }
        }
        pairs.push(("tsim".into(), fmt_f64(self.tsim)));
        pairs.push(("observable".into(), self.observable.as_str().into()));
        if let Some(out) = &self.output {
            pairs.push(("output".into(), out.clone()));
        }
        pairs
    }

    /// Single-line `key=value ...` encoding used in CSV metadata.
    pub fn to_line(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Inverse of [`ExperimentConfig::to_line`].
    pub fn from_line(command: Subcommand, line: &str) -> Result<Self, ConfigError> {
        let text = line.split_whitespace().collect::<Vec<_>>().join("\n");
        let raw = RawConfig::from_file_text(&text)?;
        parse_config(command, RawConfig::default(), Some(raw))
    }
}

/// Unresolved settings, as strings keyed like the long flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

pub const KEYS: [&str; 16] = [
    "method",
    "potential",
    "k",
    "mass",
    "gamma",
    "temperature",
    "q0",
    "p0",
    "s0",
    "h",
    "h-start",
    "h-growth",
    "h-max",
    "tsim",
    "observable",
    "output",
];

impl RawConfig {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::Usage(format!("unknown key `{key}`")));
        }
        let value = value.into();
        if key == "method" {
            // repeated methods accumulate
            if let Some(existing) = self.values.get_mut(key) {
                existing.push(',');
                existing.push_str(&value);
                return Ok(());
            }
        }
        self.values.insert(key.to_string(), value);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat `key=value` lines; blank lines and `#` comments are ignored.
    pub fn from_file_text(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::Usage(format!(
                    "config line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            if raw.values.contains_key(key) {
                return Err(ConfigError::Usage(format!(
                    "config line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
            raw.set(key, value.trim()).map_err(|e| match e {
                ConfigError::Usage(msg) => {
                    ConfigError::Usage(format!("config line {}: {msg}", lineno + 1))
                }
                other => other,
            })?;
        }
        Ok(raw)
    }

    /// `self` on top of `lower`.
    pub fn over(mut self, lower: RawConfig) -> RawConfig {
        for (k, v) in lower.values {
            self.values.entry(k).or_insert(v);
        }
        self
    }
}

fn parse_num(raw: &RawConfig, key: &str) -> Result<Option<f64>, ConfigError> {
    raw.get(key)
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| ConfigError::Usage(format!("--{key}: `{v}` is not a number")))
        })
        .transpose()
}

/// Resolve flags over an optional file over the defaults for `command`.
pub fn parse_config(
    command: Subcommand,
    flags: RawConfig,
    file: Option<RawConfig>,
) -> Result<ExperimentConfig, ConfigError> {
    let raw = flags.over(file.unwrap_or_default());

    let potential = match raw.get("potential") {
        Some(v) => v
            .parse::<PotentialKind>()
            .map_err(|e| ConfigError::Usage(format!("--potential: {e}")))?,
        None => PotentialKind::Harmonic,
    };
    let harmonic = potential == PotentialKind::Harmonic;

    let methods = match raw.get("method") {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<Method>()
                    .map_err(|e| ConfigError::Usage(format!("--method: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => default_methods(command, potential),
    };

    let num = |key: &str, default: f64| -> Result<f64, ConfigError> {
        Ok(parse_num(&raw, key)?.unwrap_or(default))
    };
    let k = num("k", 1.0)?;
    let mass = num("mass", 1.0)?;
    let gamma = num("gamma", if harmonic { 0.01 } else { 0.05 })?;
    let temperature = num("temperature", 1.0)?;
    let q0 = num("q0", if harmonic { 1.0 } else { 2.0 * PI / 3.0 })?;
    let p0 = num("p0", 0.0)?;
    let s0 = num("s0", 0.0)?;
    let tsim = num("tsim", if harmonic { 500.0 } else { 100.0 })?;

    let sweep_keys = ["h-start", "h-growth", "h-max"];
    let has_sweep_keys = sweep_keys.iter().any(|k| raw.get(k).is_some());
    let stepping = if command == Subcommand::Sweep {
        if raw.get("h").is_some() {
            return Err(ConfigError::Usage(
                "--h: sweep takes --h-start/--h-growth/--h-max instead".into(),
            ));
        }
        let d = SweepSpec::DEFAULT;
        Stepping::Sweep(SweepSpec {
            h_start: num("h-start", d.h_start)?,
            growth: num("h-growth", d.growth)?,
            h_max: num("h-max", d.h_max)?,
        })
    } else {
        if has_sweep_keys {
            return Err(ConfigError::Usage(format!(
                "--h-start/--h-growth/--h-max are only valid for sweep, not {command}"
            )));
        }
        let default_h = if command == Subcommand::Dissipation {
            0.5
        } else {
            0.1
        };
        Stepping::Single(num("h", default_h)?)
    };

    let observable = match raw.get("observable") {
        Some(v) => v
            .parse::<Observable>()
            .map_err(|e| ConfigError::Usage(format!("--observable: {e}")))?,
        None => Observable::Position,
    };

    let config = ExperimentConfig {
        command,
        methods,
        potential,
        k,
        params: SystemParams {
            mass,
            gamma,
            temperature,
        },
        initial: State::new(q0, p0, s0),
        stepping,
        tsim,
        observable,
        output: raw.get("output").map(str::to_string),
    };
    validate(&config)?;
    Ok(config)
}

fn default_methods(command: Subcommand, potential: PotentialKind) -> Vec<Method> {
    let harmonic = potential == PotentialKind::Harmonic;
    match command {
        Subcommand::Integrate => vec![Method::Ybaby],
        Subcommand::Sweep if harmonic => {
            vec![Method::Ybaby, Method::Mybaby, Method::Rk3, Method::Adg]
        }
        Subcommand::Sweep | Subcommand::Dissipation => {
            vec![Method::Ybaby, Method::Mybaby, Method::Rk3]
        }
        Subcommand::Structure if harmonic => Method::ALL.to_vec(),
        Subcommand::Structure => vec![Method::Verlet, Method::Ybaby, Method::Mybaby, Method::Rk3],
    }
}

fn validate(config: &ExperimentConfig) -> Result<(), ConfigError> {
    if config.potential == PotentialKind::Cosine && config.methods.contains(&Method::Adg) {
        return Err(ConfigError::NotApplicable(
            "--method adg cannot be combined with --potential cosine: the closed-form discrete \
             gradient step exists only for a linear force"
                .into(),
        ));
    }
    let mut v = Vec::new();
    if config.methods.is_empty() {
        v.push("at least one method is required".to_string());
    }
    if config.command == Subcommand::Integrate && config.methods.len() > 1 {
        v.push("integrate takes exactly one method".to_string());
    }
    for pair in config.methods.windows(2) {
        if config.methods[..].iter().filter(|m| **m == pair[0]).count() > 1 {
            v.push(format!("method {} listed twice", pair[0]));
            break;
        }
    }
    let p = &config.params;
    if !(p.mass.is_finite() && p.mass > 0.0) {
        v.push(format!("mass must be > 0 (got {})", p.mass));
    }
    if !(p.gamma.is_finite() && p.gamma >= 0.0) {
        v.push(format!("gamma must be >= 0 (got {})", p.gamma));
    }
    if !(p.temperature.is_finite() && p.temperature > 0.0) {
        v.push(format!("temperature must be > 0 (got {})", p.temperature));
    }
    if !config.k.is_finite() {
        v.push(format!("k must be finite (got {})", config.k));
    }
    if !config.initial.is_finite() {
        v.push("initial state must be finite".to_string());
    }
    if !(config.tsim.is_finite() && config.tsim > 0.0) {
        v.push(format!("tsim must be > 0 (got {})", config.tsim));
    }
    match config.stepping {
        Stepping::Single(h) => {
            if !(h.is_finite() && h > 0.0) {
                v.push(format!("h must be > 0 (got {h})"));
            }
        }
        Stepping::Sweep(s) => {
            if !(s.h_start.is_finite() && s.h_start > 0.0) {
                v.push(format!("h-start must be > 0 (got {})", s.h_start));
            }
            if !(s.growth.is_finite() && s.growth > 1.0) {
                v.push(format!("h-growth must be > 1 (got {})", s.growth));
            }
            if !(s.h_max >= s.h_start) {
                v.push(format!(
                    "h-max must be >= h-start (got {} < {})",
                    s.h_max, s.h_start
                ));
            }
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::Validation(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> RawConfig {
        let mut raw = RawConfig::default();
        for (k, v) in pairs {
            raw.set(k, *v).unwrap();
        }
        raw
    }

    #[test]
    fn defaults_reproduce_the_harmonic_sweep() {
        let c = parse_config(Subcommand::Sweep, RawConfig::default(), None).unwrap();
        assert_eq!(c.potential, PotentialKind::Harmonic);
        assert_eq!(
            c.params,
            SystemParams {
                mass: 1.0,
                gamma: 0.01,
                temperature: 1.0
            }
        );
        assert_eq!(c.initial, State::new(1.0, 0.0, 0.0));
        assert_eq!(c.tsim, 500.0);
        assert_eq!(c.stepping, Stepping::Sweep(SweepSpec::DEFAULT));
        assert_eq!(
            c.methods,
            vec![Method::Ybaby, Method::Mybaby, Method::Rk3, Method::Adg]
        );
    }

    #[test]
    fn cosine_defaults() {
        let c = parse_config(Subcommand::Sweep, flags(&[("potential", "cosine")]), None).unwrap();
        assert_eq!(c.params.gamma, 0.05);
        assert_eq!(c.tsim, 100.0);
        assert_eq!(c.initial, State::new(2.0 * PI / 3.0, 0.0, 0.0));
        assert!(!c.methods.contains(&Method::Adg));
    }

    #[test]
    fn default_sweep_grid_has_sixteen_points() {
        // Oracle: repeated multiplication by 1.3 from 0.0094 until exceeding 0.5.
        let mut oracle = Vec::new();
        let mut h: f64 = 0.0094;
        while h <= 0.5 {
            oracle.push(h);
            h *= 1.3;
        }
        let grid = SweepSpec::DEFAULT.grid();
        assert_eq!(grid.len(), 16);
        assert_eq!(oracle.len(), grid.len());
        for (a, b) in grid.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((grid[1] - 0.01222).abs() < 1e-15);
        assert!((grid[2] - 0.015886).abs() < 1e-15);
        assert!(*grid.last().unwrap() <= 0.5);
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = RawConfig::from_file_text("# comment\ngamma = 0.2\nmass=2\n\n").unwrap();
        let c = parse_config(
            Subcommand::Integrate,
            flags(&[("gamma", "0.3")]),
            Some(file),
        )
        .unwrap();
        assert_eq!(c.params.gamma, 0.3);
        assert_eq!(c.params.mass, 2.0);
        assert_eq!(c.params.temperature, 1.0);
        assert_eq!(c.single_h(), Some(0.1));
    }

    #[test]
    fn rejects_bad_input() {
        let err = parse_config(Subcommand::Sweep, flags(&[("gamma", "-1")]), None).unwrap_err();
        assert!(
            matches!(&err, ConfigError::Validation(v) if v.iter().any(|m| m.contains("gamma")))
        );

        let err = parse_config(
            Subcommand::Sweep,
            flags(&[("method", "adg"), ("potential", "cosine")]),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::NotApplicable(_)));

        assert!(matches!(
            RawConfig::from_file_text("colour=blue"),
            Err(ConfigError::Usage(msg)) if msg.contains("colour")
        ));
        assert!(RawConfig::from_file_text("gamma 0.1").is_err());
        assert!(RawConfig::default().set("bogus", "1").is_err());
        assert!(matches!(
            parse_config(Subcommand::Sweep, flags(&[("tsim", "abc")]), None),
            Err(ConfigError::Usage(msg)) if msg.contains("--tsim")
        ));
        assert!(parse_config(Subcommand::Sweep, flags(&[("h", "0.1")]), None).is_err());
        assert!(parse_config(Subcommand::Integrate, flags(&[("h-max", "0.1")]), None).is_err());
        assert!(parse_config(Subcommand::Sweep, flags(&[("h-growth", "0.9")]), None).is_err());
        assert!(parse_config(
            Subcommand::Integrate,
            flags(&[("method", "ybaby,rk3")]),
            None
        )
        .is_err());
    }

    #[test]
    fn repeated_method_flags_accumulate() {
        let c = parse_config(
            Subcommand::Dissipation,
            flags(&[("method", "ybaby"), ("method", "rk3")]),
            None,
        )
        .unwrap();
        assert_eq!(c.methods, vec![Method::Ybaby, Method::Rk3]);
        assert_eq!(c.single_h(), Some(0.5));
    }

    #[test]
    fn config_line_round_trips() {
        for (cmd, f) in [
            (
                Subcommand::Sweep,
                flags(&[("potential", "cosine"), ("h-max", "0.3")]),
            ),
            (
                Subcommand::Integrate,
                flags(&[
                    ("gamma", "0.123456789012345"),
                    ("h", "0.07"),
                    ("output", "out.csv"),
                ]),
            ),
            (
                Subcommand::Dissipation,
                flags(&[("observable", "p"), ("q0", "0.3")]),
            ),
        ] {
            let c = parse_config(cmd, f, None).unwrap();
            assert_eq!(ExperimentConfig::from_line(cmd, &c.to_line()).unwrap(), c);
        }
    }
}
