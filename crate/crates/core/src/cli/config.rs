//! Flat key/value run configuration.
//!
//! A config is a single JSON object whose keys are dotted names:
//!
//! ```json
//! {
//!   "a.kind": "squeezed_vacuum", "a.r": 1.0, "a.psi": 0.0,
//!   "b.kind": "coherent", "b.b": 31.62, "b.phi": 0.0,
//!   "total_photons": 1000,
//!   "sweep.param": "a.psi", "sweep.min": 0, "sweep.max": 6.283185307179586, "sweep.steps": 720
//! }
//! ```
//!
//! The same keys are accepted as `--set key=value` overrides and name the
//! swept parameter, so a sweep row is just the base config with one key
//! replaced.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::fock::{make_coherent, make_fock, make_squeezed_vacuum, Cutoff, ModeState};
use crate::posterior::PhaseGrid;

pub type ConfigMap = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

const MODE_KEYS: [&str; 6] = ["kind", "n", "b", "phi", "r", "psi"];
const TOP_KEYS: [&str; 11] = [
    "copies",
    "total_photons",
    "grid.min",
    "grid.max",
    "grid.points",
    "sweep.param",
    "sweep.min",
    "sweep.max",
    "sweep.steps",
    "output.format",
    "output.path",
];

/// One of the three supported single-mode inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Fock { n: usize },
    Coherent { b: f64, phi: f64 },
    SqueezedVacuum { r: f64, psi: f64 },
}

impl StateSpec {
    pub fn build(&self) -> crate::Result<ModeState> {
        match *self {
            StateSpec::Fock { n } => make_fock(n, n),
            StateSpec::Coherent { b, phi } => make_coherent(b, phi, Cutoff::Auto),
            StateSpec::SqueezedVacuum { r, psi } => make_squeezed_vacuum(r, psi, Cutoff::Auto),
        }
    }

    /// Analytic mean photon number (`n`, `b²`, `sinh² r`).
    pub fn mean_photons(&self) -> f64 {
        match *self {
            StateSpec::Fock { n } => n as f64,
            StateSpec::Coherent { b, .. } => b * b,
            StateSpec::SqueezedVacuum { r, .. } => r.sinh().powi(2),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Fock { n } => write!(f, "fock n={n}"),
            StateSpec::Coherent { b, phi } => write!(f, "coherent b={b} phi={phi}"),
            StateSpec::SqueezedVacuum { r, psi } => write!(f, "squeezed_vacuum r={r} psi={psi}"),
        }
    }
}

/// Resource budget: copies `M` or total photons `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Copies(f64),
    TotalPhotons(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// `steps` evenly spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + span * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    /// Human-readable, 17 significant digits.
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode_a: StateSpec,
    pub mode_b: StateSpec,
    pub budget: Budget,
    pub grid: Option<PhaseGrid>,
    pub sweep: Option<SweepSpec>,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
}

/// Reads a config document. An empty path yields an empty map.
pub fn load_map(text: &str) -> Result<ConfigMap, ConfigError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError::new("<document>", format!("not valid JSON: {e}")))?;
    match value {
        Value::Object(obj) => Ok(obj.into_iter().collect()),
        _ => Err(ConfigError::new(
            "<document>",
            "expected a single flat JSON object",
        )),
    }
}

/// Applies a `key=value` override; the value is read as JSON when possible
/// and as a bare string otherwise.
pub fn apply_override(map: &mut ConfigMap, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new(assignment, "override must look like key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    map.insert(key.to_string(), value);
    Ok(())
}

fn is_known_key(key: &str) -> bool {
    if TOP_KEYS.contains(&key) {
        return true;
    }
    match key.split_once('.') {
        Some((mode, field)) => (mode == "a" || mode == "b") && MODE_KEYS.contains(&field),
        None => false,
    }
}

/// Keys whose values are numbers and may therefore be swept.
pub fn is_numeric_key(key: &str) -> bool {
    is_known_key(key)
        && !key.ends_with(".kind")
        && !key.starts_with("sweep.")
        && !key.starts_with("output.")
}

fn number(map: &ConfigMap, key: &str) -> Result<Option<f64>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| ConfigError::new(key, "number out of range")),
        Some(other) => Err(ConfigError::new(
            key,
            format!("expected a number, got {other}"),
        )),
    }
}

fn required_number(map: &ConfigMap, key: &str) -> Result<f64, ConfigError> {
    number(map, key)?.ok_or_else(|| ConfigError::new(key, "missing"))
}

fn count(map: &ConfigMap, key: &str) -> Result<Option<usize>, ConfigError> {
    match number(map, key)? {
        None => Ok(None),
        Some(x) if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 => Ok(Some(x as usize)),
        Some(x) => Err(ConfigError::new(
            key,
            format!("expected a non-negative integer, got {x}"),
        )),
    }
}

fn string<'a>(map: &'a ConfigMap, key: &str) -> Result<Option<&'a str>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(ConfigError::new(
            key,
            format!("expected a string, got {other}"),
        )),
    }
}

fn non_negative(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(ConfigError::new(
            key,
            format!("must be non-negative, got {x}"),
        ))
    }
}

fn parse_mode(map: &ConfigMap, mode: &str) -> Result<StateSpec, ConfigError> {
    let key = |field: &str| format!("{mode}.{field}");
    let kind_key = key("kind");
    let kind = string(map, &kind_key)?.ok_or_else(|| ConfigError::new(&kind_key, "missing"))?;
    let (spec, allowed): (StateSpec, &[&str]) = match kind {
        "fock" => {
            let n = count(map, &key("n"))?.ok_or_else(|| ConfigError::new(key("n"), "missing"))?;
            (StateSpec::Fock { n }, &["n"])
        }
        "coherent" => {
            let b = non_negative(&key("b"), required_number(map, &key("b"))?)?;
            let phi = number(map, &key("phi"))?.unwrap_or(0.0);
            (StateSpec::Coherent { b, phi }, &["b", "phi"])
        }
        "squeezed_vacuum" | "squeezed" => {
            let r = non_negative(&key("r"), required_number(map, &key("r"))?)?;
            let psi = number(map, &key("psi"))?.unwrap_or(0.0);
            (StateSpec::SqueezedVacuum { r, psi }, &["r", "psi"])
        }
        other => {
            return Err(ConfigError::new(
                kind_key,
                format!(
                    "unknown state kind `{other}` (expected fock, coherent or squeezed_vacuum)"
                ),
            ))
        }
    };
    for field in MODE_KEYS
        .iter()
        .filter(|f| **f != "kind" && !allowed.contains(f))
    {
        if map.contains_key(&key(field)) {
            return Err(ConfigError::new(
                key(field),
                format!("not a parameter of a `{kind}` state"),
            ));
        }
    }
    Ok(spec)
}

impl RunConfig {
    pub fn from_map(map: &ConfigMap) -> Result<Self, ConfigError> {
        if let Some(unknown) = map.keys().find(|k| !is_known_key(k)) {
            return Err(ConfigError::new(unknown.as_str(), "unknown key"));
        }
        let mode_a = parse_mode(map, "a")?;
        let mode_b = parse_mode(map, "b")?;

        let budget = match (number(map, "copies")?, number(map, "total_photons")?) {
            (Some(m), None) => Budget::Copies(non_negative("copies", m)?),
            (None, Some(n)) if n > 0.0 => Budget::TotalPhotons(n),
            (None, Some(n)) => {
                return Err(ConfigError::new(
                    "total_photons",
                    format!("must be positive, got {n}"),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "copies",
                    "give exactly one of `copies` and `total_photons`",
                ))
            }
            (None, None) => {
                return Err(ConfigError::new(
                    "total_photons",
                    "missing budget: give `copies` or `total_photons`",
                ))
            }
        };

        let grid = match (number(map, "grid.min")?, number(map, "grid.max")?) {
            (None, None) => {
                if map.contains_key("grid.points") {
                    return Err(ConfigError::new("grid.min", "missing"));
                }
                None
            }
            (Some(lo), Some(hi)) => {
                let points = count(map, "grid.points")?.unwrap_or(crate::posterior::DEFAULT_POINTS);
                Some(
                    PhaseGrid::new(lo, hi, points)
                        .map_err(|e| ConfigError::new("grid.min", e.to_string()))?,
                )
            }
            (None, Some(_)) => return Err(ConfigError::new("grid.min", "missing")),
            (Some(_), None) => return Err(ConfigError::new("grid.max", "missing")),
        };

        let sweep = match string(map, "sweep.param")? {
            None => {
                if let Some(k) = ["sweep.min", "sweep.max", "sweep.steps"]
                    .into_iter()
                    .find(|k| map.contains_key(*k))
                {
                    return Err(ConfigError::new(
                        k,
                        "sweep bounds given without `sweep.param`",
                    ));
                }
                None
            }
            Some(param) => {
                if !is_numeric_key(param) {
                    return Err(ConfigError::new(
                        "sweep.param",
                        format!("`{param}` is not a numeric parameter"),
                    ));
                }
                let steps = count(map, "sweep.steps")?
                    .ok_or_else(|| ConfigError::new("sweep.steps", "missing"))?;
                if steps < 2 {
                    return Err(ConfigError::new("sweep.steps", "need at least 2 steps"));
                }
                Some(SweepSpec {
                    param: param.to_string(),
                    min: required_number(map, "sweep.min")?,
                    max: required_number(map, "sweep.max")?,
                    steps,
                })
            }
        };

        let format = match string(map, "output.format")? {
            None => None,
            Some("csv") => Some(OutputFormat::Csv),
            Some("json") => Some(OutputFormat::Json),
            Some("text") => Some(OutputFormat::Text),
            Some(other) => {
                return Err(ConfigError::new(
                    "output.format",
                    format!("unknown format `{other}` (expected csv, json or text)"),
                ))
            }
        };
        let output = string(map, "output.path")?.map(PathBuf::from);

        let config = Self {
            mode_a,
            mode_b,
            budget,
            grid,
            sweep,
            format,
            output,
        };
        if let Some(sweep) = &config.sweep {
            config.check_sweep_target(map, &sweep.param)?;
        }
        Ok(config)
    }

    /// The swept key must be meaningful for the configured state kinds and budget.
    fn check_sweep_target(&self, map: &ConfigMap, param: &str) -> Result<(), ConfigError> {
        let applies = match param.split_once('.') {
            Some((mode @ ("a" | "b"), field)) => {
                let spec = if mode == "a" {
                    self.mode_a
                } else {
                    self.mode_b
                };
                matches!(
                    (spec, field),
                    (StateSpec::Fock { .. }, "n")
                        | (StateSpec::Coherent { .. }, "b" | "phi")
                        | (StateSpec::SqueezedVacuum { .. }, "r" | "psi")
                )
            }
            Some(("grid", _)) => self.grid.is_some(),
            _ => map.contains_key(param),
        };
        if applies {
            Ok(())
        } else {
            Err(ConfigError::new(
                "sweep.param",
                format!("`{param}` is not defined by this configuration"),
            ))
        }
    }
}
