//! Config files and noise selection.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qham::neuron::{ActivationKind, DEFAULT_MAX_ATTEMPTS};
use qham::noise::{device_registry, load_registry, lookup_device};
use qham::{AncillaMode, NoiseSpec, Pattern, QhamError};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::GlobalArgs;

pub const SCHEMA_VERSION: u32 = 1;

/// Parses a JSON file, reporting the field path of any error.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let parsed = serde_path_to_error::deserialize(de)
        .map_err(|e| QhamError::Config { path: e.path().to_string(), message: e.inner().to_string() });
    parsed.with_context(|| format!("in {}", path.display()))
}

pub fn check_schema(version: u32, path: &Path) -> Result<()> {
    if version != SCHEMA_VERSION {
        let err = QhamError::Config {
            path: "schema_version".into(),
            message: format!("expected {SCHEMA_VERSION}, found {version}"),
        };
        return Err(err).with_context(|| format!("in {}", path.display()));
    }
    Ok(())
}

/// Noise for a run: the `--noise` flag wins over the config entry, and
/// `none` or absence means noiseless.
pub fn resolve_noise(global: &GlobalArgs, from_config: Option<&str>) -> Result<Option<NoiseSpec>> {
    let name = match global.noise.as_deref().or(from_config) {
        None => return Ok(None),
        Some(n) if n.eq_ignore_ascii_case("none") => return Ok(None),
        Some(n) => n,
    };
    let registry = match &global.devices {
        Some(path) => load_registry(path)?,
        None => device_registry(),
    };
    Ok(Some(NoiseSpec::new(lookup_device(&registry, name)?.clone())?))
}

/// A pattern written as a bitstring (`"0110"`) or as `±1` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatternSpec {
    Bits(String),
    Entries(Vec<i8>),
}

impl PatternSpec {
    pub fn pattern(&self) -> Result<Pattern> {
        Ok(match self {
            PatternSpec::Bits(s) => Pattern::from_bitstring(s)?,
            PatternSpec::Entries(e) => Pattern::new(e.clone())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    /// Explicit update targets, in order.
    Targets(Vec<usize>),
    /// `u` targets drawn uniformly with replacement.
    Random { random: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecallConfig {
    pub schema_version: u32,
    pub attractors: Vec<PatternSpec>,
    /// Entries in `[-1, 1]`.
    pub probe: Vec<f64>,
    pub schedule: ScheduleSpec,
    /// Pattern scored by the density accuracy; the attractor nearest the
    /// majority vote when absent.
    #[serde(default)]
    pub target: Option<PatternSpec>,
    #[serde(default)]
    pub ancilla_mode: AncillaMode,
    #[serde(default)]
    pub neuron: ActivationKind,
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub noise: Option<String>,
    /// Simulate shot by shot even when the run is noiseless.
    #[serde(default)]
    pub trajectories: bool,
}

fn default_attempts() -> u32 {
    DEFAULT_MAX_ATTEMPTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<usize> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Shared by `capacity` (which needs `u`) and `tune-u` (which needs
/// `u_range`). Every `(n, m)` pair is run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityFile {
    pub schema_version: u32,
    pub n: OneOrMany,
    pub m: OneOrMany,
    pub rho: f64,
    #[serde(default)]
    pub u: Option<usize>,
    /// Inclusive `[lo, hi]`.
    #[serde(default)]
    pub u_range: Option<[usize; 2]>,
    pub trials: usize,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub noise: Option<String>,
    #[serde(default)]
    pub ancilla_mode: AncillaMode,
    #[serde(default)]
    pub neuron: ActivationKind,
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
}

impl CapacityFile {
    pub fn u_values(&self) -> Result<Vec<usize>> {
        match self.u_range {
            Some([lo, hi]) if lo <= hi => Ok((lo..=hi).collect()),
            Some([lo, hi]) => bail!(QhamError::Config { path: "u_range".into(), message: format!("{lo} > {hi}") }),
            None => bail!(QhamError::Config { path: "u_range".into(), message: "required by tune-u".into() }),
        }
    }
}
