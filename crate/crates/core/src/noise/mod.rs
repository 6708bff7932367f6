//! Device noise approximated by stochastic trajectories.
//!
//! Each unitary gate is followed by sampled error events: a depolarizing
//! Pauli kick at the device's average gate error rate and thermal relaxation
//! (amplitude damping plus pure dephasing) from T1/T2 over the gate's
//! duration. Measured bits are flipped at the average readout error rate.

mod channels;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QhamError, Result};

pub(crate) use channels::apply_event;
pub use channels::{apply_readout_error, channels_for_gate, thermal_probabilities, ErrorEvent, ErrorKind};

const DEVICES_JSON: &str = include_str!("../../data/devices.json");

/// Average calibration figures for one device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceNoiseParams {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
    #[serde(default)]
    pub num_qubits: Option<usize>,
    #[serde(default)]
    pub processor: Option<String>,
    pub t1_us: f64,
    pub t2_us: f64,
    pub readout_err: f64,
    pub sx_err: f64,
    /// Absent for single-qubit devices.
    pub cnot_err: Option<f64>,
    #[serde(default)]
    pub quantum_volume: Option<u32>,
}

impl DeviceNoiseParams {
    /// A device with zero error rates and infinite coherence times.
    pub fn ideal() -> Self {
        DeviceNoiseParams {
            name: "ideal".into(),
            aliases: vec![],
            num_qubits: None,
            processor: None,
            t1_us: f64::INFINITY,
            t2_us: f64::INFINITY,
            readout_err: 0.0,
            sx_err: 0.0,
            cnot_err: Some(0.0),
            quantum_volume: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QhamError::Contract(format!("device {}: {msg}", self.name)));
        let probs =
            [("readout_err", Some(self.readout_err)), ("sx_err", Some(self.sx_err)), ("cnot_err", self.cnot_err)];
        for (field, p) in probs {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("{field} = {p} is not a probability"));
                }
            }
        }
        if self.t1_us.is_nan() || self.t1_us <= 0.0 || self.t2_us.is_nan() || self.t2_us <= 0.0 {
            return bad(format!("T1 = {} and T2 = {} must be positive", self.t1_us, self.t2_us));
        }
        if self.t1_us.is_finite() && self.t2_us > 2.0 * self.t1_us {
            return bad(format!("T2 = {} exceeds 2·T1 = {}", self.t2_us, 2.0 * self.t1_us));
        }
        Ok(())
    }

    fn answers_to(&self, name: &str) -> bool {
        self.name == name || self.aliases.iter().any(|a| a == name)
    }
}

/// The built-in device table.
pub fn device_registry() -> Vec<DeviceNoiseParams> {
    serde_json::from_str(DEVICES_JSON).expect("bundled device table is valid JSON")
}

/// Parses a registry from JSON text (an array of device records).
pub fn parse_registry(json: &str) -> Result<Vec<DeviceNoiseParams>> {
    let mut de = serde_json::Deserializer::from_str(json);
    let devices: Vec<DeviceNoiseParams> = serde::Deserialize::deserialize(&mut de)
        .map_err(|e| QhamError::Config { path: "devices".into(), message: e.to_string() })?;
    for d in &devices {
        d.validate()?;
    }
    Ok(devices)
}

pub fn load_registry(path: &Path) -> Result<Vec<DeviceNoiseParams>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| QhamError::Config { path: path.display().to_string(), message: e.to_string() })?;
    parse_registry(&text)
}

pub fn lookup_device<'a>(registry: &'a [DeviceNoiseParams], name: &str) -> Result<&'a DeviceNoiseParams> {
    registry.iter().find(|d| d.answers_to(name)).ok_or_else(|| QhamError::NotFound(format!("device `{name}`")))
}

/// Gate and readout durations in nanoseconds. The device table carries no
/// durations; the defaults are typical superconducting-qubit figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDurations {
    pub single_qubit_ns: f64,
    pub cnot_ns: f64,
    pub readout_ns: f64,
}

impl Default for GateDurations {
    fn default() -> Self {
        GateDurations { single_qubit_ns: 71.0, cnot_ns: 300.0, readout_ns: 1000.0 }
    }
}

impl GateDurations {
    pub fn validate(&self) -> Result<()> {
        if self.single_qubit_ns > 0.0 && self.cnot_ns > 0.0 && self.readout_ns > 0.0 {
            Ok(())
        } else {
            Err(QhamError::Contract(format!("durations must be positive: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelFlags {
    pub depolarizing: bool,
    pub thermal: bool,
    pub readout: bool,
}

impl Default for ChannelFlags {
    fn default() -> Self {
        ChannelFlags { depolarizing: true, thermal: true, readout: true }
    }
}

impl ChannelFlags {
    pub fn none() -> Self {
        ChannelFlags { depolarizing: false, thermal: false, readout: false }
    }
}

/// How noise attaches to a gate that is not in the hardware basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalGateCost {
    /// One native operation of the gate's arity.
    #[default]
    Native,
    /// As many native operations as the gate's basis decomposition holds.
    BasisEquivalent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub device: DeviceNoiseParams,
    #[serde(default)]
    pub durations: GateDurations,
    #[serde(default)]
    pub channels: ChannelFlags,
    #[serde(default)]
    pub logical_cost: LogicalGateCost,
}

impl NoiseSpec {
    pub fn new(device: DeviceNoiseParams) -> Result<Self> {
        let spec = NoiseSpec {
            device,
            durations: GateDurations::default(),
            channels: ChannelFlags::default(),
            logical_cost: LogicalGateCost::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Spec for a device in the built-in registry.
    pub fn for_device(name: &str) -> Result<Self> {
        let registry = device_registry();
        Self::new(lookup_device(&registry, name)?.clone())
    }

    pub fn with_logical_cost(mut self, cost: LogicalGateCost) -> Self {
        self.logical_cost = cost;
        self
    }

    pub fn with_channels(mut self, channels: ChannelFlags) -> Self {
        self.channels = channels;
        self
    }

    pub fn with_durations(mut self, durations: GateDurations) -> Result<Self> {
        durations.validate()?;
        self.durations = durations;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        self.durations.validate()
    }

    /// Readout flip probability, or 0 when the channel is disabled.
    pub fn readout_probability(&self) -> f64 {
        if self.channels.readout {
            self.device.readout_err
        } else {
            0.0
        }
    }
}
