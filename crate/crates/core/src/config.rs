//! JSON run configuration.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "chain": { "plate": { ... }, "backing": { ... }, ... },
//!   "sweep": {
//!     "diameters_m": [0.0015, 0.003],
//!     "cable_lengths_m": [1.5],
//!     "receiver_impedances_ohm": [[404.0, -324.0], [51.0, -0.07]],
//!     "frequency_hz": 5e6,
//!     "reference": [0, 0, 1]
//!   }
//! }
//! ```
//!
//! Complex values are `[re, im]` pairs. Unknown fields anywhere in the
//! document are rejected, and all of them are listed in the error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ReadoutChain;
use crate::sweep::SweepAxes;
use crate::C64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub schema_version: u32,
    pub chain: ReadoutChain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// Sweep axes as written in a config. Exactly one of `diameters_m` and
/// `areas_m2` may be given; omitted axes fall back to the chain's own value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameters_m: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub areas_m2: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cable_lengths_m: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver_impedances_ohm: Option<Vec<C64>>,
    #[serde(default = "default_frequency")]
    pub frequency_hz: f64,
    /// Cell that normalised results are divided by.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<[usize; 3]>,
}

fn default_frequency() -> f64 {
    5e6
}

impl SweepSpec {
    pub fn axes(&self, chain: &ReadoutChain) -> Result<SweepAxes> {
        let areas = match (&self.diameters_m, &self.areas_m2) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "sweep: give either diameters_m or areas_m2, not both".into(),
                ))
            }
            (Some(d), None) => d
                .iter()
                .map(|d| std::f64::consts::PI * (d / 2.0) * (d / 2.0))
                .collect(),
            (None, Some(a)) => a.clone(),
            (None, None) => vec![chain.plate.area],
        };
        let axes = SweepAxes {
            areas,
            cable_lengths: self
                .cable_lengths_m
                .clone()
                .unwrap_or_else(|| vec![chain.cable.length]),
            receiver_impedances: self
                .receiver_impedances_ohm
                .clone()
                .unwrap_or_else(|| vec![chain.receiver_impedance(self.frequency_hz)]),
        };
        axes.validate()?;
        Ok(axes)
    }
}

impl Config {
    pub fn new(chain: ReadoutChain) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            chain,
            sweep: None,
        }
    }

    /// Parses and validates a config document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut unknown = Vec::new();
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Config = serde_ignored::deserialize(de, |path| unknown.push(path.to_string()))
            .map_err(|e| Error::Config(e.to_string()))?;
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown fields: {}", unknown.join(", "))));
        }
        if config.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        config.chain.validate()?;
        if let Some(s) = &config.sweep {
            s.axes(&config.chain)?;
        }
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialises");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = Config::new(ReadoutChain::reference());
        let back = Config::from_json_str(&c.to_json_string()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_fields_are_all_listed() {
        let mut v: serde_json::Value = serde_json::from_str(&Config::new(ReadoutChain::reference()).to_json_string()).unwrap();
        v["chain"]["plate"]["colour"] = "blue".into();
        v["extra"] = 1.into();
        let err = Config::from_json_str(&v.to_string()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("chain.plate.colour") && msg.contains("extra"), "{msg}");
    }

    #[test]
    fn missing_schema_version_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&Config::new(ReadoutChain::reference()).to_json_string()).unwrap();
        v.as_object_mut().unwrap().remove("schema_version");
        assert!(matches!(Config::from_json_str(&v.to_string()), Err(Error::Config(_))));
        v["schema_version"] = 2.into();
        assert!(matches!(Config::from_json_str(&v.to_string()), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_axes_default_to_chain() {
        let chain = ReadoutChain::reference();
        let spec = SweepSpec {
            diameters_m: None,
            areas_m2: None,
            cable_lengths_m: None,
            receiver_impedances_ohm: None,
            frequency_hz: 5e6,
            reference: None,
        };
        let axes = spec.axes(&chain).unwrap();
        assert_eq!(axes.shape(), [1, 1, 1]);
        assert_eq!(axes.cable_lengths[0], chain.cable.length);
    }
}
