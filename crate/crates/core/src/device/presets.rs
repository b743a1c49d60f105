//! Built-in synthetic device presets.
//!
//! These are parametric stand-ins for eight measured device configurations.
//! The measurement data is not available, so every preset is synthetic and
//! labeled as such in experiment outputs. Within each DWMTJ mechanism the
//! per-pulse noise grows with temperature.

use super::model::{DeviceModel, UpdateMode};
use super::synth::{synthesize_model, synthesize_multi_model, SynthDeviceSpec};
use crate::error::{Error, Result};

/// Conductance levels per synthesized table.
pub const PRESET_G_POINTS: usize = 21;
/// Quantile levels per synthesized table.
pub const PRESET_Q_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevicePreset {
    pub name: &'static str,
    pub slug: &'static str,
    pub spec: SynthDeviceSpec,
    /// Devices in the multi-mode set.
    pub multi_devices: usize,
}

const fn preset(
    name: &'static str,
    slug: &'static str,
    nonlinearity: f64,
    noise_sigma: f64,
    asymmetry: f64,
    d2d_spread: f64,
    unit_step: f64,
    multi_devices: usize,
    seed: u64,
) -> DevicePreset {
    DevicePreset {
        name,
        slug,
        spec: SynthDeviceSpec {
            nonlinearity,
            noise_sigma,
            asymmetry,
            d2d_spread,
            seed,
            unit_step,
        },
        multi_devices,
    }
}

/// Presets in reporting order.
pub const PRESETS: [DevicePreset; 8] = [
    preset("DWMTJ SOT 0K", "dwmtj-sot-0k", 0.3, 0.05, 0.0, 0.05, 0.0005, 5, 101),
    preset("DWMTJ SOT 300K", "dwmtj-sot-300k", 0.3, 0.4, 0.0, 0.10, 0.0005, 5, 102),
    preset("DWMTJ SOT 400K", "dwmtj-sot-400k", 0.3, 0.7, 0.0, 0.15, 0.0005, 5, 103),
    preset("DWMTJ STT 0K", "dwmtj-stt-0k", 0.5, 0.08, 0.1, 0.05, 0.0005, 5, 201),
    preset("DWMTJ STT 300K", "dwmtj-stt-300k", 0.5, 0.5, 0.1, 0.10, 0.0005, 5, 202),
    preset("DWMTJ STT 400K", "dwmtj-stt-400k", 0.5, 0.9, 0.1, 0.15, 0.0005, 5, 203),
    preset("TaOx", "taox", 1.5, 0.6, 0.3, 0.20, 0.0005, 5, 301),
    preset("ENODe", "enode", 0.2, 1.0, -0.2, 0.30, 0.00075, 9, 401),
];

impl DevicePreset {
    /// Looks a preset up by slug or display name, ignoring case.
    pub fn find(key: &str) -> Option<&'static DevicePreset> {
        PRESETS
            .iter()
            .find(|p| p.slug.eq_ignore_ascii_case(key) || p.name.eq_ignore_ascii_case(key))
    }

    pub fn lookup(key: &str) -> Result<&'static DevicePreset> {
        Self::find(key).ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|p| p.slug).collect();
            Error::Config(format!("unknown device preset '{key}' (known: {})", known.join(", ")))
        })
    }

    pub fn model(&self, mode: UpdateMode) -> Result<DeviceModel> {
        match mode {
            UpdateMode::Numeric => Ok(DeviceModel::numeric()),
            UpdateMode::Standard => synthesize_model(&self.spec, PRESET_G_POINTS, PRESET_Q_POINTS),
            UpdateMode::Multi => synthesize_multi_model(
                &self.spec,
                PRESET_G_POINTS,
                PRESET_Q_POINTS,
                self.multi_devices,
            ),
        }
    }
}
