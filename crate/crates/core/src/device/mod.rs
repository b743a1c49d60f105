//! Device models: how a requested conductance change becomes a realized one.

mod lut;
mod model;
mod presets;
mod synth;

pub use lut::{format_tables, load_tables, parse_tables, save_tables, Direction, LookupTable};
pub use model::{DeviceModel, PulseRounding, UpdateMode};
pub use presets::{DevicePreset, PRESETS, PRESET_G_POINTS, PRESET_Q_POINTS};
pub use synth::{
    synthesize_device_set, synthesize_model, synthesize_multi_model, synthesize_tables,
    SynthDeviceSpec, TablePair,
};

use rand::Rng;

/// Variance of `realized − target` over `samples` independent updates of a
/// cell starting at `g`. Used to compare device noise levels.
pub fn update_error_variance<R: Rng + ?Sized>(
    model: &DeviceModel,
    g: f64,
    target: f64,
    samples: usize,
    rng: &mut R,
) -> crate::Result<f64> {
    let mut errors = Vec::with_capacity(samples);
    for cell in 0..samples {
        errors.push(model.sample_update(cell, g, target, rng)? - target);
    }
    Ok(crate::stats::variance(&errors))
}
