//! Training runs and device sweeps.
//!
//! A run trains the 30-15-2 classifier on the 40/30/30 split of the data set,
//! one example at a time, and writes plot-ready text files:
//!
//! - `loss.txt`: `epoch train_loss val_loss`, epochs numbered from 1
//! - `updates.txt`: `epoch target realized` for sampled update events
//! - `density.txt`: `bin_center density` of the update error
//! - `summary.txt`: config echo and test accuracy
//! - `model.txt`: final checkpoint

mod density;
mod sweep;

pub use density::{default_bins, density_summary, histogram, Histogram};
pub use sweep::{format_accuracy_table, preset_sweep_configs, run_sweep, SweepRow};

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::crossbar::UpdateErrorLog;
use crate::data::{self, Dataset, SplitIndices};
use crate::device::{load_tables, DeviceModel, DevicePreset, Direction, PulseRounding, UpdateMode};
use crate::error::{Error, Result};
use crate::nn::{argmax, example_cost, format_checkpoint, train_step, Mlp, OptimizerKind, OptimizerState};
use crate::parallel::{self, Execution};

/// Default location of the data set, relative to the workspace root.
pub const DEFAULT_DATA_PATH: &str = "data/wdbc.data";

/// RNG stream ids derived from the run seed.
const STREAM_INIT: u64 = 1;
const STREAM_ORDER: u64 = 2;
const STREAM_DEVICE: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum DeviceSource {
    Preset(String),
    /// A `LUT v1` file.
    LutFile(PathBuf),
}

impl DeviceSource {
    /// Preset name when it matches one, otherwise a file path.
    pub fn parse(s: &str) -> Self {
        if DevicePreset::find(s).is_some() || !Path::new(s).exists() {
            DeviceSource::Preset(s.to_string())
        } else {
            DeviceSource::LutFile(PathBuf::from(s))
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DeviceSource::Preset(key) => match DevicePreset::find(key) {
                Some(p) => format!("{} (synthetic preset)", p.name),
                None => key.clone(),
            },
            DeviceSource::LutFile(path) => format!("{} (lookup-table file)", path.display()),
        }
    }

    fn short_name(&self) -> String {
        match self {
            DeviceSource::Preset(key) => DevicePreset::find(key).map_or(key.clone(), |p| p.name.to_string()),
            DeviceSource::LutFile(path) => path.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub device: DeviceSource,
    pub mode: UpdateMode,
    pub epochs: usize,
    pub optimizer: OptimizerKind,
    /// Learning rate; `None` uses the optimizer's default.
    pub eta: Option<f64>,
    pub seed: u64,
    pub data: PathBuf,
    /// Output directory; `None` keeps results in memory only.
    pub out: Option<PathBuf>,
    /// Record every n-th training step's updates.
    pub record_every: usize,
    /// Nominal pulse size for LUT-file devices; inferred when `None`.
    pub unit_step: Option<f64>,
    pub rounding: PulseRounding,
    pub w_max: f64,
    /// How evaluation passes are run.
    pub exec: Execution,
}

impl ExperimentConfig {
    pub fn new(device: DeviceSource, mode: UpdateMode) -> Self {
        ExperimentConfig {
            device,
            mode,
            epochs: 80,
            optimizer: OptimizerKind::Sgd,
            eta: None,
            seed: 1,
            data: PathBuf::from(DEFAULT_DATA_PATH),
            out: None,
            record_every: 100,
            unit_step: None,
            rounding: PulseRounding::default(),
            w_max: 2.0,
            exec: Execution::default(),
        }
    }

    pub fn preset(key: &str, mode: UpdateMode) -> Self {
        Self::new(DeviceSource::Preset(key.to_string()), mode)
    }

    pub fn label(&self) -> String {
        format!("{} {}", self.device.short_name(), self.mode)
    }

    pub fn eta(&self) -> f64 {
        self.eta.unwrap_or_else(|| self.optimizer.default_eta())
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be >= 1".into()));
        }
        if !(self.w_max.is_finite() && self.w_max > 0.0) {
            return Err(Error::Config(format!("w_max must be positive, got {}", self.w_max)));
        }
        if let DeviceSource::Preset(key) = &self.device {
            DevicePreset::lookup(key)?;
        }
        if let Some(step) = self.unit_step {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::Config(format!("unit step must be positive, got {step}")));
            }
        }
        let eta = self.eta();
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::Config(format!("learning rate must be >= 0, got {eta}")));
        }
        Ok(())
    }

    /// Builds the device model for this run.
    pub fn device_model(&self) -> Result<DeviceModel> {
        let model = match &self.device {
            DeviceSource::Preset(key) => DevicePreset::lookup(key)?.model(self.mode),
            DeviceSource::LutFile(path) => {
                if self.mode == UpdateMode::Numeric {
                    return Ok(DeviceModel::numeric());
                }
                let tables = load_tables(path)?;
                let step = match self.unit_step {
                    Some(s) => s,
                    None => infer_unit_step(&tables, path)?,
                };
                DeviceModel::from_tables(self.mode, tables, step)
            }
        }?;
        Ok(model.with_rounding(self.rounding))
    }
}

/// Nominal step of a table set: the average expected increment at `g = 0`
/// over the increasing tables.
fn infer_unit_step(tables: &[crate::device::LookupTable], path: &Path) -> Result<f64> {
    let inc: Vec<f64> = tables
        .iter()
        .filter(|t| t.direction() == Direction::Increasing)
        .map(|t| t.expected_increment(0.0))
        .collect();
    let step = crate::stats::mean(&inc);
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Config(format!(
            "{}: cannot infer a positive unit step; pass one explicitly",
            path.display()
        )));
    }
    Ok(step)
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub label: String,
    /// Average training cost per epoch, taken while the epoch trains.
    pub train_loss: Vec<f64>,
    /// Average validation cost after each epoch.
    pub val_loss: Vec<f64>,
    pub test_correct: usize,
    pub test_total: usize,
    pub updates: UpdateErrorLog,
    pub density: Option<Histogram>,
    pub files: Vec<PathBuf>,
}

impl ExperimentResult {
    pub fn test_accuracy(&self) -> f64 {
        self.test_correct as f64 / self.test_total as f64
    }

    /// Accuracy in percent at one decimal.
    pub fn accuracy_percent(&self) -> String {
        format!("{:.1}%", 100.0 * self.test_accuracy())
    }
}

/// Average cost and correct-prediction count over a subset of rows.
/// Prediction is the softmax argmax with ties to the first class.
pub fn evaluate(net: &Mlp, ds: &Dataset, rows: &[usize], exec: Execution) -> Result<(f64, usize)> {
    let per_row = parallel::map(rows, exec, |&i| -> Result<(f64, bool)> {
        let y = ds.labels[i].one_hot();
        let out = net.predict(&ds.features[i])?;
        Ok((example_cost(&out, &y), argmax(&out) == ds.labels[i].index()))
    });
    let mut loss = 0.0;
    let mut correct = 0;
    for r in per_row {
        let (c, ok) = r?;
        loss += c;
        correct += ok as usize;
    }
    Ok((loss / rows.len().max(1) as f64, correct))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let ds = data::load_wdbc(&cfg.data)?;
    run_experiment_on(cfg, &ds)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs one experiment on an already loaded (raw) data set.
pub fn run_experiment_on(cfg: &ExperimentConfig, raw: &Dataset) -> Result<ExperimentResult> {
    cfg.validate()?;
    let device = cfg.device_model()?;
    let split: SplitIndices = data::split(raw.len(), cfg.seed)?;
    let (ds, _) = data::normalize(raw, &split.train)?;

    let mut net = Mlp::new(&Mlp::classifier_specs(), cfg.w_max, &device, &mut stream(cfg.seed, STREAM_INIT))?;
    net.enable_recording();
    let mut opt = OptimizerState::new(cfg.optimizer, cfg.eta())?;
    let mut order_rng = stream(cfg.seed, STREAM_ORDER);
    let mut device_rng = stream(cfg.seed, STREAM_DEVICE);

    let mut train_loss = Vec::with_capacity(cfg.epochs);
    let mut val_loss = Vec::with_capacity(cfg.epochs);
    let mut order = split.train.clone();
    let mut step = 0usize;
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut order_rng);
        let mut total = 0.0;
        for &i in &order {
            net.set_recording(step.is_multiple_of(cfg.record_every));
            let y = ds.labels[i].one_hot();
            total += train_step(&mut net, &mut opt, &ds.features[i], &y, epoch, &mut device_rng)?;
            step += 1;
        }
        train_loss.push(total / order.len() as f64);
        val_loss.push(evaluate(&net, &ds, &split.val, cfg.exec)?.0);
    }
    let (_, test_correct) = evaluate(&net, &ds, &split.test, cfg.exec)?;

    let updates = net.take_logs();
    let density = if updates.is_empty() {
        None
    } else {
        Some(density_summary(&updates)?)
    };
    let mut result = ExperimentResult {
        label: cfg.label(),
        train_loss,
        val_loss,
        test_correct,
        test_total: split.test.len(),
        updates,
        density,
        files: Vec::new(),
    };
    if let Some(dir) = &cfg.out {
        result.files = write_outputs(cfg, &result, &net, dir)?;
    }
    Ok(result)
}

pub fn format_loss(result: &ExperimentResult) -> String {
    let mut out = String::new();
    for (k, (t, v)) in result.train_loss.iter().zip(&result.val_loss).enumerate() {
        writeln!(out, "{} {t:.16e} {v:.16e}", k + 1).unwrap();
    }
    out
}

pub fn format_summary(cfg: &ExperimentConfig, result: &ExperimentResult) -> String {
    let mut out = String::new();
    writeln!(out, "device: {}", cfg.device.describe()).unwrap();
    writeln!(out, "mode: {}", cfg.mode).unwrap();
    if cfg.mode != UpdateMode::Numeric {
        writeln!(out, "pulse_rounding: {}", cfg.rounding).unwrap();
    }
    writeln!(out, "optimizer: {}", cfg.optimizer.as_str()).unwrap();
    writeln!(out, "eta: {}", cfg.eta()).unwrap();
    writeln!(out, "epochs: {}", cfg.epochs).unwrap();
    writeln!(out, "seed: {}", cfg.seed).unwrap();
    writeln!(out, "w_max: {}", cfg.w_max).unwrap();
    writeln!(out, "record_every: {}", cfg.record_every).unwrap();
    writeln!(out, "update_records: {}", result.updates.len()).unwrap();
    writeln!(out, "final_train_loss: {:.6e}", result.train_loss.last().copied().unwrap_or(f64::NAN)).unwrap();
    writeln!(out, "final_val_loss: {:.6e}", result.val_loss.last().copied().unwrap_or(f64::NAN)).unwrap();
    writeln!(out, "test_correct: {}/{}", result.test_correct, result.test_total).unwrap();
    writeln!(out, "test_accuracy: {}", result.accuracy_percent()).unwrap();
    out
}

fn write_outputs(
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
    net: &Mlp,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let density = result.density.as_ref().map(Histogram::to_text).unwrap_or_default();
    let files = [
        ("loss.txt", format_loss(result)),
        ("updates.txt", result.updates.to_text()),
        ("density.txt", density),
        ("summary.txt", format_summary(cfg, result)),
        ("model.txt", format_checkpoint(net)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
