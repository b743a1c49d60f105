use std::fmt::Write as _;
use std::path::Path;

use super::{run_experiment_on, ExperimentConfig, ExperimentResult};
use crate::data::{self, Dataset};
use crate::device::{UpdateMode, PRESETS};
use crate::error::Result;
use crate::parallel::{self, Execution};

/// One row of a sweep: a config and its outcome.
#[derive(Debug)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub outcome: std::result::Result<ExperimentResult, String>,
}

impl SweepRow {
    pub fn accuracy(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(ExperimentResult::test_accuracy)
    }
}

/// All presets × all modes, preset-major in table order. Each run writes to
/// `out_root/<preset-slug>-<mode>` when `out_root` is given.
pub fn preset_sweep_configs(base: &ExperimentConfig, out_root: Option<&Path>) -> Vec<ExperimentConfig> {
    let mut cfgs = Vec::with_capacity(PRESETS.len() * UpdateMode::ALL.len());
    for preset in &PRESETS {
        for mode in UpdateMode::ALL {
            let mut cfg = base.clone();
            cfg.device = super::DeviceSource::Preset(preset.slug.to_string());
            cfg.mode = mode;
            cfg.out = out_root.map(|root| root.join(format!("{}-{}", preset.slug, mode.as_str())));
            cfgs.push(cfg);
        }
    }
    cfgs
}

/// Runs every config; failures are kept as error rows. With
/// [`Execution::Parallel`] configs run concurrently and each run evaluates
/// sequentially. Row order matches `cfgs`.
pub fn run_sweep(cfgs: &[ExperimentConfig], exec: Execution) -> Vec<SweepRow> {
    let mut cache: Vec<(std::path::PathBuf, std::result::Result<Dataset, String>)> = Vec::new();
    for cfg in cfgs {
        if !cache.iter().any(|(p, _)| *p == cfg.data) {
            cache.push((cfg.data.clone(), data::load_wdbc(&cfg.data).map_err(|e| e.to_string())));
        }
    }
    let outcomes = parallel::map(cfgs, exec, |cfg| {
        let mut cfg = cfg.clone();
        if exec == Execution::Parallel {
            cfg.exec = Execution::Sequential;
        }
        let ds = &cache.iter().find(|(p, _)| *p == cfg.data).expect("dataset cached").1;
        match ds {
            Ok(ds) => run_one(&cfg, ds).map_err(|e| e.to_string()),
            Err(msg) => Err(msg.clone()),
        }
    });
    cfgs.iter()
        .cloned()
        .zip(outcomes)
        .map(|(config, outcome)| SweepRow { config, outcome })
        .collect()
}

fn run_one(cfg: &ExperimentConfig, ds: &Dataset) -> Result<ExperimentResult> {
    cfg.validate()?;
    run_experiment_on(cfg, ds)
}

/// Device rows × mode columns. Cells are test accuracy at one decimal, `n/a`
/// for configs not in the sweep and `error` for failed runs, which are listed
/// below the table.
pub fn format_accuracy_table(rows: &[SweepRow]) -> String {
    let mut devices: Vec<String> = Vec::new();
    for row in rows {
        let name = row.config.device.describe();
        if !devices.contains(&name) {
            devices.push(name);
        }
    }
    let width = devices.iter().map(String::len).max().unwrap_or(0).max("device".len());
    let mut out = String::new();
    write!(out, "{:<width$}", "device").unwrap();
    for mode in UpdateMode::ALL {
        write!(out, "  {:>8}", mode.as_str()).unwrap();
    }
    out.push('\n');
    for device in &devices {
        write!(out, "{device:<width$}").unwrap();
        for mode in UpdateMode::ALL {
            let cell = rows
                .iter()
                .find(|r| r.config.device.describe() == *device && r.config.mode == mode)
                .map_or_else(
                    || "n/a".to_string(),
                    |r| match &r.outcome {
                        Ok(res) => res.accuracy_percent(),
                        Err(_) => "error".to_string(),
                    },
                );
            write!(out, "  {cell:>8}").unwrap();
        }
        out.push('\n');
    }
    for row in rows {
        if let Err(msg) = &row.outcome {
            writeln!(out, "error: {}: {msg}", row.config.label()).unwrap();
        }
    }
    out
}
