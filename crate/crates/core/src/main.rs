use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crossbar_sim::data;
use crossbar_sim::device::{save_tables, synthesize_device_set, PulseRounding, SynthDeviceSpec, UpdateMode};
use crossbar_sim::experiment::{
    format_accuracy_table, preset_sweep_configs, run_experiment, run_sweep, DeviceSource, ExperimentConfig,
    DEFAULT_DATA_PATH,
};
use crossbar_sim::nn::OptimizerKind;
use crossbar_sim::parallel::Execution;
use crossbar_sim::{Error, Result};

#[derive(Parser)]
#[command(name = "crossbar-sim", version, about = "Train a classifier on simulated resistive crossbars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and test one configuration.
    Train {
        /// Preset name or slug, or a LUT file.
        #[arg(long)]
        device: String,
        #[arg(long, default_value = "numeric")]
        mode: UpdateMode,
        #[arg(long, default_value_t = 80)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "sgd")]
        optimizer: OptimizerKind,
        /// Learning rate; defaults to 0.1 for sgd, 0.01 for adam.
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = DEFAULT_DATA_PATH)]
        data: PathBuf,
        /// Record update errors every n-th training step.
        #[arg(long, default_value_t = 100)]
        record_every: usize,
        /// Nominal pulse size for LUT files.
        #[arg(long)]
        unit_step: Option<f64>,
        /// Pulse-count rounding: stochastic or nearest (at least one pulse).
        #[arg(long, default_value = "stochastic")]
        rounding: PulseRounding,
        /// Evaluate on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Run every preset in every mode and write the accuracy table.
    Sweep {
        /// Sweep all shipped presets (the only sweep available).
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 80)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = DEFAULT_DATA_PATH)]
        data: PathBuf,
        #[arg(long, default_value = "stochastic")]
        rounding: PulseRounding,
        /// Run the configurations one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Write class counts and the feature correlation matrix.
    Eda {
        #[arg(long, default_value = DEFAULT_DATA_PATH)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate lookup tables from a TOML device spec.
    SynthLut {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Deserialize)]
struct SynthFile {
    #[serde(flatten)]
    device: SynthDeviceSpec,
    #[serde(default = "default_g_points")]
    n_g: usize,
    #[serde(default = "default_q_points")]
    n_q: usize,
    #[serde(default = "default_devices")]
    devices: usize,
}

fn default_g_points() -> usize {
    crossbar_sim::device::PRESET_G_POINTS
}

fn default_q_points() -> usize {
    crossbar_sim::device::PRESET_Q_POINTS
}

fn default_devices() -> usize {
    1
}

fn exec_for(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            device,
            mode,
            epochs,
            seed,
            optimizer,
            eta,
            out,
            data,
            record_every,
            unit_step,
            rounding,
            sequential,
        } => {
            let mut cfg = ExperimentConfig::new(DeviceSource::parse(&device), mode);
            cfg.epochs = epochs;
            cfg.seed = seed;
            cfg.optimizer = optimizer;
            cfg.eta = eta;
            cfg.data = data;
            cfg.out = Some(out.clone());
            cfg.record_every = record_every;
            cfg.unit_step = unit_step;
            cfg.rounding = rounding;
            cfg.exec = exec_for(sequential);
            let result = run_experiment(&cfg)?;
            println!(
                "{}: test accuracy {} ({}/{}), outputs in {}",
                result.label,
                result.accuracy_percent(),
                result.test_correct,
                result.test_total,
                out.display()
            );
        }
        Command::Sweep {
            all,
            out,
            epochs,
            seed,
            data,
            rounding,
            sequential,
        } => {
            if !all {
                return Err(Error::Config("sweep needs --all".into()));
            }
            let mut base = ExperimentConfig::preset("taox", UpdateMode::Numeric);
            base.epochs = epochs;
            base.seed = seed;
            base.data = data;
            base.rounding = rounding;
            base.validate()?;
            let cfgs = preset_sweep_configs(&base, Some(&out));
            let rows = run_sweep(&cfgs, exec_for(sequential));
            let table = format_accuracy_table(&rows);
            write_file(&out.join("accuracy.txt"), &table)?;
            print!("{table}");
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            if failed > 0 {
                return Err(Error::Config(format!("{failed} of {} runs failed", rows.len())));
            }
        }
        Command::Eda { data: path, out } => {
            let ds = data::load_wdbc(&path)?;
            data::eda_export(&ds, &out)?;
            println!(
                "{} records ({} malignant, {} benign), outputs in {}",
                ds.len(),
                ds.count(data::Label::Malignant),
                ds.count(data::Label::Benign),
                out.display()
            );
        }
        Command::SynthLut { spec, out } => {
            let text = fs::read_to_string(&spec).map_err(|e| Error::io(&spec, e))?;
            let file: SynthFile =
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", spec.display())))?;
            let pairs = synthesize_device_set(&file.device, file.n_g, file.n_q, file.devices)?;
            let tables: Vec<_> = pairs.into_iter().flat_map(|p| [p.inc, p.dec]).collect();
            save_tables(&tables, &out)?;
            println!("wrote {} tables to {}", tables.len(), out.display());
        }
    }
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
