//! Simulator of analog resistive-crossbar neural cores.
//!
//! Weights of a small feed-forward classifier live as differential conductance
//! pairs on crossbar cores. Every weight update is realized through a device
//! model: exactly (`Numeric`), or as a train of stochastic pulses drawn from
//! lookup tables of conductance-dependent increments (`Standard` uses one
//! device, `Multi` a population of devices).
//!
//! ```no_run
//! use crossbar_sim::device::UpdateMode;
//! use crossbar_sim::experiment::{run_experiment, ExperimentConfig};
//!
//! let mut cfg = ExperimentConfig::preset("dwmtj-sot-300k", UpdateMode::Standard);
//! cfg.epochs = 10;
//! let result = run_experiment(&cfg).unwrap();
//! println!("{}", result.accuracy_percent());
//! ```

pub mod crossbar;
pub mod data;
pub mod device;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod nn;
pub mod parallel;
pub mod stats;

pub use crossbar::{BalancedCore, UpdateErrorLog, UpdateRecord};
pub use error::{Error, Result};
pub use matrix::Matrix;
