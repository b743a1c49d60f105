//! Parametric lookup-table generator.
//!
//! Stands in for measured device data: the mean per-pulse increment follows a
//! soft bound, `unit_step·(1 − g)^nonlinearity` when increasing and
//! `−unit_step·e^asymmetry·g^nonlinearity` when decreasing, and each row
//! spreads symmetrically around that mean with a normal profile truncated at
//! ±3σ, σ = `noise_sigma` times the direction's step.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::lut::{Direction, LookupTable};
use super::model::DeviceModel;
use crate::error::{Error, Result};

const TRUNCATION: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthDeviceSpec {
    /// Soft-bound exponent of the mean increment; 0 is a linear device.
    pub nonlinearity: f64,
    /// Per-pulse spread in units of the step.
    pub noise_sigma: f64,
    /// Log-ratio of decrease to increase magnitude.
    #[serde(default)]
    pub asymmetry: f64,
    /// Log-normal jitter applied per device in a multi-device set.
    #[serde(default)]
    pub d2d_spread: f64,
    #[serde(default)]
    pub seed: u64,
    /// Nominal per-pulse increment at `g = 0`.
    pub unit_step: f64,
}

/// An increasing table and its matching decreasing table for one device.
#[derive(Debug, Clone, PartialEq)]
pub struct TablePair {
    pub inc: LookupTable,
    pub dec: LookupTable,
}

impl SynthDeviceSpec {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("nonlinearity", self.nonlinearity),
            ("noise_sigma", self.noise_sigma),
            ("asymmetry", self.asymmetry),
            ("d2d_spread", self.d2d_spread),
            ("unit_step", self.unit_step),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("{name} must be finite, got {v}")));
        }
        for (name, v) in [
            ("nonlinearity", self.nonlinearity),
            ("noise_sigma", self.noise_sigma),
            ("d2d_spread", self.d2d_spread),
        ] {
            if v < 0.0 {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.unit_step <= 0.0 {
            return Err(Error::Config(format!("unit_step must be > 0, got {}", self.unit_step)));
        }
        Ok(())
    }
}

fn check_grid(n_g: usize, n_q: usize) -> Result<()> {
    if n_g < 2 || n_q < 3 {
        return Err(Error::Config(format!(
            "grid needs n_g >= 2 and n_q >= 3, got {n_g}x{n_q}"
        )));
    }
    Ok(())
}

fn uniform_grid(n: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    grid[n - 1] = 1.0;
    grid
}

/// Quantiles of a standard normal truncated to ±3, mirrored so the profile
/// is exactly antisymmetric about the median.
fn truncated_normal_profile(q_grid: &[f64]) -> Vec<f64> {
    let normal = Normal::standard();
    let lo = normal.cdf(-TRUNCATION);
    let hi = normal.cdf(TRUNCATION);
    let n = q_grid.len();
    let mut z = vec![0.0; n];
    for k in 0..n / 2 {
        let v = normal.inverse_cdf(lo + q_grid[k] * (hi - lo));
        z[k] = v;
        z[n - 1 - k] = -v;
    }
    z[0] = -TRUNCATION;
    z[n - 1] = TRUNCATION;
    z
}

fn build_pair(spec: &SynthDeviceSpec, n_g: usize, n_q: usize) -> Result<TablePair> {
    let g_grid = uniform_grid(n_g);
    let q_grid = uniform_grid(n_q);
    let z = truncated_normal_profile(&q_grid);

    let inc_step = spec.unit_step;
    let dec_step = spec.unit_step * spec.asymmetry.exp();
    let mut inc = Vec::with_capacity(n_g * n_q);
    let mut dec = Vec::with_capacity(n_g * n_q);
    for &g in &g_grid {
        let up = inc_step * (1.0 - g).powf(spec.nonlinearity);
        let down = -dec_step * g.powf(spec.nonlinearity);
        inc.extend(z.iter().map(|zk| up + inc_step * spec.noise_sigma * zk));
        dec.extend(z.iter().map(|zk| down + dec_step * spec.noise_sigma * zk));
    }
    Ok(TablePair {
        inc: LookupTable::new(g_grid.clone(), q_grid.clone(), inc, Direction::Increasing)?,
        dec: LookupTable::new(g_grid, q_grid, dec, Direction::Decreasing)?,
    })
}

/// Table pair for a single device described by `spec`.
pub fn synthesize_tables(spec: &SynthDeviceSpec, n_g: usize, n_q: usize) -> Result<TablePair> {
    spec.validate()?;
    check_grid(n_g, n_q)?;
    build_pair(spec, n_g, n_q)
}

/// Standard-mode model built from [`synthesize_tables`].
pub fn synthesize_model(spec: &SynthDeviceSpec, n_g: usize, n_q: usize) -> Result<DeviceModel> {
    let pair = synthesize_tables(spec, n_g, n_q)?;
    DeviceModel::standard(pair.inc, pair.dec, spec.unit_step)
}

/// `devices` table pairs whose parameters are jittered log-normally by
/// `d2d_spread` (asymmetry additively), seeded by `spec.seed`.
pub fn synthesize_device_set(
    spec: &SynthDeviceSpec,
    n_g: usize,
    n_q: usize,
    devices: usize,
) -> Result<Vec<TablePair>> {
    spec.validate()?;
    check_grid(n_g, n_q)?;
    if devices == 0 {
        return Err(Error::Config("device set must not be empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let s = spec.d2d_spread;
    (0..devices)
        .map(|_| {
            let mut z = || -> f64 { StandardNormal.sample(&mut rng) };
            let (z1, z2, z3, z4) = (z(), z(), z(), z());
            let jittered = SynthDeviceSpec {
                nonlinearity: spec.nonlinearity * (s * z1).exp(),
                noise_sigma: spec.noise_sigma * (s * z2).exp(),
                unit_step: spec.unit_step * (s * z3).exp(),
                asymmetry: spec.asymmetry + s * z4,
                ..*spec
            };
            build_pair(&jittered, n_g, n_q)
        })
        .collect()
}

/// Multi-mode model over a synthesized device set. The nominal unit step
/// stays the spec's, so jittered devices differ in realized step size.
pub fn synthesize_multi_model(
    spec: &SynthDeviceSpec,
    n_g: usize,
    n_q: usize,
    devices: usize,
) -> Result<DeviceModel> {
    let pairs = synthesize_device_set(spec, n_g, n_q, devices)?;
    let (inc, dec) = pairs.into_iter().map(|p| (p.inc, p.dec)).unzip();
    DeviceModel::multi(inc, dec, spec.unit_step)
}
