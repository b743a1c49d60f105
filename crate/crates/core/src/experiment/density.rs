use std::fmt::Write as _;

use crate::crossbar::UpdateErrorLog;
use crate::error::{Error, Result};

/// Fixed-width histogram normalized as a probability density.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub centers: Vec<f64>,
    pub width: f64,
    pub densities: Vec<f64>,
}

impl Histogram {
    /// `Σ density · width`; 1 up to rounding.
    pub fn integral(&self) -> f64 {
        self.densities.iter().map(|d| d * self.width).sum()
    }

    /// Mean of the binned distribution.
    pub fn mean(&self) -> f64 {
        self.centers
            .iter()
            .zip(&self.densities)
            .map(|(c, d)| c * d * self.width)
            .sum()
    }

    /// `bin_center density` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (c, d) in self.centers.iter().zip(&self.densities) {
            writeln!(out, "{c:.16e} {d:.16e}").unwrap();
        }
        out
    }
}

/// Square-root rule, kept within [10, 200] bins.
pub fn default_bins(samples: usize) -> usize {
    ((samples as f64).sqrt().ceil() as usize).clamp(10, 200)
}

/// Histogram of `values` over their observed range. When every value is the
/// same, the result is a single unit-width bin centered on that value.
pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::Domain("histogram of an empty sample".into()));
    }
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain("histogram of non-finite values".into()));
    }
    if lo == hi {
        return Ok(Histogram {
            centers: vec![lo],
            width: 1.0,
            densities: vec![1.0],
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = values.len() as f64;
    Ok(Histogram {
        centers: (0..bins).map(|k| lo + (k as f64 + 0.5) * width).collect(),
        width,
        densities: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
    })
}

/// Probability density of `realized − target` over an update log.
pub fn density_summary(log: &UpdateErrorLog) -> Result<Histogram> {
    if log.is_empty() {
        return Err(Error::Domain("update log is empty".into()));
    }
    histogram(&log.errors(), default_bins(log.len()))
}
