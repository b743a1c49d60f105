#![allow(dead_code)]

use std::path::PathBuf;

use crossbar_sim::device::{DeviceModel, LookupTable};
use crossbar_sim::nn::{example_cost, Activation, LayerSpec, Mlp};
use crossbar_sim::Matrix;
use rand::Rng;

pub fn data_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wdbc.data")
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn dense_matvec(w: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    w.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn dense_matvec_t(w: &[Vec<f64>], d: &[f64]) -> Vec<f64> {
    let cols = w.first().map_or(0, Vec::len);
    (0..cols).map(|j| w.iter().zip(d).map(|(row, di)| row[j] * di).sum()).collect()
}

/// Row of quantile values at conductance `g`, interpolated linearly between
/// the bracketing grid rows.
pub fn interpolated_row(t: &LookupTable, g: f64) -> Vec<f64> {
    let grid = t.g_grid();
    let nq = t.q_grid().len();
    let mut i = 0;
    while i + 2 < grid.len() && g > grid[i + 1] {
        i += 1;
    }
    let frac = ((g - grid[i]) / (grid[i + 1] - grid[i])).clamp(0.0, 1.0);
    let lo = &t.delta_g()[i * nq..(i + 1) * nq];
    let hi = &t.delta_g()[(i + 1) * nq..(i + 2) * nq];
    lo.iter().zip(hi).map(|(a, b)| a + frac * (b - a)).collect()
}

/// CDF of a piecewise-linear inverse CDF given by `values` at quantiles `q`.
pub fn row_cdf(values: &[f64], q: &[f64], x: f64) -> f64 {
    if x < values[0] {
        return 0.0;
    }
    if x >= values[values.len() - 1] {
        return 1.0;
    }
    let mut j = 0;
    while j + 1 < values.len() && values[j + 1] <= x {
        j += 1;
    }
    let span = values[j + 1] - values[j];
    if span <= 0.0 {
        return q[j + 1];
    }
    q[j] + (x - values[j]) / span * (q[j + 1] - q[j])
}

/// Mean of the same distribution: the area under the inverse CDF.
pub fn row_mean(values: &[f64], q: &[f64]) -> f64 {
    (1..q.len()).map(|j| 0.5 * (values[j] + values[j - 1]) * (q[j] - q[j - 1])).sum()
}

/// Two-sided Kolmogorov–Smirnov distance between a sample and a CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((k as f64 + 1.0) / n - f).max(f - k as f64 / n);
    }
    d
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: f64) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-bound..bound)).collect()).collect()
}

/// Small architectures: five units or fewer, counting inputs.
pub const TOY_SHAPES: [[usize; 3]; 3] = [[1, 1, 2], [2, 1, 2], [1, 2, 2]];

pub fn toy_specs(shape: [usize; 3]) -> Vec<LayerSpec> {
    vec![
        LayerSpec::new(shape[0], shape[1], Activation::Sigmoid),
        LayerSpec::new(shape[1], shape[2], Activation::Softmax),
    ]
}

pub struct ToyProblem {
    pub specs: Vec<LayerSpec>,
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ToyProblem {
    pub fn random<R: Rng>(rng: &mut R, shape: [usize; 3]) -> Self {
        let specs = toy_specs(shape);
        let weights = specs
            .iter()
            .map(|s| Matrix::from_fn(s.fan_out, s.fan_in, |_, _| rng.random_range(-1.5..1.5)))
            .collect();
        let biases = specs
            .iter()
            .map(|s| (0..s.fan_out).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let x = (0..shape[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
        let class = rng.random_range(0..shape[2]);
        let y = (0..shape[2]).map(|k| if k == class { 1.0 } else { 0.0 }).collect();
        ToyProblem { specs, weights, biases, x, y }
    }

    pub fn cost(&self, weights: &[Matrix], biases: &[Vec<f64>]) -> f64 {
        let net = Mlp::from_parts(&self.specs, weights, biases.to_vec(), 2.0, &DeviceModel::numeric())
            .unwrap();
        example_cost(&net.predict(&self.x).unwrap(), &self.y)
    }

    /// Worst relative error between backprop and central differences over
    /// every weight and bias.
    pub fn max_gradient_error(&self, h: f64) -> f64 {
        let net = Mlp::from_parts(
            &self.specs,
            &self.weights,
            self.biases.clone(),
            2.0,
            &DeviceModel::numeric(),
        )
        .unwrap();
        let grads = net.backward(&net.forward(&self.x).unwrap(), &self.y).unwrap();
        let mut worst: f64 = 0.0;
        for (l, g) in grads.iter().enumerate() {
            let wg = g.weight_gradient();
            for i in 0..wg.rows() {
                for j in 0..wg.cols() {
                    let mut plus = self.weights.clone();
                    let mut minus = self.weights.clone();
                    let w = self.weights[l].get(i, j);
                    plus[l].set(i, j, w + h);
                    minus[l].set(i, j, w - h);
                    let fd = (self.cost(&plus, &self.biases) - self.cost(&minus, &self.biases)) / (2.0 * h);
                    worst = worst.max(gradient_rel_err(wg.get(i, j), fd));
                }
                let mut plus = self.biases.clone();
                let mut minus = self.biases.clone();
                plus[l][i] += h;
                minus[l][i] -= h;
                let fd = (self.cost(&self.weights, &plus) - self.cost(&self.weights, &minus)) / (2.0 * h);
                worst = worst.max(gradient_rel_err(g.delta[i], fd));
            }
        }
        worst
    }
}

/// Relative error with a floor on the scale, so vanishing gradients are
/// compared in absolute terms.
pub fn gradient_rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}
