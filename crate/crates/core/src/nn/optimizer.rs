use rand::Rng;

use super::functions::example_cost;
use super::mlp::{LayerGradient, Mlp};
use crate::error::{check_dim, Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
        }
    }

    pub fn default_eta(self) -> f64 {
        match self {
            OptimizerKind::Sgd => 0.1,
            OptimizerKind::Adam => 0.01,
        }
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sgd" => Ok(OptimizerKind::Sgd),
            "adam" => Ok(OptimizerKind::Adam),
            other => Err(Error::Config(format!("unknown optimizer '{other}'"))),
        }
    }
}

/// Optimizer hyperparameters plus Adam's moment accumulators.
///
/// Moments are kept per parameter group: for layer `k`, group `2k` is the
/// flattened weight matrix and group `2k + 1` the bias.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub kind: OptimizerKind,
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    t: u64,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, eta: f64) -> Result<Self> {
        Self::with_moments(kind, eta, 0.9, 0.999, 1e-8)
    }

    pub fn sgd(eta: f64) -> Result<Self> {
        Self::new(OptimizerKind::Sgd, eta)
    }

    pub fn adam(eta: f64) -> Result<Self> {
        Self::new(OptimizerKind::Adam, eta)
    }

    pub fn with_moments(
        kind: OptimizerKind,
        eta: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Result<Self> {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::Config(format!("learning rate must be >= 0, got {eta}")));
        }
        if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) {
            return Err(Error::Config("Adam betas must lie in [0, 1)".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Config("Adam epsilon must be > 0".into()));
        }
        Ok(OptimizerState {
            kind,
            eta,
            beta1,
            beta2,
            epsilon,
            m: Vec::new(),
            v: Vec::new(),
            t: 0,
        })
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Starts a new Adam step; call once before the per-group updates.
    pub fn begin_step(&mut self) {
        self.t += 1;
    }

    /// Bias-corrected Adam change `−eta·m̂/(√v̂ + ε)` for one parameter group.
    pub fn adam_delta(&mut self, group: usize, grad: &[f64]) -> Vec<f64> {
        if self.m.len() <= group {
            self.m.resize(group + 1, Vec::new());
            self.v.resize(group + 1, Vec::new());
        }
        let (m, v) = (&mut self.m[group], &mut self.v[group]);
        if m.len() != grad.len() {
            *m = vec![0.0; grad.len()];
            *v = vec![0.0; grad.len()];
        }
        let t = self.t.max(1) as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        grad.iter()
            .zip(m.iter_mut().zip(v.iter_mut()))
            .map(|(g, (m, v))| {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                -self.eta * m_hat / (v_hat.sqrt() + self.epsilon)
            })
            .collect()
    }

    /// Applies one optimizer step given backprop gradients.
    ///
    /// SGD writes each layer as a rank-one outer product; Adam's per-element
    /// scaling is not rank one, so its change is written element by element.
    /// Biases are updated digitally in both cases.
    pub fn apply<R: Rng + ?Sized>(
        &mut self,
        net: &mut Mlp,
        grads: &[LayerGradient],
        epoch: usize,
        rng: &mut R,
    ) -> Result<()> {
        check_dim(net.layers().len(), grads.len())?;
        match self.kind {
            OptimizerKind::Sgd => {
                for (layer, g) in net.layers_mut().iter_mut().zip(grads) {
                    layer.core.outer_update(self.eta, &g.delta, &g.input, epoch, rng)?;
                    for (b, d) in layer.bias.iter_mut().zip(&g.delta) {
                        *b -= self.eta * d;
                    }
                }
            }
            OptimizerKind::Adam => {
                self.begin_step();
                for (k, (layer, g)) in net.layers_mut().iter_mut().zip(grads).enumerate() {
                    let wg = g.weight_gradient();
                    let step = self.adam_delta(2 * k, wg.as_slice());
                    let delta = Matrix::from_vec(wg.rows(), wg.cols(), step)?;
                    layer.core.apply_update(&delta, epoch, rng)?;
                    let bias_step = self.adam_delta(2 * k + 1, &g.delta);
                    for (b, s) in layer.bias.iter_mut().zip(bias_step) {
                        *b += s;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Forward, backward and one optimizer step on a single example. Returns the
/// example's cost before the update.
pub fn train_step<R: Rng + ?Sized>(
    net: &mut Mlp,
    opt: &mut OptimizerState,
    x: &[f64],
    y: &[f64],
    epoch: usize,
    rng: &mut R,
) -> Result<f64> {
    let pass = net.forward(x)?;
    let cost = example_cost(pass.output(), y);
    let grads = net.backward(&pass, y)?;
    opt.apply(net, &grads, epoch, rng)?;
    Ok(cost)
}
