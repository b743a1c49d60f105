use rand::Rng;

use super::functions::{sigmoid_vec, softmax};
use crate::crossbar::{BalancedCore, UpdateErrorLog};
use crate::device::DeviceModel;
use crate::error::{check_dim, Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Sigmoid,
    Softmax,
}

impl Activation {
    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Softmax => "softmax",
        }
    }

    pub fn apply(self, z: &[f64]) -> Vec<f64> {
        match self {
            Activation::Sigmoid => sigmoid_vec(z),
            Activation::Softmax => softmax(z),
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "softmax" => Ok(Activation::Softmax),
            other => Err(Error::Config(format!("unknown activation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub fan_in: usize,
    pub fan_out: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(fan_in: usize, fan_out: usize, activation: Activation) -> Self {
        LayerSpec {
            fan_in,
            fan_out,
            activation,
        }
    }
}

/// Weighted layer: the crossbar holds a `fan_out × fan_in` matrix, the bias
/// stays digital.
#[derive(Debug, Clone)]
pub struct Layer {
    pub spec: LayerSpec,
    pub core: BalancedCore,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<Layer>,
}

/// Everything `backward` needs from a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    /// Input vector of each layer.
    pub inputs: Vec<Vec<f64>>,
    /// Activation vector of each layer.
    pub activations: Vec<Vec<f64>>,
}

impl ForwardPass {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("network has at least one layer")
    }
}

/// Gradient of one layer: the weight gradient is `delta · inputᵀ` and the
/// bias gradient is `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub delta: Vec<f64>,
    pub input: Vec<f64>,
}

impl LayerGradient {
    pub fn weight_gradient(&self) -> Matrix {
        Matrix::from_fn(self.delta.len(), self.input.len(), |i, j| self.delta[i] * self.input[j])
    }
}

fn check_specs(specs: &[LayerSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Config("network needs at least one layer".into()));
    }
    if specs.iter().any(|s| s.fan_in == 0 || s.fan_out == 0) {
        return Err(Error::Config("layer dimensions must be >= 1".into()));
    }
    for pair in specs.windows(2) {
        if pair[0].fan_out != pair[1].fan_in {
            return Err(Error::Config(format!(
                "layer output {} does not feed input {}",
                pair[0].fan_out, pair[1].fan_in
            )));
        }
    }
    if specs[..specs.len() - 1]
        .iter()
        .any(|s| s.activation != Activation::Sigmoid)
    {
        return Err(Error::Config("hidden layers must use sigmoid".into()));
    }
    Ok(())
}

impl Mlp {
    /// 30 → 15 (sigmoid) → 2 (softmax).
    pub fn classifier_specs() -> Vec<LayerSpec> {
        vec![
            LayerSpec::new(30, 15, Activation::Sigmoid),
            LayerSpec::new(15, 2, Activation::Softmax),
        ]
    }

    /// Weights uniform in `[−0.5, 0.5]/√fan_in`, biases zero.
    pub fn new<R: Rng + ?Sized>(
        specs: &[LayerSpec],
        w_max: f64,
        device: &DeviceModel,
        rng: &mut R,
    ) -> Result<Self> {
        check_specs(specs)?;
        let weights: Vec<Matrix> = specs
            .iter()
            .map(|s| {
                let scale = 1.0 / (s.fan_in as f64).sqrt();
                Matrix::from_fn(s.fan_out, s.fan_in, |_, _| {
                    (rng.random::<f64>() - 0.5) * scale
                })
            })
            .collect();
        let biases = specs.iter().map(|s| vec![0.0; s.fan_out]).collect();
        Self::from_parts(specs, &weights, biases, w_max, device)
    }

    pub fn from_parts(
        specs: &[LayerSpec],
        weights: &[Matrix],
        biases: Vec<Vec<f64>>,
        w_max: f64,
        device: &DeviceModel,
    ) -> Result<Self> {
        check_specs(specs)?;
        check_dim(specs.len(), weights.len())?;
        check_dim(specs.len(), biases.len())?;
        let layers = specs
            .iter()
            .zip(weights)
            .zip(biases)
            .map(|((spec, w), bias)| {
                check_dim(spec.fan_out, w.rows())?;
                check_dim(spec.fan_in, w.cols())?;
                check_dim(spec.fan_out, bias.len())?;
                Ok(Layer {
                    spec: *spec,
                    core: BalancedCore::from_weights(w, w_max, device.clone())?,
                    bias,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mlp { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(|l| l.spec).collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].spec.fan_in
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].spec.fan_out
    }

    pub fn forward(&self, x: &[f64]) -> Result<ForwardPass> {
        check_dim(self.input_dim(), x.len())?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut activations = Vec::with_capacity(self.layers.len());
        let mut current = x.to_vec();
        for layer in &self.layers {
            let mut z = layer.core.vmm(&current)?;
            for (zi, b) in z.iter_mut().zip(&layer.bias) {
                *zi += b;
            }
            let a = layer.spec.activation.apply(&z);
            inputs.push(std::mem::replace(&mut current, a.clone()));
            activations.push(a);
        }
        Ok(ForwardPass {
            inputs,
            activations,
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(x)?.activations.pop().unwrap_or_default())
    }

    /// Backpropagates the per-example quadratic cost `½‖y − a‖²`.
    ///
    /// The output error goes through the full softmax Jacobian:
    /// `δᵢ = aᵢ·((aᵢ − yᵢ) − Σⱼ (aⱼ − yⱼ)·aⱼ)`.
    pub fn backward(&self, pass: &ForwardPass, y: &[f64]) -> Result<Vec<LayerGradient>> {
        check_dim(self.layers.len(), pass.activations.len())?;
        check_dim(self.layers.len(), pass.inputs.len())?;
        let out = pass.output();
        check_dim(out.len(), y.len())?;
        let residual: Vec<f64> = out.iter().zip(y).map(|(a, t)| a - t).collect();

        let last = &self.layers[self.layers.len() - 1];
        let mut delta: Vec<f64> = match last.spec.activation {
            Activation::Softmax => {
                let dot: f64 = residual.iter().zip(out).map(|(r, a)| r * a).sum();
                out.iter().zip(&residual).map(|(a, r)| a * (r - dot)).collect()
            }
            Activation::Sigmoid => out
                .iter()
                .zip(&residual)
                .map(|(a, r)| r * a * (1.0 - a))
                .collect(),
        };

        let mut grads = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let input = &pass.inputs[k];
            check_dim(self.layers[k].spec.fan_in, input.len())?;
            let next_delta = if k > 0 {
                let back = self.layers[k].core.vmm_transpose(&delta)?;
                Some(
                    back.iter()
                        .zip(input)
                        .map(|(b, a)| b * a * (1.0 - a))
                        .collect::<Vec<f64>>(),
                )
            } else {
                None
            };
            grads.push(LayerGradient {
                delta,
                input: input.clone(),
            });
            match next_delta {
                Some(d) => delta = d,
                None => break,
            }
        }
        grads.reverse();
        Ok(grads)
    }

    /// Turns on update recording in every core.
    pub fn enable_recording(&mut self) {
        for l in &mut self.layers {
            l.core.enable_recording();
        }
    }

    pub fn set_recording(&mut self, on: bool) {
        for l in &mut self.layers {
            l.core.set_recording(on);
        }
    }

    /// Drains and concatenates the update logs of all cores.
    pub fn take_logs(&mut self) -> UpdateErrorLog {
        let mut all = UpdateErrorLog::new();
        for l in &mut self.layers {
            if let Some(log) = l.core.take_log() {
                all.extend(log);
            }
        }
        all
    }
}
