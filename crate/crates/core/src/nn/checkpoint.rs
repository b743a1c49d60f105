//! Text checkpoints of decoded network parameters.
//!
//! ```text
//! MLP v1
//! w_max 2.0000000000000000e0
//! layers 2
//! layer 30 15 sigmoid
//! <fan_out rows of fan_in weights>
//! bias <fan_out values>
//! layer 15 2 softmax
//! ...
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::mlp::{Activation, LayerSpec, Mlp};
use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

fn push_values(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        write!(out, "{v:.16e}").unwrap();
    }
    out.push('\n');
}

pub fn format_checkpoint(net: &Mlp) -> String {
    let mut out = String::from("MLP v1\n");
    let w_max = net.layers()[0].core.w_max();
    writeln!(out, "w_max {w_max:.16e}").unwrap();
    writeln!(out, "layers {}", net.layers().len()).unwrap();
    for layer in net.layers() {
        let s = layer.spec;
        writeln!(out, "layer {} {} {}", s.fan_in, s.fan_out, s.activation.as_str()).unwrap();
        let w = layer.core.weights();
        for i in 0..w.rows() {
            push_values(&mut out, w.row(i));
        }
        out.push_str("bias ");
        push_values(&mut out, &layer.bias);
    }
    out
}

pub fn save_checkpoint(net: &Mlp, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_checkpoint(net)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>, device: &DeviceModel) -> Result<Mlp> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_checkpoint(&text, path, device)
}

/// Rebuilds a network from checkpoint text. Weights are re-encoded around the
/// conductance midpoint; with a power-of-two `w_max` the decoded weights come
/// back bit-for-bit.
pub fn parse_checkpoint(text: &str, origin: &Path, device: &DeviceModel) -> Result<Mlp> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(origin, 0, format!("checkpoint truncated before {what}")))
    };
    let floats = |lineno: usize, s: &str, n: usize| -> Result<Vec<f64>> {
        let vals = s
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::parse(origin, lineno, format!("not a number: '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != n {
            return Err(Error::parse(origin, lineno, format!("expected {n} values, got {}", vals.len())));
        }
        Ok(vals)
    };
    let keyed = |lineno: usize, line: &'_ str, key: &str| -> Result<String> {
        line.strip_prefix(key)
            .map(|rest| rest.trim().to_string())
            .ok_or_else(|| Error::parse(origin, lineno, format!("expected '{key}'")))
    };

    let (l, header) = next("header")?;
    if header != "MLP v1" {
        return Err(Error::parse(origin, l, "expected 'MLP v1' header"));
    }
    let (l, line) = next("w_max")?;
    let w_max = floats(l, &keyed(l, line, "w_max")?, 1)?[0];
    let (l, line) = next("layer count")?;
    let count: usize = keyed(l, line, "layers")?
        .parse()
        .map_err(|_| Error::parse(origin, l, "bad layer count"))?;

    let mut specs = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut biases = Vec::with_capacity(count);
    for _ in 0..count {
        let (l, line) = next("layer header")?;
        let rest = keyed(l, line, "layer")?;
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let [fan_in, fan_out, act] = parts[..] else {
            return Err(Error::parse(origin, l, "expected 'layer <fan_in> <fan_out> <activation>'"));
        };
        let dim = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(origin, l, format!("bad dimension '{s}'")));
        let spec = LayerSpec::new(
            dim(fan_in)?,
            dim(fan_out)?,
            act.parse::<Activation>().map_err(|e| Error::parse(origin, l, e.to_string()))?,
        );
        let mut w = Vec::with_capacity(spec.fan_in * spec.fan_out);
        for _ in 0..spec.fan_out {
            let (l, row) = next("weight rows")?;
            w.extend(floats(l, row, spec.fan_in)?);
        }
        let (l, line) = next("bias")?;
        biases.push(floats(l, &keyed(l, line, "bias")?, spec.fan_out)?);
        weights.push(Matrix::from_vec(spec.fan_out, spec.fan_in, w)?);
        specs.push(spec);
    }
    Mlp::from_parts(&specs, &weights, biases, w_max, device)
}
