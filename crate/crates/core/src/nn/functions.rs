use crate::error::{check_dim, Error, Result};

/// Logistic function `1 / (1 + e^(−x))`, evaluated without overflow for
/// large `|x|`.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid_vec(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(sigmoid).collect()
}

/// Max-shifted softmax.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `½‖y − a‖²` for a single example.
pub fn example_cost(output: &[f64], target: &[f64]) -> f64 {
    0.5 * output
        .iter()
        .zip(target)
        .map(|(a, y)| (y - a) * (y - a))
        .sum::<f64>()
}

/// Quadratic cost `(1/2n)·Σₓ ‖y(x) − aᴸ(x)‖²`.
pub fn quadratic_cost<A, Y>(outputs: &[A], targets: &[Y]) -> Result<f64>
where
    A: AsRef<[f64]>,
    Y: AsRef<[f64]>,
{
    if outputs.is_empty() {
        return Err(Error::Domain("quadratic cost of an empty batch".into()));
    }
    check_dim(outputs.len(), targets.len())?;
    let mut total = 0.0;
    for (a, y) in outputs.iter().zip(targets) {
        let (a, y) = (a.as_ref(), y.as_ref());
        check_dim(a.len(), y.len())?;
        total += example_cost(a, y);
    }
    Ok(total / outputs.len() as f64)
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in xs.iter().enumerate().skip(1) {
        if *v > xs[best] {
            best = k;
        }
    }
    best
}
