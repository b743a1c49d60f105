//! Feed-forward classifier whose weight matrices live on crossbar cores.

mod checkpoint;
mod functions;
mod mlp;
mod optimizer;

pub use checkpoint::{format_checkpoint, load_checkpoint, parse_checkpoint, save_checkpoint};
pub use functions::{argmax, example_cost, quadratic_cost, sigmoid, sigmoid_vec, softmax};
pub use mlp::{Activation, ForwardPass, Layer, LayerGradient, LayerSpec, Mlp};
pub use optimizer::{train_step, OptimizerKind, OptimizerState};
