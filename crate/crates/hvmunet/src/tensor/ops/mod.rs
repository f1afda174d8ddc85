//! Differentiable operations. Each op materializes its output and registers
//! a backward closure when recording is active.
//!
//! Shape violations panic, naming the operation and the offending shapes;
//! everything else (IO, config, data) uses `Result` at higher layers.

mod conv;
mod elementwise;
mod layout;
mod matmul;
mod norm;
mod pool;
mod reduce;
mod scan;

pub use conv::Conv2dSpec;
pub use layout::concat;
pub use scan::selective_scan;

use super::{Scalar, Tensor};
use crate::error::Error;

/// Applies a primitive by name. This is the string-keyed entry used by the
/// diagnostics tooling; typed methods on [`Tensor`] are the main API.
/// Unknown names are rejected rather than silently ignored.
pub fn apply_named<T: Scalar>(name: &str, inputs: &[&Tensor<T>]) -> Result<Tensor<T>, Error> {
    let unary = |f: fn(&Tensor<T>) -> Tensor<T>| -> Result<Tensor<T>, Error> {
        match inputs {
            [x] => Ok(f(x)),
            _ => Err(Error::Op(format!(
                "{name}: expected 1 input, got {}",
                inputs.len()
            ))),
        }
    };
    let binary = |f: fn(&Tensor<T>, &Tensor<T>) -> Tensor<T>| -> Result<Tensor<T>, Error> {
        match inputs {
            [a, b] => Ok(f(a, b)),
            _ => Err(Error::Op(format!(
                "{name}: expected 2 inputs, got {}",
                inputs.len()
            ))),
        }
    };
    match name {
        "add" => binary(|a, b| a.add(b)),
        "sub" => binary(|a, b| a.sub(b)),
        "mul" => binary(|a, b| a.mul(b)),
        "div" => binary(|a, b| a.div(b)),
        "matmul" => binary(|a, b| a.matmul(b)),
        "neg" => unary(|x| x.neg()),
        "exp" => unary(|x| x.exp()),
        "ln" => unary(|x| x.ln()),
        "sqrt" => unary(|x| x.sqrt()),
        "recip" => unary(|x| x.recip()),
        "softplus" => unary(|x| x.softplus()),
        "sigmoid" => unary(|x| x.sigmoid()),
        "silu" => unary(|x| x.silu()),
        "gelu" => unary(|x| x.gelu()),
        "expm1_over_x" => unary(|x| x.expm1_over_x()),
        "sum_all" => unary(|x| x.sum_all()),
        "mean_all" => unary(|x| x.mean_all()),
        other => Err(Error::Op(format!("unknown op id `{other}`"))),
    }
}
