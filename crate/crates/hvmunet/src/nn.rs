//! Thin layer wrappers over the tensor ops: they own parameters, seed them
//! deterministically, and expose `visit_params` so the optimizer, the
//! checkpointer and the gradient checker all see one flat name -> tensor map.

use rand::Rng;

use crate::tensor::ops::Conv2dSpec;
use crate::tensor::{Scalar, Tensor};

pub const LAYER_NORM_EPS: f64 = 1e-6;

/// `prefix.name`, or just `name` at the root.
pub fn join_path(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

/// Uniform(-bound, bound) parameter tensor.
pub fn uniform_param<T: Scalar>(rng: &mut impl Rng, shape: &[usize], bound: f64) -> Tensor<T> {
    let n: usize = shape.iter().product();
    let data = (0..n)
        .map(|_| T::from_f64(rng.gen_range(-bound..bound)))
        .collect();
    Tensor::param(data, shape)
}

/// Named leaf visitor used across all modules.
pub type ParamVisitor<'a, T> = dyn FnMut(&str, &Tensor<T>) + 'a;

/// Flattens a module's parameters into deterministic (path, tensor) pairs.
pub fn collect_params<T: Scalar>(
    visit: impl FnOnce(&mut ParamVisitor<'_, T>),
) -> Vec<(String, Tensor<T>)> {
    let mut out: Vec<(String, Tensor<T>)> = Vec::new();
    let mut f = |name: &str, t: &Tensor<T>| {
        debug_assert!(
            out.iter().all(|(n, _)| n != name),
            "duplicate parameter path {name}"
        );
        out.push((name.to_string(), t.clone()));
    };
    visit(&mut f);
    out
}

/// Affine map on the last axis: y = x W + b, W stored (d_in, d_out).
pub struct Linear<T: Scalar> {
    pub weight: Tensor<T>,
    pub bias: Option<Tensor<T>>,
    pub d_in: usize,
    pub d_out: usize,
}

impl<T: Scalar> Linear<T> {
    pub fn new(rng: &mut impl Rng, d_in: usize, d_out: usize, bias: bool) -> Self {
        let bound = 1.0 / (d_in as f64).sqrt();
        Linear {
            weight: uniform_param(rng, &[d_in, d_out], bound),
            bias: bias.then(|| uniform_param(rng, &[d_out], bound)),
            d_in,
            d_out,
        }
    }

    pub fn forward(&self, x: &Tensor<T>) -> Tensor<T> {
        assert_eq!(
            *x.shape().last().unwrap_or(&0),
            self.d_in,
            "linear: input {:?} does not end in d_in {}",
            x.shape(),
            self.d_in
        );
        let y = x.matmul(&self.weight);
        match &self.bias {
            Some(b) => y.add(b),
            None => y,
        }
    }

    pub fn visit_params(&self, prefix: &str, f: &mut ParamVisitor<'_, T>) {
        f(&join_path(prefix, "weight"), &self.weight);
        if let Some(b) = &self.bias {
            f(&join_path(prefix, "bias"), b);
        }
    }
}

/// 2-d convolution layer, OIHW weights, PyTorch-style fan-in uniform init.
pub struct Conv2d<T: Scalar> {
    pub weight: Tensor<T>,
    pub bias: Option<Tensor<T>>,
    pub spec: Conv2dSpec,
}

impl<T: Scalar> Conv2d<T> {
    pub fn new(
        rng: &mut impl Rng,
        in_ch: usize,
        out_ch: usize,
        k: usize,
        spec: Conv2dSpec,
        bias: bool,
    ) -> Self {
        assert!(
            in_ch % spec.groups == 0 && out_ch % spec.groups == 0,
            "conv2d: channels {in_ch}->{out_ch} not divisible by groups {}",
            spec.groups
        );
        let fan_in = (in_ch / spec.groups) * k * k;
        let bound = 1.0 / (fan_in as f64).sqrt();
        Conv2d {
            weight: uniform_param(rng, &[out_ch, in_ch / spec.groups, k, k], bound),
            bias: bias.then(|| uniform_param(rng, &[out_ch], bound)),
            spec,
        }
    }

    pub fn forward(&self, x: &Tensor<T>) -> Tensor<T> {
        x.conv2d(&self.weight, self.bias.as_ref(), self.spec)
    }

    pub fn visit_params(&self, prefix: &str, f: &mut ParamVisitor<'_, T>) {
        f(&join_path(prefix, "weight"), &self.weight);
        if let Some(b) = &self.bias {
            f(&join_path(prefix, "bias"), b);
        }
    }
}

/// Pointwise (1×1) channel mix over NCHW, implemented as a matmul on a
/// channels-last view; cheaper than the general convolution loop.
pub struct Conv1x1<T: Scalar> {
    pub lin: Linear<T>,
}

impl<T: Scalar> Conv1x1<T> {
    pub fn new(rng: &mut impl Rng, in_ch: usize, out_ch: usize, bias: bool) -> Self {
        Conv1x1 {
            lin: Linear::new(rng, in_ch, out_ch, bias),
        }
    }

    pub fn forward(&self, x: &Tensor<T>) -> Tensor<T> {
        assert_eq!(
            x.rank(),
            4,
            "conv1x1: input must be (B, C, H, W), got {:?}",
            x.shape()
        );
        let (b, c, h, w) = (x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]);
        let y = x
            .reshape(&[b, c, h * w])
            .permute(&[0, 2, 1]);
        let y = self.lin.forward(&y);
        y.permute(&[0, 2, 1]).reshape(&[b, self.lin.d_out, h, w])
    }

    pub fn visit_params(&self, prefix: &str, f: &mut ParamVisitor<'_, T>) {
        self.lin.visit_params(prefix, f);
    }
}

/// Layer normalization over the last axis; gamma starts at one, beta at zero.
pub struct LayerNorm<T: Scalar> {
    pub gamma: Tensor<T>,
    pub beta: Tensor<T>,
    pub dim: usize,
    pub eps: T,
}

impl<T: Scalar> LayerNorm<T> {
    pub fn new(dim: usize) -> Self {
        LayerNorm {
            gamma: Tensor::param(vec![T::one(); dim], &[dim]),
            beta: Tensor::param(vec![T::zero(); dim], &[dim]),
            dim,
            eps: T::from_f64(LAYER_NORM_EPS),
        }
    }

    pub fn forward(&self, x: &Tensor<T>) -> Tensor<T> {
        x.layer_norm(&self.gamma, &self.beta, self.eps)
    }

    pub fn visit_params(&self, prefix: &str, f: &mut ParamVisitor<'_, T>) {
        f(&join_path(prefix, "gamma"), &self.gamma);
        f(&join_path(prefix, "beta"), &self.beta);
    }
}

/// LayerNorm over the channel axis of NCHW maps: transpose to channels-last,
/// normalize, transpose back (transposes are materialized).
pub struct ChannelNorm<T: Scalar> {
    pub ln: LayerNorm<T>,
}

impl<T: Scalar> ChannelNorm<T> {
    pub fn new(dim: usize) -> Self {
        ChannelNorm {
            ln: LayerNorm::new(dim),
        }
    }

    pub fn forward(&self, x: &Tensor<T>) -> Tensor<T> {
        assert_eq!(
            x.rank(),
            4,
            "channel_norm: input must be (B, C, H, W), got {:?}",
            x.shape()
        );
        let y = x.permute(&[0, 2, 3, 1]);
        let y = self.ln.forward(&y);
        y.permute(&[0, 3, 1, 2])
    }

    pub fn visit_params(&self, prefix: &str, f: &mut ParamVisitor<'_, T>) {
        self.ln.visit_params(prefix, f);
    }
}
