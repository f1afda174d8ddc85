//! Finite-difference gradient verification.
//!
//! Every differentiable building block is validated the same way: pick a
//! fixed random projection w, define loss = sum(w * f(inputs, params)),
//! compute analytic gradients with one backward sweep, then probe sampled
//! coordinates with central differences in f64 and compare.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{no_grad, Tensor};

/// Central-difference step. With f64 arithmetic the truncation error is
/// ~1e-8 x curvature and the cancellation error ~1e-12 x loss scale, both
/// far below the tolerances.
pub const FD_STEP: f64 = 1e-4;
/// Per-module relative error bound.
pub const MODULE_TOL: f64 = 1e-4;
/// End-to-end (whole network) relative error bound; longer chains accumulate
/// more truncation error.
pub const END_TO_END_TOL: f64 = 1e-3;
/// Magnitudes below this band count as zero: comparing noise against noise
/// says nothing, and genuinely dead parameters are covered by their own test.
pub const ZERO_BAND: f64 = 1e-5;

/// Outcome of one finite-difference sweep.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub name: String,
    pub max_rel_err: f64,
    /// Parameter path and flat index where the maximum occurred.
    pub worst: Option<(String, usize)>,
    pub probes: usize,
    pub tol: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_err.is_finite() && self.max_rel_err <= self.tol
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed() { "ok" } else { "FAIL" };
        let worst = match &self.worst {
            Some((p, i)) => format!(" worst {p}[{i}]"),
            None => String::new(),
        };
        format!(
            "gradcheck {:<28} probes {:>5}  max rel err {:.3e}  tol {:.0e}  {}{}",
            self.name, self.probes, self.max_rel_err, self.tol, verdict, worst
        )
    }
}

fn rel_err(fd: f64, analytic: f64) -> f64 {
    let denom = fd.abs().max(analytic.abs());
    if denom < ZERO_BAND {
        0.0
    } else {
        (fd - analytic).abs() / denom
    }
}

/// How many coordinates to probe.
#[derive(Debug, Clone, Copy)]
pub enum SamplePlan {
    /// Probe every coordinate of every tensor.
    Exhaustive,
    /// Probe min(numel, per_tensor) coordinates of each tensor, plus `extra`
    /// coordinates drawn uniformly over everything else.
    Stratified { per_tensor: usize, extra: usize },
}

/// Checks analytic gradients of `loss_fn` with respect to `params`.
///
/// `loss_fn` must be a pure function of the current parameter values: it is
/// re-evaluated under `no_grad` with single coordinates displaced by
/// [`FD_STEP`]. Parameters without an analytic gradient check against zero.
pub fn check_gradients<F>(
    name: &str,
    params: &[(String, Tensor<f64>)],
    loss_fn: F,
    plan: SamplePlan,
    tol: f64,
    seed: u64,
) -> GradCheckReport
where
    F: Fn() -> Tensor<f64>,
{
    for (_, p) in params {
        p.zero_grad();
    }
    let loss = loss_fn();
    assert_eq!(loss.numel(), 1, "gradcheck {name}: loss must be scalar");
    loss.backward();
    let analytic: HashMap<&str, Vec<f64>> = params
        .iter()
        .map(|(n, p)| (n.as_str(), p.grad().unwrap_or_else(|| vec![0.0; p.numel()])))
        .collect();
    drop(loss);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes: Vec<(usize, usize)> = Vec::new(); // (param index, coord)
    match plan {
        SamplePlan::Exhaustive => {
            for (pi, (_, p)) in params.iter().enumerate() {
                probes.extend((0..p.numel()).map(|i| (pi, i)));
            }
        }
        SamplePlan::Stratified { per_tensor, extra } => {
            for (pi, (_, p)) in params.iter().enumerate() {
                let n = p.numel();
                if n <= per_tensor {
                    probes.extend((0..n).map(|i| (pi, i)));
                } else {
                    for _ in 0..per_tensor {
                        probes.push((pi, rng.gen_range(0..n)));
                    }
                }
            }
            for _ in 0..extra {
                let pi = rng.gen_range(0..params.len());
                let n = params[pi].1.numel();
                probes.push((pi, rng.gen_range(0..n)));
            }
        }
    }
    probes.sort_unstable();
    probes.dedup();

    let mut max_rel = 0.0f64;
    let mut worst = None;
    for &(pi, i) in &probes {
        let (pname, p) = &params[pi];
        let orig = p.data()[i];
        p.update_data(|d| d[i] = orig + FD_STEP);
        let f_plus = no_grad(&loss_fn).item();
        p.update_data(|d| d[i] = orig - FD_STEP);
        let f_minus = no_grad(&loss_fn).item();
        p.update_data(|d| d[i] = orig);
        let fd = (f_plus - f_minus) / (2.0 * FD_STEP);
        let an = analytic[pname.as_str()][i];
        let rel = rel_err(fd, an);
        if rel > max_rel {
            max_rel = rel;
            worst = Some((pname.clone(), i));
        }
    }

    GradCheckReport {
        name: name.to_string(),
        max_rel_err: max_rel,
        worst,
        probes: probes.len(),
        tol,
    }
}

/// Fixed random projection tensor for scalarizing multi-output modules.
pub fn projection(shape: &[usize], seed: u64) -> Tensor<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = shape.iter().product();
    let data = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Tensor::new(data, shape)
}

/// loss = sum(w * out), the standard scalarization for gradient checks.
pub fn weighted_sum(out: &Tensor<f64>, w: &Tensor<f64>) -> Tensor<f64> {
    assert_eq!(
        out.shape(),
        w.shape(),
        "weighted_sum: output {:?} vs projection {:?}",
        out.shape(),
        w.shape()
    );
    out.mul(w).sum_all()
}
