use crate::tensor::{Scalar, Tensor};

impl<T: Scalar> Tensor<T> {
    /// Layer normalization over the last axis with learned scale and shift:
    /// y = (x - mean) / sqrt(var + eps) * gamma + beta, variance biased
    /// (divide by the axis length). Saves per-row mean and reciprocal
    /// standard deviation for the backward pass.
    pub fn layer_norm(&self, gamma: &Tensor<T>, beta: &Tensor<T>, eps: T) -> Tensor<T> {
        let d = *self.shape().last().unwrap_or_else(|| {
            panic!("layer_norm: input must have rank >= 1, got shape []")
        });
        assert_eq!(
            gamma.shape(),
            &[d],
            "layer_norm: gamma shape {:?} does not match feature dim {d} of {:?}",
            gamma.shape(),
            self.shape()
        );
        assert_eq!(
            beta.shape(),
            &[d],
            "layer_norm: beta shape {:?} does not match feature dim {d} of {:?}",
            beta.shape(),
            self.shape()
        );
        let rows = self.numel() / d;
        let x = self.data();
        let gm = gamma.data();
        let bt = beta.data();
        let inv_d = T::from_usize(d).recip();
        let mut out = vec![T::zero(); rows * d];
        let mut means = vec![T::zero(); rows];
        let mut rstds = vec![T::zero(); rows];
        for r in 0..rows {
            let row = &x[r * d..(r + 1) * d];
            let mean: T = row.iter().copied().sum::<T>() * inv_d;
            let mut var = T::zero();
            for &v in row {
                let c = v - mean;
                var = var + c * c;
            }
            var = var * inv_d;
            let rstd = (var + eps).sqrt().recip();
            means[r] = mean;
            rstds[r] = rstd;
            let dst = &mut out[r * d..(r + 1) * d];
            for i in 0..d {
                dst[i] = (row[i] - mean) * rstd * gm[i] + bt[i];
            }
        }
        drop(x);
        drop(gm);
        drop(bt);
        Tensor::from_op(
            out,
            self.shape().to_vec(),
            vec![self.clone(), gamma.clone(), beta.clone()],
            "layer_norm",
            || {
                Box::new(move |out, g| {
                    let node = out.node().unwrap();
                    let (x, gamma, beta) =
                        (&node.parents[0], &node.parents[1], &node.parents[2]);
                    let xd = x.data();
                    let gm = gamma.data();
                    let inv_d = T::from_usize(d).recip();
                    let mut gx = x.requires_grad().then(|| vec![T::zero(); rows * d]);
                    let mut gg = gamma.requires_grad().then(|| vec![T::zero(); d]);
                    let mut gb = beta.requires_grad().then(|| vec![T::zero(); d]);
                    for r in 0..rows {
                        let row = &xd[r * d..(r + 1) * d];
                        let grow = &g[r * d..(r + 1) * d];
                        let (mean, rstd) = (means[r], rstds[r]);
                        if let Some(gx) = gx.as_mut() {
                            // dL/dxhat = g * gamma; project out the mean and
                            // the component along xhat, then rescale.
                            let mut s1 = T::zero();
                            let mut s2 = T::zero();
                            for i in 0..d {
                                let xhat = (row[i] - mean) * rstd;
                                let dxhat = grow[i] * gm[i];
                                s1 = s1 + dxhat;
                                s2 = s2 + dxhat * xhat;
                            }
                            s1 = s1 * inv_d;
                            s2 = s2 * inv_d;
                            let dst = &mut gx[r * d..(r + 1) * d];
                            for i in 0..d {
                                let xhat = (row[i] - mean) * rstd;
                                dst[i] = (grow[i] * gm[i] - s1 - xhat * s2) * rstd;
                            }
                        }
                        if let Some(gg) = gg.as_mut() {
                            for i in 0..d {
                                let xhat = (row[i] - mean) * rstd;
                                gg[i] = gg[i] + grow[i] * xhat;
                            }
                        }
                        if let Some(gb) = gb.as_mut() {
                            for i in 0..d {
                                gb[i] = gb[i] + grow[i];
                            }
                        }
                    }
                    vec![gx, gg, gb]
                })
            },
        )
    }
}
