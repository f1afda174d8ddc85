use crate::tensor::{Scalar, Tensor};

impl<T: Scalar> Tensor<T> {
    /// Max pooling over k×k windows with stride s, no padding. Ties route
    /// the gradient to the first maximum in row-major window order.
    pub fn max_pool2d(&self, k: usize, s: usize) -> Tensor<T> {
        assert_eq!(
            self.rank(),
            4,
            "max_pool2d: input must be (B, C, H, W), got {:?}",
            self.shape()
        );
        assert!(k > 0 && s > 0, "max_pool2d: bad window {k}/stride {s}");
        let (b, c, h, w) = (
            self.shape()[0],
            self.shape()[1],
            self.shape()[2],
            self.shape()[3],
        );
        assert!(
            h >= k && w >= k,
            "max_pool2d: window {k} exceeds input {:?}",
            self.shape()
        );
        let ho = (h - k) / s + 1;
        let wo = (w - k) / s + 1;
        let x = self.data();
        let mut out = vec![T::zero(); b * c * ho * wo];
        let mut arg = vec![0usize; b * c * ho * wo];
        for bc in 0..b * c {
            let plane = bc * h * w;
            for oh in 0..ho {
                for ow in 0..wo {
                    let mut best = x[plane + oh * s * w + ow * s];
                    let mut best_idx = plane + oh * s * w + ow * s;
                    for ki in 0..k {
                        for kj in 0..k {
                            let idx = plane + (oh * s + ki) * w + (ow * s + kj);
                            if x[idx] > best {
                                best = x[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    out[bc * ho * wo + oh * wo + ow] = best;
                    arg[bc * ho * wo + oh * wo + ow] = best_idx;
                }
            }
        }
        drop(x);
        let n_in = self.numel();
        Tensor::from_op(
            out,
            vec![b, c, ho, wo],
            vec![self.clone()],
            "max_pool2d",
            || {
                Box::new(move |_, g| {
                    let mut gx = vec![T::zero(); n_in];
                    for (i, &src) in arg.iter().enumerate() {
                        gx[src] = gx[src] + g[i];
                    }
                    vec![Some(gx)]
                })
            },
        )
    }

    /// Nearest-neighbor 2x upsampling: each pixel becomes a 2×2 block.
    pub fn upsample_nearest_2x(&self) -> Tensor<T> {
        assert_eq!(
            self.rank(),
            4,
            "upsample_nearest_2x: input must be (B, C, H, W), got {:?}",
            self.shape()
        );
        let (b, c, h, w) = (
            self.shape()[0],
            self.shape()[1],
            self.shape()[2],
            self.shape()[3],
        );
        let x = self.data();
        let mut out = vec![T::zero(); b * c * 4 * h * w];
        let (ho, wo) = (2 * h, 2 * w);
        for bc in 0..b * c {
            let src = bc * h * w;
            let dst = bc * ho * wo;
            for i in 0..h {
                for j in 0..w {
                    let v = x[src + i * w + j];
                    let o = dst + 2 * i * wo + 2 * j;
                    out[o] = v;
                    out[o + 1] = v;
                    out[o + wo] = v;
                    out[o + wo + 1] = v;
                }
            }
        }
        drop(x);
        Tensor::from_op(
            out,
            vec![b, c, ho, wo],
            vec![self.clone()],
            "upsample_nearest_2x",
            || {
                Box::new(move |_, g| {
                    let mut gx = vec![T::zero(); b * c * h * w];
                    for bc in 0..b * c {
                        let src = bc * h * w;
                        let dst = bc * ho * wo;
                        for i in 0..h {
                            for j in 0..w {
                                let o = dst + 2 * i * wo + 2 * j;
                                gx[src + i * w + j] =
                                    g[o] + g[o + 1] + g[o + wo] + g[o + wo + 1];
                            }
                        }
                    }
                    vec![Some(gx)]
                })
            },
        )
    }
}
