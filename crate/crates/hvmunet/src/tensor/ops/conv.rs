use crate::tensor::{Scalar, Tensor};

/// Hyperparameters of a 2-d convolution. Dilation inflates the kernel's
/// receptive field without extra weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conv2dSpec {
    pub stride: usize,
    pub padding: usize,
    pub dilation: usize,
    pub groups: usize,
}

impl Default for Conv2dSpec {
    fn default() -> Self {
        Conv2dSpec {
            stride: 1,
            padding: 0,
            dilation: 1,
            groups: 1,
        }
    }
}

impl Conv2dSpec {
    pub fn same3x3() -> Self {
        Conv2dSpec {
            padding: 1,
            ..Default::default()
        }
    }

    fn out_dim(&self, in_dim: usize, k: usize) -> usize {
        let span = self.dilation * (k - 1) + 1;
        assert!(
            in_dim + 2 * self.padding >= span,
            "conv2d: input extent {in_dim} (+2*{}) smaller than dilated kernel span {span}",
            self.padding
        );
        (in_dim + 2 * self.padding - span) / self.stride + 1
    }
}

impl<T: Scalar> Tensor<T> {
    /// 2-d convolution (cross-correlation), NCHW input, OIHW weights.
    /// With `groups = Cin` and `Cout = Cin` this is a depthwise convolution.
    pub fn conv2d(&self, w: &Tensor<T>, bias: Option<&Tensor<T>>, spec: Conv2dSpec) -> Tensor<T> {
        assert_eq!(
            self.rank(),
            4,
            "conv2d: input must be (B, C, H, W), got {:?}",
            self.shape()
        );
        assert_eq!(
            w.rank(),
            4,
            "conv2d: weight must be (Cout, Cin/groups, kh, kw), got {:?}",
            w.shape()
        );
        assert!(spec.stride > 0 && spec.dilation > 0 && spec.groups > 0, "conv2d: bad spec {spec:?}");
        let (b, cin, h, wd) = (
            self.shape()[0],
            self.shape()[1],
            self.shape()[2],
            self.shape()[3],
        );
        let (cout, wc, kh, kw) = (w.shape()[0], w.shape()[1], w.shape()[2], w.shape()[3]);
        assert!(
            cin % spec.groups == 0 && cout % spec.groups == 0,
            "conv2d: channels in {cin}/out {cout} not divisible by groups {}",
            spec.groups
        );
        let cin_g = cin / spec.groups;
        let cout_g = cout / spec.groups;
        assert_eq!(
            wc, cin_g,
            "conv2d: weight {:?} expects {wc} input channels per group, input {:?} with groups {} provides {cin_g}",
            w.shape(),
            self.shape(),
            spec.groups
        );
        if let Some(bias) = bias {
            assert_eq!(
                bias.shape(),
                &[cout],
                "conv2d: bias shape {:?} does not match {cout} output channels",
                bias.shape()
            );
        }
        let ho = spec.out_dim(h, kh);
        let wo = spec.out_dim(wd, kw);

        let x = self.data();
        let wv = w.data();
        let bv = bias.map(|t| t.to_vec());
        let mut out = vec![T::zero(); b * cout * ho * wo];
        for bi in 0..b {
            for oc in 0..cout {
                let g_idx = oc / cout_g;
                let ic0 = g_idx * cin_g;
                let bias_v = bv.as_ref().map_or(T::zero(), |v| v[oc]);
                for oh in 0..ho {
                    for ow in 0..wo {
                        let mut acc = bias_v;
                        for icg in 0..cin_g {
                            let ic = ic0 + icg;
                            let x_plane = (bi * cin + ic) * h * wd;
                            let w_plane = ((oc * cin_g) + icg) * kh * kw;
                            for ki in 0..kh {
                                let ih = (oh * spec.stride + ki * spec.dilation) as isize
                                    - spec.padding as isize;
                                if ih < 0 || ih >= h as isize {
                                    continue;
                                }
                                for kj in 0..kw {
                                    let iw = (ow * spec.stride + kj * spec.dilation) as isize
                                        - spec.padding as isize;
                                    if iw < 0 || iw >= wd as isize {
                                        continue;
                                    }
                                    acc = acc
                                        + x[x_plane + ih as usize * wd + iw as usize]
                                            * wv[w_plane + ki * kw + kj];
                                }
                            }
                        }
                        out[((bi * cout + oc) * ho + oh) * wo + ow] = acc;
                    }
                }
            }
        }
        drop(x);
        drop(wv);

        let mut parents = vec![self.clone(), w.clone()];
        if let Some(bias) = bias {
            parents.push(bias.clone());
        }
        let has_bias = bias.is_some();
        Tensor::from_op(out, vec![b, cout, ho, wo], parents, "conv2d", || {
            Box::new(move |out, g| {
                let node = out.node().unwrap();
                let (xt, wt) = (&node.parents[0], &node.parents[1]);
                let x = xt.data();
                let wv = wt.data();
                let mut gx = xt.requires_grad().then(|| vec![T::zero(); xt.numel()]);
                let mut gw = wt.requires_grad().then(|| vec![T::zero(); wt.numel()]);
                let mut gb = if has_bias && node.parents[2].requires_grad() {
                    Some(vec![T::zero(); cout])
                } else {
                    None
                };
                for bi in 0..b {
                    for oc in 0..cout {
                        let g_idx = oc / cout_g;
                        let ic0 = g_idx * cin_g;
                        for oh in 0..ho {
                            for ow in 0..wo {
                                let gv = g[((bi * cout + oc) * ho + oh) * wo + ow];
                                if let Some(gb) = gb.as_mut() {
                                    gb[oc] = gb[oc] + gv;
                                }
                                if gx.is_none() && gw.is_none() {
                                    continue;
                                }
                                for icg in 0..cin_g {
                                    let ic = ic0 + icg;
                                    let x_plane = (bi * cin + ic) * h * wd;
                                    let w_plane = ((oc * cin_g) + icg) * kh * kw;
                                    for ki in 0..kh {
                                        let ih = (oh * spec.stride + ki * spec.dilation) as isize
                                            - spec.padding as isize;
                                        if ih < 0 || ih >= h as isize {
                                            continue;
                                        }
                                        for kj in 0..kw {
                                            let iw =
                                                (ow * spec.stride + kj * spec.dilation) as isize
                                                    - spec.padding as isize;
                                            if iw < 0 || iw >= wd as isize {
                                                continue;
                                            }
                                            let xi = x_plane + ih as usize * wd + iw as usize;
                                            let wi = w_plane + ki * kw + kj;
                                            if let Some(gx) = gx.as_mut() {
                                                gx[xi] = gx[xi] + gv * wv[wi];
                                            }
                                            if let Some(gw) = gw.as_mut() {
                                                gw[wi] = gw[wi] + gv * x[xi];
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                let mut grads = vec![gx, gw];
                if has_bias {
                    grads.push(gb);
                }
                grads
            })
        })
    }
}
