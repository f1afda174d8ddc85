use crate::tensor::shape::{gather, numel, scatter_add, strides};
use crate::tensor::{Scalar, Tensor};

impl<T: Scalar> Tensor<T> {
    /// Same elements, new shape. Shares the underlying buffer (row-major
    /// layout is unchanged); the graph records a pass-through node.
    pub fn reshape(&self, new_shape: &[usize]) -> Tensor<T> {
        assert_eq!(
            self.numel(),
            numel(new_shape),
            "reshape: cannot reshape {:?} into {:?}",
            self.shape(),
            new_shape
        );
        let shared = self.view_leaf(new_shape.to_vec());
        Tensor::from_op_shared(shared, vec![self.clone()], "reshape", || {
            Box::new(move |_, g| vec![Some(g.to_vec())])
        })
    }

    /// Reorder axes; `perm` must be a permutation of 0..rank.
    pub fn permute(&self, perm: &[usize]) -> Tensor<T> {
        let rank = self.rank();
        assert_eq!(
            perm.len(),
            rank,
            "permute: perm {perm:?} does not match shape {:?}",
            self.shape()
        );
        let mut seen = vec![false; rank];
        for &p in perm {
            assert!(
                p < rank && !seen[p],
                "permute: {perm:?} is not a permutation of 0..{rank}"
            );
            seen[p] = true;
        }
        let st = strides(self.shape());
        let out_shape: Vec<usize> = perm.iter().map(|&p| self.shape()[p]).collect();
        let out_strides: Vec<isize> = perm.iter().map(|&p| st[p] as isize).collect();
        let out = gather(&self.data(), &out_shape, &out_strides, 0);
        let n_in = self.numel();
        let bw_shape = out_shape.clone();
        Tensor::from_op(out, out_shape, vec![self.clone()], "permute", || {
            Box::new(move |_, g| {
                let mut gx = vec![T::zero(); n_in];
                scatter_add(&mut gx, g, &bw_shape, &out_strides, 0);
                vec![Some(gx)]
            })
        })
    }

    /// Swap two axes.
    pub fn swap_axes(&self, a: usize, b: usize) -> Tensor<T> {
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        perm.swap(a, b);
        self.permute(&perm)
    }

    /// Reverse order along one axis.
    pub fn flip(&self, axis: usize) -> Tensor<T> {
        assert!(
            axis < self.rank(),
            "flip: axis {axis} out of range for shape {:?}",
            self.shape()
        );
        let st = strides(self.shape());
        let mut out_strides: Vec<isize> = st.iter().map(|&s| s as isize).collect();
        let base = (self.shape()[axis] - 1) as isize * out_strides[axis];
        out_strides[axis] = -out_strides[axis];
        let out_shape = self.shape().to_vec();
        let out = gather(&self.data(), &out_shape, &out_strides, base);
        let n_in = self.numel();
        let bw_shape = out_shape.clone();
        Tensor::from_op(out, out_shape, vec![self.clone()], "flip", || {
            Box::new(move |_, g| {
                let mut gx = vec![T::zero(); n_in];
                scatter_add(&mut gx, g, &bw_shape, &out_strides, base);
                vec![Some(gx)]
            })
        })
    }

    /// Contiguous sub-range along one axis.
    pub fn narrow(&self, axis: usize, start: usize, len: usize) -> Tensor<T> {
        assert!(
            axis < self.rank() && start + len <= self.shape()[axis],
            "narrow: range {start}..{} out of bounds on axis {axis} of shape {:?}",
            start + len,
            self.shape()
        );
        let st = strides(self.shape());
        let out_strides: Vec<isize> = st.iter().map(|&s| s as isize).collect();
        let base = (start * st[axis]) as isize;
        let mut out_shape = self.shape().to_vec();
        out_shape[axis] = len;
        let out = gather(&self.data(), &out_shape, &out_strides, base);
        let n_in = self.numel();
        let bw_shape = out_shape.clone();
        Tensor::from_op(out, out_shape, vec![self.clone()], "narrow", || {
            Box::new(move |_, g| {
                let mut gx = vec![T::zero(); n_in];
                scatter_add(&mut gx, g, &bw_shape, &out_strides, base);
                vec![Some(gx)]
            })
        })
    }

    /// Split along `axis` into consecutive chunks of the given sizes.
    pub fn split(&self, axis: usize, sizes: &[usize]) -> Vec<Tensor<T>> {
        let total: usize = sizes.iter().sum();
        assert_eq!(
            total,
            self.shape().get(axis).copied().unwrap_or(0),
            "split: sizes {sizes:?} do not cover axis {axis} of shape {:?}",
            self.shape()
        );
        let mut parts = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &len in sizes {
            parts.push(self.narrow(axis, start, len));
            start += len;
        }
        parts
    }

    /// Materialize a broadcast of this tensor to `target` (right-aligned).
    pub fn broadcast_to(&self, target: &[usize]) -> Tensor<T> {
        let out_shape =
            crate::tensor::shape::broadcast_shape("broadcast_to", self.shape(), target);
        assert_eq!(
            out_shape, target,
            "broadcast_to: {:?} does not broadcast to {:?}",
            self.shape(),
            target
        );
        let bst = crate::tensor::shape::broadcast_strides(self.shape(), target);
        let out_strides: Vec<isize> = bst.iter().map(|&s| s as isize).collect();
        let out = gather(&self.data(), target, &out_strides, 0);
        let from = target.to_vec();
        let to = self.shape().to_vec();
        Tensor::from_op(
            out,
            target.to_vec(),
            vec![self.clone()],
            "broadcast_to",
            || {
                Box::new(move |_, g| {
                    vec![Some(crate::tensor::shape::reduce_to_shape(&g.to_vec(), &from, &to))]
                })
            },
        )
    }
}

/// Join tensors along `axis`; all other dimensions must agree.
pub fn concat<T: Scalar>(axis: usize, parts: &[&Tensor<T>]) -> Tensor<T> {
    assert!(!parts.is_empty(), "concat: no inputs");
    let rank = parts[0].rank();
    assert!(
        axis < rank,
        "concat: axis {axis} out of range for shape {:?}",
        parts[0].shape()
    );
    let mut out_shape = parts[0].shape().to_vec();
    let mut axis_total = 0;
    for p in parts {
        assert_eq!(p.rank(), rank, "concat: rank mismatch {:?}", p.shape());
        for d in 0..rank {
            if d != axis {
                assert_eq!(
                    p.shape()[d],
                    out_shape[d],
                    "concat: shapes {:?} and {:?} disagree off axis {axis}",
                    parts[0].shape(),
                    p.shape()
                );
            }
        }
        axis_total += p.shape()[axis];
    }
    out_shape[axis] = axis_total;

    let outer: usize = out_shape[..axis].iter().product();
    let inner: usize = out_shape[axis + 1..].iter().product();
    let mut out = Vec::with_capacity(numel(&out_shape));
    let datas: Vec<_> = parts.iter().map(|p| p.data()).collect();
    for o in 0..outer {
        for (p, d) in parts.iter().zip(&datas) {
            let block = p.shape()[axis] * inner;
            out.extend_from_slice(&d[o * block..(o + 1) * block]);
        }
    }
    drop(datas);

    let sizes: Vec<usize> = parts.iter().map(|p| p.shape()[axis]).collect();
    let parents: Vec<Tensor<T>> = parts.iter().map(|&p| p.clone()).collect();
    Tensor::from_op(out, out_shape, parents, "concat", || {
        Box::new(move |out, g| {
            let node = out.node().unwrap();
            let inner = inner;
            let mut grads: Vec<Option<Vec<T>>> = node
                .parents
                .iter()
                .map(|p| Some(Vec::with_capacity(p.numel())))
                .collect();
            let total_block: usize = sizes.iter().sum::<usize>() * inner;
            for o in 0..outer {
                let mut off = o * total_block;
                for (gi, &sz) in grads.iter_mut().zip(&sizes) {
                    let block = sz * inner;
                    gi.as_mut()
                        .unwrap()
                        .extend_from_slice(&g[off..off + block]);
                    off += block;
                }
            }
            grads
        })
    })
}
