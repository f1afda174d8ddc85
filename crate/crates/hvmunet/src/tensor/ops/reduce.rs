use crate::tensor::{Scalar, Tensor};

fn axis_dims(shape: &[usize], axis: usize) -> (usize, usize, usize) {
    let outer: usize = shape[..axis].iter().product();
    let len = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    (outer, len, inner)
}

fn reduced_shape(shape: &[usize], axis: usize, keepdim: bool) -> Vec<usize> {
    let mut out = shape.to_vec();
    if keepdim {
        out[axis] = 1;
    } else {
        out.remove(axis);
    }
    out
}

impl<T: Scalar> Tensor<T> {
    pub fn sum_axis(&self, axis: usize, keepdim: bool) -> Tensor<T> {
        assert!(
            axis < self.rank(),
            "sum_axis: axis {axis} out of range for shape {:?}",
            self.shape()
        );
        let (outer, len, inner) = axis_dims(self.shape(), axis);
        let data = self.data();
        let mut out = vec![T::zero(); outer * inner];
        for o in 0..outer {
            for l in 0..len {
                let base = (o * len + l) * inner;
                let dst = &mut out[o * inner..(o + 1) * inner];
                for (d, &v) in dst.iter_mut().zip(&data[base..base + inner]) {
                    *d = *d + v;
                }
            }
        }
        drop(data);
        let shape = reduced_shape(self.shape(), axis, keepdim);
        Tensor::from_op(out, shape, vec![self.clone()], "sum_axis", || {
            Box::new(move |_, g| {
                let mut gx = vec![T::zero(); outer * len * inner];
                for o in 0..outer {
                    let src = &g[o * inner..(o + 1) * inner];
                    for l in 0..len {
                        let base = (o * len + l) * inner;
                        gx[base..base + inner].copy_from_slice(src);
                    }
                }
                vec![Some(gx)]
            })
        })
    }

    pub fn mean_axis(&self, axis: usize, keepdim: bool) -> Tensor<T> {
        let len = self.shape()[axis];
        self.sum_axis(axis, keepdim)
            .mul_scalar(T::from_usize(len).recip())
    }

    /// Maximum along one axis; ties resolve to the first occurrence, which
    /// also receives the full gradient.
    pub fn max_axis(&self, axis: usize, keepdim: bool) -> Tensor<T> {
        assert!(
            axis < self.rank(),
            "max_axis: axis {axis} out of range for shape {:?}",
            self.shape()
        );
        assert!(self.shape()[axis] > 0, "max_axis: empty axis {axis}");
        let (outer, len, inner) = axis_dims(self.shape(), axis);
        let data = self.data();
        let mut out = vec![T::zero(); outer * inner];
        let mut arg = vec![0usize; outer * inner];
        for o in 0..outer {
            for i in 0..inner {
                let mut best = data[o * len * inner + i];
                let mut best_l = 0;
                for l in 1..len {
                    let v = data[(o * len + l) * inner + i];
                    if v > best {
                        best = v;
                        best_l = l;
                    }
                }
                out[o * inner + i] = best;
                arg[o * inner + i] = best_l;
            }
        }
        drop(data);
        let shape = reduced_shape(self.shape(), axis, keepdim);
        Tensor::from_op(out, shape, vec![self.clone()], "max_axis", || {
            Box::new(move |_, g| {
                let mut gx = vec![T::zero(); outer * len * inner];
                for o in 0..outer {
                    for i in 0..inner {
                        let l = arg[o * inner + i];
                        gx[(o * len + l) * inner + i] = g[o * inner + i];
                    }
                }
                vec![Some(gx)]
            })
        })
    }

    /// Total sum as a rank-0 tensor.
    pub fn sum_all(&self) -> Tensor<T> {
        let total: T = self.data().iter().copied().sum();
        let n = self.numel();
        Tensor::from_op(vec![total], vec![], vec![self.clone()], "sum_all", || {
            Box::new(move |_, g| vec![Some(vec![g[0]; n])])
        })
    }

    /// Mean over all elements as a rank-0 tensor.
    pub fn mean_all(&self) -> Tensor<T> {
        let n = self.numel();
        assert!(n > 0, "mean_all: empty tensor");
        self.sum_all().mul_scalar(T::from_usize(n).recip())
    }
}
