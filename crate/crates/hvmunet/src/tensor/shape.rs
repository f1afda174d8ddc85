//! Shape bookkeeping shared by the kernels: row-major strides, right-aligned
//! broadcasting, and odometer walks for strided gather/scatter.

use super::Scalar;

pub fn numel(shape: &[usize]) -> usize {
    shape.iter().product()
}

/// Row-major strides, innermost dimension contiguous.
pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![0usize; shape.len()];
    let mut acc = 1usize;
    for i in (0..shape.len()).rev() {
        s[i] = acc;
        acc *= shape[i];
    }
    s
}

/// Right-aligned broadcast of two shapes. Missing leading dimensions count as
/// size 1. Panics naming the operation and both shapes on a mismatch.
pub fn broadcast_shape(op: &str, a: &[usize], b: &[usize]) -> Vec<usize> {
    let rank = a.len().max(b.len());
    let mut out = vec![0usize; rank];
    for i in 0..rank {
        let da = dim_or_one(a, rank, i);
        let db = dim_or_one(b, rank, i);
        out[i] = if da == db {
            da
        } else if da == 1 {
            db
        } else if db == 1 {
            da
        } else {
            panic!("{op}: cannot broadcast shape {a:?} with {b:?}");
        };
    }
    out
}

fn dim_or_one(shape: &[usize], rank: usize, i: usize) -> usize {
    let pad = rank - shape.len();
    if i < pad {
        1
    } else {
        shape[i - pad]
    }
}

/// Strides for reading a tensor of `shape` as if broadcast to `out`
/// (same rank as `out` after left padding; broadcast dimensions get stride 0).
pub fn broadcast_strides(shape: &[usize], out: &[usize]) -> Vec<usize> {
    let raw = strides(shape);
    let pad = out.len() - shape.len();
    let mut s = vec![0usize; out.len()];
    for i in pad..out.len() {
        if shape[i - pad] != 1 {
            s[i] = raw[i - pad];
        }
    }
    s
}

/// Elementwise combine with implicit broadcasting; returns data and shape.
pub fn zip_broadcast<T: Scalar>(
    op: &str,
    a: &[T],
    a_shape: &[usize],
    b: &[T],
    b_shape: &[usize],
    f: impl Fn(T, T) -> T,
) -> (Vec<T>, Vec<usize>) {
    if a_shape == b_shape {
        let out = a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect();
        return (out, a_shape.to_vec());
    }
    let out_shape = broadcast_shape(op, a_shape, b_shape);
    let n = numel(&out_shape);
    let sa = broadcast_strides(a_shape, &out_shape);
    let sb = broadcast_strides(b_shape, &out_shape);
    let rank = out_shape.len();
    let mut idx = vec![0usize; rank];
    let (mut oa, mut ob) = (0usize, 0usize);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(f(a[oa], b[ob]));
        for d in (0..rank).rev() {
            idx[d] += 1;
            oa += sa[d];
            ob += sb[d];
            if idx[d] < out_shape[d] {
                break;
            }
            idx[d] = 0;
            oa -= sa[d] * out_shape[d];
            ob -= sb[d] * out_shape[d];
        }
    }
    (out, out_shape)
}

/// Walks the broadcast output like [`zip_broadcast`] but hands the closure
/// both input values plus the flat output index; used by binary backwards.
pub fn visit_broadcast<T: Scalar>(
    a: &[T],
    a_shape: &[usize],
    b: &[T],
    b_shape: &[usize],
    out_shape: &[usize],
    mut f: impl FnMut(usize, T, T),
) {
    let n = numel(out_shape);
    if a_shape == b_shape {
        for i in 0..n {
            f(i, a[i], b[i]);
        }
        return;
    }
    let sa = broadcast_strides(a_shape, out_shape);
    let sb = broadcast_strides(b_shape, out_shape);
    let rank = out_shape.len();
    let mut idx = vec![0usize; rank];
    let (mut oa, mut ob) = (0usize, 0usize);
    for i in 0..n {
        f(i, a[oa], b[ob]);
        for d in (0..rank).rev() {
            idx[d] += 1;
            oa += sa[d];
            ob += sb[d];
            if idx[d] < out_shape[d] {
                break;
            }
            idx[d] = 0;
            oa -= sa[d] * out_shape[d];
            ob -= sb[d] * out_shape[d];
        }
    }
}

/// Sum `grad` (laid out as `from`) down to `to`, undoing an implicit
/// broadcast. `to` must broadcast to `from`.
pub fn reduce_to_shape<T: Scalar>(grad: &[T], from: &[usize], to: &[usize]) -> Vec<T> {
    if from == to {
        return grad.to_vec();
    }
    let mut out = vec![T::zero(); numel(to)];
    let st = broadcast_strides(to, from);
    let rank = from.len();
    let mut idx = vec![0usize; rank];
    let mut off = 0usize;
    for &g in grad {
        out[off] = out[off] + g;
        for d in (0..rank).rev() {
            idx[d] += 1;
            off += st[d];
            if idx[d] < from[d] {
                break;
            }
            idx[d] = 0;
            off -= st[d] * from[d];
        }
    }
    out
}

/// Materialize a strided view: walk `out_shape` reading `src` at
/// `base + Σ idx[d]·stride[d]`. Negative strides express flips.
pub fn gather<T: Copy>(src: &[T], out_shape: &[usize], stride: &[isize], base: isize) -> Vec<T> {
    let n = numel(out_shape);
    let rank = out_shape.len();
    let mut idx = vec![0usize; rank];
    let mut off = base;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(src[off as usize]);
        for d in (0..rank).rev() {
            idx[d] += 1;
            off += stride[d];
            if idx[d] < out_shape[d] {
                break;
            }
            idx[d] = 0;
            off -= stride[d] * out_shape[d] as isize;
        }
    }
    out
}

/// Adjoint of [`gather`]: accumulate `grad` into `dst` through the same map.
pub fn scatter_add<T: Scalar>(
    dst: &mut [T],
    grad: &[T],
    out_shape: &[usize],
    stride: &[isize],
    base: isize,
) {
    let rank = out_shape.len();
    let mut idx = vec![0usize; rank];
    let mut off = base;
    for &g in grad {
        let o = off as usize;
        dst[o] = dst[o] + g;
        for d in (0..rank).rev() {
            idx[d] += 1;
            off += stride[d];
            if idx[d] < out_shape[d] {
                break;
            }
            idx[d] = 0;
            off -= stride[d] * out_shape[d] as isize;
        }
    }
}
