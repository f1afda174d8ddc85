use crate::tensor::{Scalar, Tensor};

// a: (r, k) row-major, b: (k, n) -> (r, n)
fn mm<T: Scalar>(a: &[T], b: &[T], r: usize, k: usize, n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); r * n];
    for i in 0..r {
        let a_row = &a[i * k..(i + 1) * k];
        let o_row = &mut out[i * n..(i + 1) * n];
        for (kk, &av) in a_row.iter().enumerate() {
            let b_row = &b[kk * n..(kk + 1) * n];
            for (o, &bv) in o_row.iter_mut().zip(b_row) {
                *o = *o + av * bv;
            }
        }
    }
    out
}

// a: (r, n), b: (k, n) -> a b^T: (r, k)
fn mm_nt<T: Scalar>(a: &[T], b: &[T], r: usize, n: usize, k: usize) -> Vec<T> {
    let mut out = vec![T::zero(); r * k];
    for i in 0..r {
        let a_row = &a[i * n..(i + 1) * n];
        for kk in 0..k {
            let b_row = &b[kk * n..(kk + 1) * n];
            let mut acc = T::zero();
            for (&av, &bv) in a_row.iter().zip(b_row) {
                acc = acc + av * bv;
            }
            out[i * k + kk] = acc;
        }
    }
    out
}

// a: (r, k), b: (r, n) -> a^T b: (k, n)
fn mm_tn<T: Scalar>(a: &[T], b: &[T], r: usize, k: usize, n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); k * n];
    for i in 0..r {
        let a_row = &a[i * k..(i + 1) * k];
        let b_row = &b[i * n..(i + 1) * n];
        for (kk, &av) in a_row.iter().enumerate() {
            let o_row = &mut out[kk * n..(kk + 1) * n];
            for (o, &bv) in o_row.iter_mut().zip(b_row) {
                *o = *o + av * bv;
            }
        }
    }
    out
}

impl<T: Scalar> Tensor<T> {
    /// (..., k) @ (k, n) -> (..., n). Leading dimensions of the left operand
    /// are flattened into rows; the right operand must be a 2-d matrix.
    pub fn matmul(&self, rhs: &Tensor<T>) -> Tensor<T> {
        assert_eq!(
            rhs.rank(),
            2,
            "matmul: rhs must be 2-d, got shape {:?}",
            rhs.shape()
        );
        assert!(
            self.rank() >= 1,
            "matmul: lhs must have rank >= 1, got shape {:?}",
            self.shape()
        );
        let k = *self.shape().last().unwrap();
        let (rk, n) = (rhs.shape()[0], rhs.shape()[1]);
        assert_eq!(
            k,
            rk,
            "matmul: inner dimensions disagree, lhs {:?} vs rhs {:?}",
            self.shape(),
            rhs.shape()
        );
        let r = self.numel() / k;
        let out = mm(&self.data(), &rhs.data(), r, k, n);
        let mut out_shape = self.shape()[..self.rank() - 1].to_vec();
        out_shape.push(n);
        Tensor::from_op(
            out,
            out_shape,
            vec![self.clone(), rhs.clone()],
            "matmul",
            || {
                Box::new(move |out, g| {
                    let node = out.node().unwrap();
                    let (a, b) = (&node.parents[0], &node.parents[1]);
                    let ga = a
                        .requires_grad()
                        .then(|| mm_nt(g, &b.data(), r, n, k));
                    let gb = b
                        .requires_grad()
                        .then(|| mm_tn(&a.data(), g, r, k, n));
                    vec![ga, gb]
                })
            },
        )
    }
}
