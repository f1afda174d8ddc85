//! The fused recurrence kernel. Composing this out of elementwise graph ops
//! would record O(L) nodes per sequence; one fused node with an analytic
//! backward keeps graphs small and the reverse sweep O(B·L·D·N).

use crate::tensor::{Scalar, Tensor};

/// Linear state-space recurrence with per-step coefficients:
///
///   h[t] = a_bar[t] * h[t-1] + bx[t]        (h[-1] = 0, elementwise over (d, n))
///   y[t][d] = sum_n c[t][n] * h[t][d][n]
///
/// Shapes: `a_bar`, `bx`: (B, L, D, N); `c`: (B, L, N); output (B, L, D).
/// The full state trajectory is saved for the backward pass.
///
/// Backward, with G[t] = dL/dh[t] accumulated through later steps:
///   G[t]      = gy[t] ⊗ c[t] + a_bar[t+1] * G[t+1]
///   d a_bar[t] = G[t] * h[t-1]
///   d bx[t]    = G[t]
///   d c[t][n]  = sum_d gy[t][d] * h[t][d][n]
pub fn selective_scan<T: Scalar>(a_bar: &Tensor<T>, bx: &Tensor<T>, c: &Tensor<T>) -> Tensor<T> {
    assert_eq!(
        a_bar.rank(),
        4,
        "selective_scan: a_bar must be (B, L, D, N), got {:?}",
        a_bar.shape()
    );
    assert_eq!(
        a_bar.shape(),
        bx.shape(),
        "selective_scan: a_bar {:?} and bx {:?} disagree",
        a_bar.shape(),
        bx.shape()
    );
    let (b, l, d, n) = (
        a_bar.shape()[0],
        a_bar.shape()[1],
        a_bar.shape()[2],
        a_bar.shape()[3],
    );
    assert!(l > 0, "selective_scan: empty sequence (L = 0)");
    assert_eq!(
        c.shape(),
        &[b, l, n],
        "selective_scan: c shape {:?} does not match (B, L, N) = ({b}, {l}, {n})",
        c.shape()
    );

    let av = a_bar.data();
    let bv = bx.data();
    let cv = c.data();
    let mut h = vec![T::zero(); b * l * d * n];
    let mut y = vec![T::zero(); b * l * d];
    let step = d * n;
    for bi in 0..b {
        for t in 0..l {
            let base = (bi * l + t) * step;
            let c_base = (bi * l + t) * n;
            for di in 0..d {
                let row = base + di * n;
                let mut acc = T::zero();
                if t == 0 {
                    for ni in 0..n {
                        let hv = bv[row + ni];
                        h[row + ni] = hv;
                        acc = acc + cv[c_base + ni] * hv;
                    }
                } else {
                    let prev = row - step;
                    for ni in 0..n {
                        let hv = av[row + ni] * h[prev + ni] + bv[row + ni];
                        h[row + ni] = hv;
                        acc = acc + cv[c_base + ni] * hv;
                    }
                }
                y[(bi * l + t) * d + di] = acc;
            }
        }
    }
    drop(av);
    drop(bv);
    drop(cv);

    Tensor::from_op(
        y,
        vec![b, l, d],
        vec![a_bar.clone(), bx.clone(), c.clone()],
        "selective_scan",
        move || {
            Box::new(move |out, g| {
                let node = out.node().unwrap();
                let (at, _bt, ct) = (&node.parents[0], &node.parents[1], &node.parents[2]);
                let av = at.data();
                let cv = ct.data();
                let mut ga = vec![T::zero(); b * l * step];
                let mut gbx = vec![T::zero(); b * l * step];
                let mut gc = vec![T::zero(); b * l * n];
                // carry[d][n] = a_bar[t+1] * G[t+1], zero at the last step
                let mut carry = vec![T::zero(); step];
                for bi in 0..b {
                    carry.iter_mut().for_each(|v| *v = T::zero());
                    for t in (0..l).rev() {
                        let base = (bi * l + t) * step;
                        let c_base = (bi * l + t) * n;
                        for di in 0..d {
                            let row = base + di * n;
                            let gy = g[(bi * l + t) * d + di];
                            for ni in 0..n {
                                let idx = row + ni;
                                let g_h = gy * cv[c_base + ni] + carry[di * n + ni];
                                gc[c_base + ni] = gc[c_base + ni] + gy * h[idx];
                                if t > 0 {
                                    ga[idx] = g_h * h[idx - step];
                                }
                                gbx[idx] = g_h;
                                carry[di * n + ni] = av[idx] * g_h;
                            }
                        }
                    }
                }
                vec![Some(ga), Some(gbx), Some(gc)]
            })
        },
    )
}
