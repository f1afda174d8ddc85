use crate::tensor::shape::{reduce_to_shape, visit_broadcast, zip_broadcast};
use crate::tensor::{Scalar, Tensor};

/// Numerically stable softplus: ln(1 + e^x) without overflow for large |x|.
pub(crate) fn softplus_val<T: Scalar>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

/// Numerically stable logistic sigmoid.
pub(crate) fn sigmoid_val<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        (T::one() + (-x).exp()).recip()
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// (e^z - 1) / z, the zero-order-hold gain factor. Below |z| = 1e-5 the
/// truncated series 1 + z/2 + z^2/6 replaces the direct quotient, whose
/// cancellation error would dominate there.
pub(crate) fn expm1_over_x_val<T: Scalar>(z: T) -> T {
    if z.abs().to_f64() < 1e-5 {
        let half = T::from_f64(0.5);
        let sixth = T::from_f64(1.0 / 6.0);
        T::one() + z * half + z * z * sixth
    } else {
        z.exp_m1() / z
    }
}

/// d/dz of [`expm1_over_x_val`], with a matching series branch.
pub(crate) fn expm1_over_x_grad<T: Scalar>(z: T) -> T {
    if z.abs().to_f64() < 1e-5 {
        let third = T::from_f64(1.0 / 3.0);
        let eighth = T::from_f64(0.125);
        T::from_f64(0.5) + z * third + z * z * eighth
    } else {
        let ez = z.exp();
        (ez * (z - T::one()) + T::one()) / (z * z)
    }
}

fn gelu_val<T: Scalar>(x: T) -> T {
    // tanh form: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3)))
    let c = T::from_f64(0.797_884_560_802_865_4);
    let k = T::from_f64(0.044715);
    let u = c * (x + k * x * x * x);
    T::from_f64(0.5) * x * (T::one() + u.tanh())
}

fn gelu_grad<T: Scalar>(x: T) -> T {
    let c = T::from_f64(0.797_884_560_802_865_4);
    let k = T::from_f64(0.044715);
    let three = T::from_f64(3.0);
    let half = T::from_f64(0.5);
    let u = c * (x + k * x * x * x);
    let t = u.tanh();
    let du = c * (T::one() + three * k * x * x);
    half * (T::one() + t) + half * x * (T::one() - t * t) * du
}

/// Unary op whose local derivative is a function of input and output values.
fn unary_op<T: Scalar>(
    x: &Tensor<T>,
    name: &'static str,
    f: fn(T) -> T,
    df: fn(T, T) -> T,
) -> Tensor<T> {
    let out: Vec<T> = x.data().iter().map(|&v| f(v)).collect();
    Tensor::from_op(out, x.shape().to_vec(), vec![x.clone()], name, || {
        Box::new(move |out, g| {
            let node = out.node().unwrap();
            let xd = node.parents[0].data();
            let yd = out.data();
            let gx = g
                .iter()
                .zip(xd.iter().zip(yd.iter()))
                .map(|(&gi, (&xv, &yv))| gi * df(xv, yv))
                .collect();
            vec![Some(gx)]
        })
    })
}

/// Broadcasting binary op; `dfa`/`dfb` are the local partials at (a, b).
fn binary_op<T: Scalar>(
    a: &Tensor<T>,
    b: &Tensor<T>,
    name: &'static str,
    f: fn(T, T) -> T,
    dfa: fn(T, T) -> T,
    dfb: fn(T, T) -> T,
) -> Tensor<T> {
    let (out, out_shape) = zip_broadcast(name, &a.data(), a.shape(), &b.data(), b.shape(), f);
    Tensor::from_op(
        out,
        out_shape.clone(),
        vec![a.clone(), b.clone()],
        name,
        || {
            Box::new(move |out, g| {
                let node = out.node().unwrap();
                let (pa, pb) = (&node.parents[0], &node.parents[1]);
                let want_a = pa.requires_grad();
                let want_b = pb.requires_grad();
                let mut ga = want_a.then(|| vec![T::zero(); g.len()]);
                let mut gb = want_b.then(|| vec![T::zero(); g.len()]);
                visit_broadcast(
                    &pa.data(),
                    pa.shape(),
                    &pb.data(),
                    pb.shape(),
                    &out_shape,
                    |i, av, bv| {
                        if let Some(ga) = ga.as_mut() {
                            ga[i] = g[i] * dfa(av, bv);
                        }
                        if let Some(gb) = gb.as_mut() {
                            gb[i] = g[i] * dfb(av, bv);
                        }
                    },
                );
                vec![
                    ga.map(|v| reduce_to_shape(&v, &out_shape, pa.shape())),
                    gb.map(|v| reduce_to_shape(&v, &out_shape, pb.shape())),
                ]
            })
        },
    )
}

impl<T: Scalar> Tensor<T> {
    pub fn add(&self, rhs: &Tensor<T>) -> Tensor<T> {
        binary_op(self, rhs, "add", |a, b| a + b, |_, _| T::one(), |_, _| T::one())
    }

    pub fn sub(&self, rhs: &Tensor<T>) -> Tensor<T> {
        binary_op(self, rhs, "sub", |a, b| a - b, |_, _| T::one(), |_, _| -T::one())
    }

    pub fn mul(&self, rhs: &Tensor<T>) -> Tensor<T> {
        binary_op(self, rhs, "mul", |a, b| a * b, |_, b| b, |a, _| a)
    }

    pub fn div(&self, rhs: &Tensor<T>) -> Tensor<T> {
        binary_op(
            self,
            rhs,
            "div",
            |a, b| a / b,
            |_, b| b.recip(),
            |a, b| -a / (b * b),
        )
    }

    pub fn neg(&self) -> Tensor<T> {
        unary_op(self, "neg", |x| -x, |_, _| -T::one())
    }

    pub fn exp(&self) -> Tensor<T> {
        unary_op(self, "exp", |x| x.exp(), |_, y| y)
    }

    pub fn ln(&self) -> Tensor<T> {
        unary_op(self, "ln", |x| x.ln(), |x, _| x.recip())
    }

    pub fn sqrt(&self) -> Tensor<T> {
        unary_op(
            self,
            "sqrt",
            |x| x.sqrt(),
            |_, y| (T::from_f64(2.0) * y).recip(),
        )
    }

    pub fn recip(&self) -> Tensor<T> {
        unary_op(self, "recip", |x| x.recip(), |_, y| -y * y)
    }

    pub fn softplus(&self) -> Tensor<T> {
        unary_op(self, "softplus", softplus_val, |x, _| sigmoid_val(x))
    }

    pub fn sigmoid(&self) -> Tensor<T> {
        unary_op(self, "sigmoid", sigmoid_val, |_, y| y * (T::one() - y))
    }

    pub fn silu(&self) -> Tensor<T> {
        unary_op(
            self,
            "silu",
            |x| x * sigmoid_val(x),
            |x, _| {
                let s = sigmoid_val(x);
                s + x * s * (T::one() - s)
            },
        )
    }

    /// GELU, tanh approximation.
    pub fn gelu(&self) -> Tensor<T> {
        unary_op(self, "gelu", gelu_val, |x, _| gelu_grad(x))
    }

    /// Elementwise (e^x - 1)/x with a series branch near zero.
    pub fn expm1_over_x(&self) -> Tensor<T> {
        unary_op(self, "expm1_over_x", expm1_over_x_val, |x, _| {
            expm1_over_x_grad(x)
        })
    }

    /// Clamp into [lo, hi]; gradient passes through inside the interval
    /// (bounds inclusive) and is zero outside.
    pub fn clamp(&self, lo: T, hi: T) -> Tensor<T> {
        assert!(lo <= hi, "clamp: lo {lo} exceeds hi {hi}");
        let out: Vec<T> = self.data().iter().map(|&v| v.max(lo).min(hi)).collect();
        Tensor::from_op(
            out,
            self.shape().to_vec(),
            vec![self.clone()],
            "clamp",
            || {
                Box::new(move |out, g| {
                    let node = out.node().unwrap();
                    let xd = node.parents[0].data();
                    let gx = g
                        .iter()
                        .zip(xd.iter())
                        .map(|(&gi, &xv)| {
                            if xv >= lo && xv <= hi {
                                gi
                            } else {
                                T::zero()
                            }
                        })
                        .collect();
                    vec![Some(gx)]
                })
            },
        )
    }

    pub fn add_scalar(&self, c: T) -> Tensor<T> {
        let out: Vec<T> = self.data().iter().map(|&v| v + c).collect();
        Tensor::from_op(
            out,
            self.shape().to_vec(),
            vec![self.clone()],
            "add_scalar",
            || Box::new(move |_, g| vec![Some(g.to_vec())]),
        )
    }

    pub fn mul_scalar(&self, c: T) -> Tensor<T> {
        let out: Vec<T> = self.data().iter().map(|&v| v * c).collect();
        Tensor::from_op(
            out,
            self.shape().to_vec(),
            vec![self.clone()],
            "mul_scalar",
            || Box::new(move |_, g| vec![Some(g.iter().map(|&gi| gi * c).collect())]),
        )
    }

    /// c - x, elementwise.
    pub fn sub_from_scalar(&self, c: T) -> Tensor<T> {
        let out: Vec<T> = self.data().iter().map(|&v| c - v).collect();
        Tensor::from_op(
            out,
            self.shape().to_vec(),
            vec![self.clone()],
            "sub_from_scalar",
            || Box::new(move |_, g| vec![Some(g.iter().map(|&gi| -gi).collect())]),
        )
    }
}
