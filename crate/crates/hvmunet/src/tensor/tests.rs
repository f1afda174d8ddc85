use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gradcheck::{check_gradients, projection, weighted_sum, SamplePlan, MODULE_TOL};
use crate::tensor::ops::{apply_named, concat, selective_scan, Conv2dSpec};
use crate::tensor::{grad_enabled, no_grad, Tape, Tensor};

fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
    assert_eq!(actual.len(), expected.len(), "length mismatch");
    for (i, (&a, &e)) in actual.iter().zip(expected).enumerate() {
        assert!(
            (a - e).abs() <= tol,
            "index {i}: got {a}, expected {e} (tol {tol})"
        );
    }
}

fn randn_tensor(shape: &[usize], seed: u64) -> Tensor<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = shape.iter().product();
    Tensor::param((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(), shape)
}

#[test]
fn mul_elementwise() {
    let a = Tensor::new(vec![1.0, 2.0], &[2]);
    let b = Tensor::new(vec![3.0, 4.0], &[2]);
    assert_eq!(a.mul(&b).to_vec(), vec![3.0, 8.0]);
}

#[test]
fn exp_of_zero_is_one() {
    let x = Tensor::new(vec![0.0], &[1]);
    assert_eq!(x.exp().to_vec(), vec![1.0]);
}

#[test]
fn matmul_ones_2x3_3x2() {
    let a: Tensor<f64> = Tensor::ones(&[2, 3]);
    let b = Tensor::ones(&[3, 2]);
    let y = a.matmul(&b);
    assert_eq!(y.shape(), &[2, 2]);
    assert_eq!(y.to_vec(), vec![3.0; 4]);
}

#[test]
fn matmul_matches_naive_loops() {
    let a = randn_tensor(&[4, 5], 1);
    let b = randn_tensor(&[5, 3], 2);
    let y = a.matmul(&b);
    let (av, bv) = (a.to_vec(), b.to_vec());
    for i in 0..4 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..5 {
                acc += av[i * 5 + k] * bv[k * 3 + j];
            }
            assert!((y.at(&[i, j]) - acc).abs() < 1e-12);
        }
    }
}

#[test]
fn matmul_flattens_leading_dims() {
    let a = randn_tensor(&[2, 3, 5], 3);
    let b = randn_tensor(&[5, 4], 4);
    let y = a.matmul(&b);
    assert_eq!(y.shape(), &[2, 3, 4]);
    let flat = a.reshape(&[6, 5]).matmul(&b);
    assert_eq!(y.to_vec(), flat.to_vec());
}

#[test]
fn conv2d_all_ones_window_counts() {
    // 3x3 ones image, 3x3 ones kernel, padding 1: each output counts the
    // valid neighborhood size.
    let x: Tensor<f64> = Tensor::ones(&[1, 1, 3, 3]);
    let w = Tensor::ones(&[1, 1, 3, 3]);
    let y = x.conv2d(&w, None, Conv2dSpec::same3x3());
    assert_eq!(y.shape(), &[1, 1, 3, 3]);
    let expected = vec![4.0, 6.0, 4.0, 6.0, 9.0, 6.0, 4.0, 6.0, 4.0];
    assert_eq!(y.to_vec(), expected);
}

#[test]
fn conv2d_identity_1x1() {
    let x = randn_tensor(&[2, 3, 4, 4], 5);
    // 1x1 weight = 3x3 channel identity
    let mut w = vec![0.0; 9];
    for c in 0..3 {
        w[c * 3 + c] = 1.0;
    }
    let wt = Tensor::new(w, &[3, 3, 1, 1]);
    let y = x.conv2d(&wt, None, Conv2dSpec::default());
    assert_eq!(y.to_vec(), x.to_vec());
}

#[test]
fn conv2d_preserves_size_with_same_padding() {
    let x: Tensor<f64> = Tensor::zeros(&[1, 2, 8, 8]);
    let w = Tensor::zeros(&[5, 2, 3, 3]);
    let y = x.conv2d(&w, None, Conv2dSpec::same3x3());
    assert_eq!(y.shape(), &[1, 5, 8, 8]);
}

#[test]
fn conv2d_dilation_reaches_farther() {
    // dilation 3, kernel 7 spans 19 pixels; padding 9 preserves extent
    let x: Tensor<f64> = Tensor::ones(&[1, 2, 16, 16]);
    let w = Tensor::ones(&[1, 2, 7, 7]);
    let spec = Conv2dSpec {
        padding: 9,
        dilation: 3,
        ..Default::default()
    };
    assert_eq!(x.conv2d(&w, None, spec).shape(), &[1, 1, 16, 16]);
}

#[test]
fn conv2d_depthwise_groups() {
    let x = randn_tensor(&[1, 2, 3, 3], 6);
    // one 1x1 kernel per channel, scaling channel 0 by 2 and channel 1 by 3
    let w = Tensor::new(vec![2.0, 3.0], &[2, 1, 1, 1]);
    let spec = Conv2dSpec {
        groups: 2,
        ..Default::default()
    };
    let y = x.conv2d(&w, None, spec);
    let xv = x.to_vec();
    let yv = y.to_vec();
    for i in 0..9 {
        assert!((yv[i] - 2.0 * xv[i]).abs() < 1e-12);
        assert!((yv[9 + i] - 3.0 * xv[9 + i]).abs() < 1e-12);
    }
}

#[test]
#[should_panic(expected = "conv2d")]
fn conv2d_rejects_group_channel_mismatch() {
    let x: Tensor<f64> = Tensor::zeros(&[1, 3, 4, 4]);
    let w = Tensor::zeros(&[2, 3, 1, 1]);
    let spec = Conv2dSpec {
        groups: 2,
        ..Default::default()
    };
    let _ = x.conv2d(&w, None, spec);
}

#[test]
fn layer_norm_constant_row_maps_to_beta() {
    let x: Tensor<f64> = Tensor::ones(&[1, 3]);
    let gamma = Tensor::ones(&[3]);
    let beta = Tensor::zeros(&[3]);
    let y = x.layer_norm(&gamma, &beta, 1e-6);
    assert_close(&y.to_vec(), &[0.0, 0.0, 0.0], 1e-12);
}

#[test]
fn layer_norm_two_point_row() {
    let x = Tensor::new(vec![-1.0, 1.0], &[1, 2]);
    let gamma = Tensor::ones(&[2]);
    let beta = Tensor::zeros(&[2]);
    let y = x.layer_norm(&gamma, &beta, 1e-6);
    assert_close(&y.to_vec(), &[-1.0, 1.0], 1e-5);
}

#[test]
fn layer_norm_gamma_zero_beta_five() {
    let x = Tensor::new(vec![0.3, -2.0, 9.1], &[1, 3]);
    let gamma = Tensor::zeros(&[3]);
    let beta = Tensor::full(&[3], 5.0);
    let y = x.layer_norm(&gamma, &beta, 1e-6);
    assert_close(&y.to_vec(), &[5.0, 5.0, 5.0], 1e-12);
}

#[test]
fn backward_sum_of_squares() {
    let x = Tensor::param(vec![1.0, 2.0], &[2]);
    x.mul(&x).sum_all().backward();
    assert_eq!(x.grad().unwrap(), vec![2.0, 4.0]);
}

#[test]
fn backward_sigmoid_at_zero() {
    let x = Tensor::param(vec![0.0], &[1]);
    x.sigmoid().sum_all().backward();
    assert_close(&x.grad().unwrap(), &[0.25], 1e-12);
}

#[test]
fn backward_accumulates_over_reuse() {
    let a = Tensor::param(vec![1.0, -2.0], &[2]);
    a.add(&a).sum_all().backward();
    assert_eq!(a.grad().unwrap(), vec![2.0, 2.0]);
}

#[test]
fn broadcast_binary_reduces_gradients() {
    // (2,3) + (3,) : the bias grad sums over rows
    let x = Tensor::param(vec![1.0; 6], &[2, 3]);
    let b = Tensor::param(vec![0.5, 0.5, 0.5], &[3]);
    x.add(&b).sum_all().backward();
    assert_eq!(x.grad().unwrap(), vec![1.0; 6]);
    assert_eq!(b.grad().unwrap(), vec![2.0; 3]);
}

#[test]
fn tape_is_topologically_sorted_and_reaches_exact_leaves() {
    let a = Tensor::param(vec![1.0, 2.0], &[2]);
    let b = Tensor::param(vec![9.0], &[1]); // requires grad but unused
    let c = Tensor::new(vec![3.0, 4.0], &[2]); // used but no grad wanted
    let loss = a.mul(&c).sum_all();
    let tape = Tape::trace(&loss);
    assert!(tape.is_topologically_sorted());
    assert!(tape.len() >= 3);
    loss.backward();
    assert_eq!(a.grad().unwrap(), vec![3.0, 4.0]);
    assert!(b.grad().is_none(), "unused leaf must stay untouched");
    assert!(c.grad().is_none(), "non-requires_grad leaf must stay untouched");
}

#[test]
fn no_grad_suppresses_recording() {
    let x = Tensor::param(vec![1.0], &[1]);
    let y = no_grad(|| x.exp());
    assert!(y.is_leaf());
    assert!(!y.requires_grad());
    assert!(grad_enabled(), "flag must be restored");
}

#[test]
fn detach_blocks_gradient_flow() {
    let x = Tensor::param(vec![2.0], &[1]);
    let y = x.exp().detach();
    let z = y.mul(&x).sum_all();
    z.backward();
    // only the direct x path contributes: d(e^2 * x)/dx = e^2
    assert_close(&x.grad().unwrap(), &[2.0f64.exp()], 1e-12);
}

#[test]
#[should_panic(expected = "backward: loss must be a scalar")]
fn backward_rejects_non_scalar() {
    let x = Tensor::param(vec![1.0, 2.0], &[2]);
    x.exp().backward();
}

#[test]
#[should_panic(expected = "cannot broadcast shape [2, 3] with [4]")]
fn binary_op_rejects_shape_mismatch() {
    let a: Tensor<f64> = Tensor::zeros(&[2, 3]);
    let b = Tensor::zeros(&[4]);
    let _ = a.add(&b);
}

#[test]
#[should_panic(expected = "matmul: inner dimensions disagree")]
fn matmul_rejects_inner_mismatch() {
    let a: Tensor<f64> = Tensor::zeros(&[2, 3]);
    let b = Tensor::zeros(&[4, 2]);
    let _ = a.matmul(&b);
}

#[test]
fn reshape_shares_and_grads_flow() {
    let x = Tensor::param(vec![1.0, 2.0, 3.0, 4.0], &[2, 2]);
    let y = x.reshape(&[4]);
    y.mul(&y).sum_all().backward();
    assert_eq!(x.grad().unwrap(), vec![2.0, 4.0, 6.0, 8.0]);
}

#[test]
fn permute_flip_narrow_match_naive() {
    let x = Tensor::new((0..24).map(|v| v as f64).collect(), &[2, 3, 4]);
    let p = x.permute(&[2, 0, 1]);
    assert_eq!(p.shape(), &[4, 2, 3]);
    for i in 0..4 {
        for j in 0..2 {
            for k in 0..3 {
                assert_eq!(p.at(&[i, j, k]), x.at(&[j, k, i]));
            }
        }
    }
    let f = x.flip(2);
    for i in 0..2 {
        for j in 0..3 {
            for k in 0..4 {
                assert_eq!(f.at(&[i, j, k]), x.at(&[i, j, 3 - k]));
            }
        }
    }
    let nrw = x.narrow(1, 1, 2);
    assert_eq!(nrw.shape(), &[2, 2, 4]);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..4 {
                assert_eq!(nrw.at(&[i, j, k]), x.at(&[i, j + 1, k]));
            }
        }
    }
}

#[test]
fn reduce_ops_match_naive() {
    let x = Tensor::new(vec![1.0, 5.0, 2.0, -1.0, 0.0, 7.0], &[2, 3]);
    assert_eq!(x.sum_axis(1, false).to_vec(), vec![8.0, 6.0]);
    assert_eq!(x.sum_axis(0, true).shape(), &[1, 3]);
    assert_eq!(x.sum_axis(0, true).to_vec(), vec![0.0, 5.0, 9.0]);
    assert_close(&x.mean_axis(1, false).to_vec(), &[8.0 / 3.0, 2.0], 1e-12);
    assert_eq!(x.max_axis(1, false).to_vec(), vec![5.0, 7.0]);
    assert_eq!(x.sum_all().item(), 14.0);
    assert!((x.mean_all().item() - 14.0 / 6.0).abs() < 1e-12);
}

#[test]
fn max_axis_ties_route_gradient_to_first() {
    let x = Tensor::param(vec![3.0, 3.0, 1.0], &[1, 3]);
    x.max_axis(1, false).sum_all().backward();
    assert_eq!(x.grad().unwrap(), vec![1.0, 0.0, 0.0]);
}

#[test]
fn max_pool_routes_gradient_to_argmax() {
    let x = Tensor::param(vec![1.0, 2.0, 4.0, 3.0], &[1, 1, 2, 2]);
    let y = x.max_pool2d(2, 2);
    assert_eq!(y.to_vec(), vec![4.0]);
    y.sum_all().backward();
    assert_eq!(x.grad().unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn upsample_nearest_replicates_blocks() {
    let x = Tensor::param(vec![1.0, 2.0, 3.0, 4.0], &[1, 1, 2, 2]);
    let y = x.upsample_nearest_2x();
    assert_eq!(y.shape(), &[1, 1, 4, 4]);
    assert_eq!(
        y.to_vec(),
        vec![1., 1., 2., 2., 1., 1., 2., 2., 3., 3., 4., 4., 3., 3., 4., 4.]
    );
    y.sum_all().backward();
    assert_eq!(x.grad().unwrap(), vec![4.0; 4]);
}

#[test]
fn clamp_masks_gradient_outside_bounds() {
    let x = Tensor::param(vec![-2.0, 0.5, 2.0], &[3]);
    x.clamp(0.0, 1.0).sum_all().backward();
    assert_eq!(x.grad().unwrap(), vec![0.0, 1.0, 0.0]);
}

#[test]
fn selective_scan_matches_reference_recurrence() {
    let (b, l, d, n) = (2, 5, 3, 4);
    let a_bar = randn_tensor(&[b, l, d, n], 10);
    let bx = randn_tensor(&[b, l, d, n], 11);
    let c = randn_tensor(&[b, l, n], 12);
    let y = selective_scan(&a_bar, &bx, &c);
    let (av, bv, cv) = (a_bar.to_vec(), bx.to_vec(), c.to_vec());
    for bi in 0..b {
        for di in 0..d {
            let mut h = vec![0.0f64; n];
            for t in 0..l {
                let mut acc = 0.0;
                for ni in 0..n {
                    let idx = ((bi * l + t) * d + di) * n + ni;
                    h[ni] = av[idx] * h[ni] + bv[idx];
                    acc += cv[(bi * l + t) * n + ni] * h[ni];
                }
                let got = y.at(&[bi, t, di]);
                assert!((got - acc).abs() < 1e-12, "y[{bi},{t},{di}]: {got} vs {acc}");
            }
        }
    }
}

#[test]
fn selective_scan_gradients_match_finite_differences() {
    let (b, l, d, n) = (1, 4, 2, 3);
    let a_bar = randn_tensor(&[b, l, d, n], 20);
    let bx = randn_tensor(&[b, l, d, n], 21);
    let c = randn_tensor(&[b, l, n], 22);
    let w = projection(&[b, l, d], 23);
    let params = vec![
        ("a_bar".into(), a_bar.clone()),
        ("bx".into(), bx.clone()),
        ("c".into(), c.clone()),
    ];
    let report = check_gradients(
        "selective_scan",
        &params,
        || weighted_sum(&selective_scan(&a_bar, &bx, &c), &w),
        SamplePlan::Exhaustive,
        MODULE_TOL,
        24,
    );
    assert!(report.passed(), "{}", report.line());
}

#[test]
#[should_panic(expected = "selective_scan: empty sequence")]
fn selective_scan_rejects_empty_sequence() {
    let a: Tensor<f64> = Tensor::zeros(&[1, 0, 2, 3]);
    let bx = Tensor::zeros(&[1, 0, 2, 3]);
    let c = Tensor::zeros(&[1, 0, 3]);
    let _ = selective_scan(&a, &bx, &c);
}

#[test]
fn composed_graph_gradients_match_finite_differences() {
    // matmul -> sigmoid -> layer_norm -> mul -> mean, all parameters probed
    let x = randn_tensor(&[2, 3], 30);
    let w = randn_tensor(&[3, 4], 31);
    let gamma = Tensor::param(vec![1.0, 0.9, 1.1, 1.2], &[4]);
    let beta = Tensor::param(vec![0.0, 0.1, -0.1, 0.2], &[4]);
    let proj = projection(&[2, 4], 32);
    let params = vec![
        ("x".into(), x.clone()),
        ("w".into(), w.clone()),
        ("gamma".into(), gamma.clone()),
        ("beta".into(), beta.clone()),
    ];
    let report = check_gradients(
        "composed_graph",
        &params,
        || {
            let y = x.matmul(&w).sigmoid().layer_norm(&gamma, &beta, 1e-6);
            weighted_sum(&y, &proj)
        },
        SamplePlan::Exhaustive,
        MODULE_TOL,
        33,
    );
    assert!(report.passed(), "{}", report.line());
}

#[test]
fn unary_gradients_match_finite_differences() {
    // one probe point per op, away from kinks and branch cuts
    let x = Tensor::param(vec![0.7, -0.4, 1.3, 0.05], &[4]);
    let pos = Tensor::param(vec![0.7, 0.4, 1.3, 0.05], &[4]); // for ln/sqrt
    let w = projection(&[4], 40);
    type OpFn = fn(&Tensor<f64>) -> Tensor<f64>;
    let any_domain: Vec<(&str, OpFn)> = vec![
        ("neg", |t| t.neg()),
        ("exp", |t| t.exp()),
        ("softplus", |t| t.softplus()),
        ("sigmoid", |t| t.sigmoid()),
        ("silu", |t| t.silu()),
        ("gelu", |t| t.gelu()),
        ("expm1_over_x", |t| t.expm1_over_x()),
        ("add_scalar", |t| t.add_scalar(0.3)),
        ("mul_scalar", |t| t.mul_scalar(-1.7)),
        ("sub_from_scalar", |t| t.sub_from_scalar(2.0)),
    ];
    for (name, f) in any_domain {
        let params = vec![("x".to_string(), x.clone())];
        let report = check_gradients(
            name,
            &params,
            || weighted_sum(&f(&x), &w),
            SamplePlan::Exhaustive,
            MODULE_TOL,
            41,
        );
        assert!(report.passed(), "{}", report.line());
    }
    let positive_domain: Vec<(&str, OpFn)> = vec![
        ("ln", |t| t.ln()),
        ("sqrt", |t| t.sqrt()),
        ("recip", |t| t.recip()),
    ];
    for (name, f) in positive_domain {
        let params = vec![("x".to_string(), pos.clone())];
        let report = check_gradients(
            name,
            &params,
            || weighted_sum(&f(&pos), &w),
            SamplePlan::Exhaustive,
            MODULE_TOL,
            42,
        );
        assert!(report.passed(), "{}", report.line());
    }
}

#[test]
fn binary_and_structural_gradients_match_finite_differences() {
    let a = randn_tensor(&[2, 3], 50);
    let b = Tensor::param(vec![0.5, -1.5, 2.5], &[3]); // broadcast partner
    let w = projection(&[2, 3], 51);
    type OpFn2 = fn(&Tensor<f64>, &Tensor<f64>) -> Tensor<f64>;
    let cases: Vec<(&str, OpFn2)> = vec![
        ("add", |x, y| x.add(y)),
        ("sub", |x, y| x.sub(y)),
        ("mul", |x, y| x.mul(y)),
        ("div", |x, y| x.div(y)),
    ];
    for (name, f) in cases {
        let params = vec![("a".to_string(), a.clone()), ("b".to_string(), b.clone())];
        let report = check_gradients(
            name,
            &params,
            || weighted_sum(&f(&a, &b), &w),
            SamplePlan::Exhaustive,
            MODULE_TOL,
            52,
        );
        assert!(report.passed(), "{}", report.line());
    }

    // layout ops: permute + flip + narrow + concat + broadcast_to + reductions
    let x = randn_tensor(&[2, 3, 4], 53);
    let w2 = projection(&[3, 4], 54);
    let params = vec![("x".to_string(), x.clone())];
    let report = check_gradients(
        "layout_chain",
        &params,
        || {
            let p = x.permute(&[1, 0, 2]).flip(2); // (3, 2, 4)
            let n1 = p.narrow(1, 0, 1); // (3, 1, 4)
            let n2 = p.narrow(1, 1, 1);
            let c = concat(1, &[&n1, &n2]); // (3, 2, 4)
            let s = c.sum_axis(1, false); // (3, 4)
            let m = x.mean_axis(0, false).max_axis(0, false); // (4)
            weighted_sum(&s.mul(&m.broadcast_to(&[3, 4])), &w2)
        },
        SamplePlan::Exhaustive,
        MODULE_TOL,
        55,
    );
    assert!(report.passed(), "{}", report.line());
}

#[test]
fn conv_and_pool_gradients_match_finite_differences() {
    let x = randn_tensor(&[2, 2, 6, 6], 60);
    let w = randn_tensor(&[3, 2, 3, 3], 61);
    let bias = randn_tensor(&[3], 62);
    let proj = projection(&[2, 3, 3, 3], 63);
    let params = vec![
        ("x".to_string(), x.clone()),
        ("w".to_string(), w.clone()),
        ("b".to_string(), bias.clone()),
    ];
    let report = check_gradients(
        "conv2d_stride2_pad1",
        &params,
        || {
            let spec = Conv2dSpec {
                stride: 2,
                padding: 1,
                ..Default::default()
            };
            weighted_sum(&x.conv2d(&w, Some(&bias), spec), &proj)
        },
        SamplePlan::Exhaustive,
        MODULE_TOL,
        64,
    );
    assert!(report.passed(), "{}", report.line());

    let proj2 = projection(&[2, 2, 6, 6], 65);
    let params = vec![("x".to_string(), x.clone())];
    let report = check_gradients(
        "pool_upsample",
        &params,
        || weighted_sum(&x.max_pool2d(2, 2).upsample_nearest_2x(), &proj2),
        SamplePlan::Exhaustive,
        MODULE_TOL,
        66,
    );
    assert!(report.passed(), "{}", report.line());
}

#[test]
fn expm1_over_x_branches_agree_at_threshold() {
    // straddle the 1e-5 series switch; both branches must agree to 1e-10
    for sign in [1.0f64, -1.0] {
        let below = Tensor::new(vec![sign * 0.999_999e-5], &[1]);
        let above = Tensor::new(vec![sign * 1.000_001e-5], &[1]);
        let yb = below.expm1_over_x().item();
        let ya = above.expm1_over_x().item();
        assert!(
            (yb - ya).abs() < 1e-10,
            "branch mismatch at {sign}e-5: series {yb} vs exact {ya}"
        );
    }
}

#[test]
fn apply_named_dispatches_and_rejects_unknown() {
    let a = Tensor::new(vec![1.0, 2.0], &[2]);
    let b = Tensor::new(vec![3.0, 4.0], &[2]);
    let y = apply_named("mul", &[&a, &b]).unwrap();
    assert_eq!(y.to_vec(), vec![3.0, 8.0]);
    let err = apply_named("frobnicate", &[&a]).unwrap_err();
    assert!(err.to_string().contains("unknown op id"), "{err}");
    let err = apply_named("add", &[&a]).unwrap_err();
    assert!(err.to_string().contains("expected 2 inputs"), "{err}");
}

#[test]
fn forward_stays_finite_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    for _ in 0..50 {
        let n: usize = rng.gen_range(1..20);
        let x = Tensor::new(
            (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect::<Vec<f64>>(),
            &[n],
        );
        let y = x.silu().softplus().sigmoid().gelu().exp().sqrt();
        assert!(y.all_finite(), "non-finite output for {:?}", x.to_vec());
    }
}

proptest! {
    /// (a + b) + c == a + (b + c) under broadcasting, within float tolerance.
    #[test]
    fn broadcast_add_is_associative(
        rows in 1usize..4,
        cols in 1usize..4,
        seed in 0u64..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mk = |shape: &[usize], rng: &mut ChaCha8Rng| {
            let n: usize = shape.iter().product();
            Tensor::new((0..n).map(|_| rng.gen_range(-10.0..10.0)).collect::<Vec<f64>>(), shape)
        };
        let a = mk(&[rows, cols], &mut rng);
        let b = mk(&[cols], &mut rng);
        let c = mk(&[rows, 1], &mut rng);
        let lhs = a.add(&b).add(&c);
        let rhs = a.add(&b.add(&c));
        prop_assert_eq!(lhs.shape(), rhs.shape());
        for (x, y) in lhs.to_vec().iter().zip(rhs.to_vec()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    /// split then concat along the same axis reproduces the input bit-exactly.
    #[test]
    fn split_concat_roundtrip(
        outer in 1usize..4,
        len in 2usize..9,
        inner in 1usize..4,
        cut in 1usize..8,
        seed in 0u64..1000,
    ) {
        let cut = cut.min(len - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = [outer, len, inner];
        let n = outer * len * inner;
        let x = Tensor::new((0..n).map(|_| rng.gen_range(-1.0f64..1.0)).collect::<Vec<f64>>(), &shape);
        let parts = x.split(1, &[cut, len - cut]);
        let refs: Vec<&Tensor<f64>> = parts.iter().collect();
        let y = concat(1, &refs);
        prop_assert_eq!(x.to_vec(), y.to_vec());
        prop_assert_eq!(x.shape(), y.shape());
    }
}
