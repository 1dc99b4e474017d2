use super::tensor::{NetError, Tensor};

/// Affine map `y = x · Wᵀ + b` over a batch. `x` is `[n, in]`, `w` is
/// `[out, in]`, `b` is `[out]`; the result is `[n, out]`.
pub fn linear_forward(x: &Tensor, w: &Tensor, b: &Tensor) -> Result<Tensor, NetError> {
    if x.shape.len() != 2 || w.shape.len() != 2 || x.shape[1] != w.shape[1] {
        return Err(NetError::ShapeMismatch {
            op: "linear",
            left: x.shape.clone(),
            right: w.shape.clone(),
        });
    }
    let (n, d_in) = (x.shape[0], x.shape[1]);
    let d_out = w.shape[0];
    let mut y = Tensor::zeros(&[n, d_out]);
    for i in 0..n {
        let xi = x.row(i);
        let yi = y.row_mut(i);
        for o in 0..d_out {
            let wo = w.row(o);
            let mut acc = b.data[o];
            for k in 0..d_in {
                acc += xi[k] * wo[k];
            }
            yi[o] = acc;
        }
    }
    Ok(y)
}

/// Backward of [`linear_forward`]. Accumulates parameter gradients into
/// `grad_w`/`grad_b` and returns the gradient with respect to `x`.
pub fn linear_backward(
    x: &Tensor,
    w: &Tensor,
    grad_out: &Tensor,
    grad_w: &mut Tensor,
    grad_b: &mut Tensor,
) -> Tensor {
    let (n, d_in) = (x.shape[0], x.shape[1]);
    let d_out = w.shape[0];
    debug_assert_eq!(grad_out.shape, vec![n, d_out]);
    let mut grad_x = Tensor::zeros(&[n, d_in]);
    for i in 0..n {
        let xi = x.row(i);
        let gi = grad_out.row(i);
        let gxi = grad_x.row_mut(i);
        for o in 0..d_out {
            let g = gi[o];
            if g == 0.0 {
                continue;
            }
            grad_b.data[o] += g;
            let wo = w.row(o);
            let gwo = grad_w.row_mut(o);
            for k in 0..d_in {
                gwo[k] += g * xi[k];
                gxi[k] += g * wo[k];
            }
        }
    }
    grad_x
}

fn conv_out_side(h: usize, k: usize, stride: usize, pad: usize) -> usize {
    (h + 2 * pad - k) / stride + 1
}

/// 2D convolution. `input` is `[ci, h, w]`, `kernel` is `[co, ci, k, k]`,
/// `bias` is `[co]`; output is `[co, oh, ow]` with zero padding `pad`.
pub fn conv2d_forward(
    input: &Tensor,
    kernel: &Tensor,
    bias: &Tensor,
    stride: usize,
    pad: usize,
) -> Result<Tensor, NetError> {
    if input.shape.len() != 3 || kernel.shape.len() != 4 || input.shape[0] != kernel.shape[1] {
        return Err(NetError::ShapeMismatch {
            op: "conv2d",
            left: input.shape.clone(),
            right: kernel.shape.clone(),
        });
    }
    let (ci, h, w) = (input.shape[0], input.shape[1], input.shape[2]);
    let (co, k) = (kernel.shape[0], kernel.shape[2]);
    let oh = conv_out_side(h, k, stride, pad);
    let ow = conv_out_side(w, k, stride, pad);
    let mut out = Tensor::zeros(&[co, oh, ow]);
    for c_out in 0..co {
        let out_plane = &mut out.data[c_out * oh * ow..(c_out + 1) * oh * ow];
        out_plane.iter_mut().for_each(|v| *v = bias.data[c_out]);
        for c_in in 0..ci {
            let in_plane = input.channel(c_in);
            let k_base = ((c_out * ci) + c_in) * k * k;
            for ky in 0..k {
                for kx in 0..k {
                    let wgt = kernel.data[k_base + ky * k + kx];
                    if wgt == 0.0 {
                        continue;
                    }
                    for oy in 0..oh {
                        let iy = (oy * stride + ky) as isize - pad as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        let in_row = &in_plane[iy as usize * w..(iy as usize + 1) * w];
                        let out_row = &mut out_plane[oy * ow..(oy + 1) * ow];
                        for ox in 0..ow {
                            let ix = (ox * stride + kx) as isize - pad as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            out_row[ox] += wgt * in_row[ix as usize];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Backward of [`conv2d_forward`]. Accumulates kernel/bias gradients and
/// returns the gradient with respect to the input.
pub fn conv2d_backward(
    input: &Tensor,
    kernel: &Tensor,
    stride: usize,
    pad: usize,
    grad_out: &Tensor,
    grad_kernel: &mut Tensor,
    grad_bias: &mut Tensor,
) -> Tensor {
    let (ci, h, w) = (input.shape[0], input.shape[1], input.shape[2]);
    let (co, k) = (kernel.shape[0], kernel.shape[2]);
    let (oh, ow) = (grad_out.shape[1], grad_out.shape[2]);
    let mut grad_input = Tensor::zeros(&[ci, h, w]);
    for c_out in 0..co {
        let g_plane = grad_out.channel(c_out);
        grad_bias.data[c_out] += g_plane.iter().sum::<f64>();
        for c_in in 0..ci {
            let in_plane = input.channel(c_in);
            let gi_plane = &mut grad_input.data[c_in * h * w..(c_in + 1) * h * w];
            let k_base = ((c_out * ci) + c_in) * k * k;
            for ky in 0..k {
                for kx in 0..k {
                    let wgt = kernel.data[k_base + ky * k + kx];
                    let mut wgt_grad = 0.0;
                    for oy in 0..oh {
                        let iy = (oy * stride + ky) as isize - pad as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        let in_row = &in_plane[iy as usize * w..(iy as usize + 1) * w];
                        let gi_row = &mut gi_plane[iy as usize * w..(iy as usize + 1) * w];
                        let g_row = &g_plane[oy * ow..(oy + 1) * ow];
                        for ox in 0..ow {
                            let ix = (ox * stride + kx) as isize - pad as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let g = g_row[ox];
                            wgt_grad += g * in_row[ix as usize];
                            gi_row[ix as usize] += g * wgt;
                        }
                    }
                    grad_kernel.data[k_base + ky * k + kx] += wgt_grad;
                }
            }
        }
    }
    grad_input
}

pub fn relu_forward(x: &Tensor) -> Tensor {
    Tensor::from_vec(&x.shape, x.data.iter().map(|&v| v.max(0.0)).collect())
}

/// Passes gradient where the forward input was strictly positive.
pub fn relu_backward(input: &Tensor, grad_out: &Tensor) -> Tensor {
    debug_assert_eq!(input.shape, grad_out.shape);
    Tensor::from_vec(
        &input.shape,
        input
            .data
            .iter()
            .zip(grad_out.data.iter())
            .map(|(&x, &g)| if x > 0.0 { g } else { 0.0 })
            .collect(),
    )
}

/// Projects a vector onto the unit sphere. Fails when the norm is below
/// 1e-12.
pub fn l2_normalize(v: &[f64]) -> Result<Vec<f64>, NetError> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(NetError::NearZeroNorm { norm });
    }
    Ok(v.iter().map(|x| x / norm).collect())
}

/// Backward of [`l2_normalize`]: `(g − (g·z) z) / ‖v‖` where `z = v/‖v‖`.
/// The result is always orthogonal to the output direction.
pub fn l2_normalize_backward(v: &[f64], grad_z: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let z: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let dot = grad_z.iter().zip(z.iter()).map(|(g, zi)| g * zi).sum::<f64>();
    z.iter()
        .zip(grad_z.iter())
        .map(|(zi, g)| (g - dot * zi) / norm)
        .collect()
}

/// Numerically stable `log Σ exp(xᵢ)` via max subtraction.
pub fn log_sum_exp(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NEG_INFINITY;
    }
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let sum: f64 = x.iter().map(|&v| (v - m).exp()).sum();
    m + sum.ln()
}

/// Backward of [`log_sum_exp`]: `grad · softmax(x)`.
pub fn log_sum_exp_backward(x: &[f64], grad: f64) -> Vec<f64> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = x.iter().map(|&v| (v - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| grad * e / sum).collect()
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
