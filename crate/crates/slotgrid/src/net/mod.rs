//! Minimal differentiable numerical substrate: dense tensors, a fixed set of
//! forward operations with analytic reverse-mode gradients, and a
//! finite-difference gradient checker.
//!
//! There is no tape. Every operation exposes an explicit `*_backward`
//! companion and the network code composes them by hand, which keeps the
//! numerical core small enough to audit. All arithmetic is `f64` and every
//! reduction runs in a fixed sequential order, so forward passes are bitwise
//! reproducible for fixed inputs.

mod gradcheck;
mod ops;
mod tensor;

pub use gradcheck::{finite_diff_check, finite_diff_check_sampled};
pub use ops::{
    conv2d_backward, conv2d_forward, l2_normalize, l2_normalize_backward, linear_backward,
    linear_forward, log_sum_exp, log_sum_exp_backward, relu_backward, relu_forward, sigmoid,
};
pub use tensor::{NetError, Param, Tensor};
