//! 3x3 stride-1 zero-padding-1 convolution, computed as im2col followed by
//! one matrix product so the hot loop is a GEMM.

use ndarray::{Array1, Array2, Array4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Shape-preserving 3x3 convolution layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv2d {
    /// Kernel weights, `(c_out, c_in, 3, 3)`.
    pub weight: Array4<f64>,
    /// One bias per output channel.
    pub bias: Array1<f64>,
}

impl Conv2d {
    /// Fan-in-scaled uniform weights (`U(-b, b)` with `b = 1/sqrt(9 c_in)`)
    /// drawn in row-major order; zero biases.
    pub fn new(c_in: usize, c_out: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / ((9 * c_in) as f64).sqrt();
        let values: Vec<f64> = (0..c_out * c_in * 9)
            .map(|_| rng.random::<f64>() * 2.0 * bound - bound)
            .collect();
        Self {
            weight: Array4::from_shape_vec((c_out, c_in, 3, 3), values)
                .expect("shape matches draw count"),
            bias: Array1::zeros(c_out),
        }
    }

    pub fn c_in(&self) -> usize {
        self.weight.dim().1
    }

    pub fn c_out(&self) -> usize {
        self.weight.dim().0
    }

    /// Unfolds `x` `(n, c, h, w)` into patch columns `(c * 9, n * h * w)`;
    /// out-of-image taps stay zero (the padding).
    pub fn im2col(x: &Array4<f64>) -> Array2<f64> {
        let (n, c, h, w) = x.dim();
        let cols_w = n * h * w;
        let mut cols = Array2::<f64>::zeros((c * 9, cols_w));
        let xs = x.as_slice().expect("owned input is standard layout");
        let cs = cols.as_slice_mut().expect("freshly allocated");
        for ci in 0..c {
            for ky in 0..3 {
                for kx in 0..3 {
                    let row_base = (ci * 9 + ky * 3 + kx) * cols_w;
                    for s in 0..n {
                        let x_base = (s * c + ci) * h * w;
                        let col_base = row_base + s * h * w;
                        for y in 0..h {
                            let sy = y + ky; // padded row; real row sy - 1
                            if sy < 1 || sy > h {
                                continue;
                            }
                            let src = x_base + (sy - 1) * w;
                            let dst = col_base + y * w;
                            for xx in 0..w {
                                let sx = xx + kx;
                                if sx < 1 || sx > w {
                                    continue;
                                }
                                cs[dst + xx] = xs[src + sx - 1];
                            }
                        }
                    }
                }
            }
        }
        cols
    }

    /// Folds patch-column gradients back onto the input (adjoint of
    /// [`Conv2d::im2col`]).
    fn col2im(dcols: &Array2<f64>, shape: (usize, usize, usize, usize)) -> Array4<f64> {
        let (n, c, h, w) = shape;
        let cols_w = n * h * w;
        let mut dx = Array4::<f64>::zeros(shape);
        let ds = dcols.as_slice().expect("standard layout");
        let xs = dx.as_slice_mut().expect("freshly allocated");
        for ci in 0..c {
            for ky in 0..3 {
                for kx in 0..3 {
                    let row_base = (ci * 9 + ky * 3 + kx) * cols_w;
                    for s in 0..n {
                        let x_base = (s * c + ci) * h * w;
                        let col_base = row_base + s * h * w;
                        for y in 0..h {
                            let sy = y + ky;
                            if sy < 1 || sy > h {
                                continue;
                            }
                            let dst = x_base + (sy - 1) * w;
                            let src = col_base + y * w;
                            for xx in 0..w {
                                let sx = xx + kx;
                                if sx < 1 || sx > w {
                                    continue;
                                }
                                xs[dst + sx - 1] += ds[src + xx];
                            }
                        }
                    }
                }
            }
        }
        dx
    }

    /// Forward pass; also returns the patch columns for reuse in
    /// [`Conv2d::backward`].
    pub fn forward(&self, x: &Array4<f64>) -> (Array4<f64>, Array2<f64>) {
        let (n, _, h, w) = x.dim();
        let cols = Self::im2col(x);
        let out = self.forward_from_cols(&cols, n, h, w);
        (out, cols)
    }

    /// Forward pass from precomputed patch columns.
    pub fn forward_from_cols(
        &self,
        cols: &Array2<f64>,
        n: usize,
        h: usize,
        w: usize,
    ) -> Array4<f64> {
        let c_out = self.c_out();
        let w_mat = self
            .weight
            .view()
            .into_shape_with_order((c_out, self.c_in() * 9))
            .expect("kernel is standard layout");
        let out_mat = w_mat.dot(cols); // (c_out, n*h*w)
        let mut out = Array4::<f64>::zeros((n, c_out, h, w));
        let os = out.as_slice_mut().expect("freshly allocated");
        let ms = out_mat.as_slice().expect("dot output is standard layout");
        let hw = h * w;
        for s in 0..n {
            for co in 0..c_out {
                let dst = (s * c_out + co) * hw;
                let src = co * n * hw + s * hw;
                let b = self.bias[co];
                for p in 0..hw {
                    os[dst + p] = ms[src + p] + b;
                }
            }
        }
        out
    }

    /// Gradients of the loss w.r.t. input, kernel, and bias, given the
    /// cached patch columns of the forward input.
    pub fn backward(
        &self,
        cols: &Array2<f64>,
        input_shape: (usize, usize, usize, usize),
        grad_out: &Array4<f64>,
    ) -> (Array4<f64>, Array4<f64>, Array1<f64>) {
        let (n, _, h, w) = input_shape;
        let hw = h * w;
        let c_out = self.c_out();
        let c_in = self.c_in();

        // Regroup grad_out (n, c_out, h, w) as (c_out, n*h*w).
        let mut dout_mat = Array2::<f64>::zeros((c_out, n * hw));
        {
            let ds = dout_mat.as_slice_mut().expect("freshly allocated");
            let gs = grad_out.as_slice().expect("standard layout");
            for s in 0..n {
                for co in 0..c_out {
                    let src = (s * c_out + co) * hw;
                    let dst = co * n * hw + s * hw;
                    ds[dst..dst + hw].copy_from_slice(&gs[src..src + hw]);
                }
            }
        }

        let grad_bias = dout_mat.sum_axis(ndarray::Axis(1));
        let grad_w_mat = dout_mat.dot(&cols.t()); // (c_out, c_in*9)
        let grad_weight = grad_w_mat
            .into_shape_with_order((c_out, c_in, 3, 3))
            .expect("same element count");

        let w_mat = self
            .weight
            .view()
            .into_shape_with_order((c_out, c_in * 9))
            .expect("kernel is standard layout");
        let dcols = w_mat.t().dot(&dout_mat); // (c_in*9, n*h*w)
        let grad_x = Self::col2im(&dcols, input_shape);

        (grad_x, grad_weight, grad_bias)
    }
}
