//! Per-channel batch normalization over `(batch, height, width)` with
//! running statistics for inference.

use ndarray::{Array1, Array4};

/// Batch normalization layer state.
///
/// Both the normalization itself and the running statistics use the biased
/// (population) variance.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
    pub running_mean: Array1<f64>,
    pub running_var: Array1<f64>,
    pub momentum: f64,
    pub eps: f64,
}

/// Forward-pass intermediates needed by the backward pass and the running
/// update.
#[derive(Debug, Clone)]
pub struct BnCache {
    pub x_hat: Array4<f64>,
    pub inv_std: Array1<f64>,
    pub batch_mean: Array1<f64>,
    pub batch_var: Array1<f64>,
}

impl BatchNorm {
    /// Identity-initialized layer: `gamma = 1`, `beta = 0`, running mean 0,
    /// running variance 1.
    pub fn new(channels: usize, momentum: f64, eps: f64) -> Self {
        Self {
            gamma: Array1::ones(channels),
            beta: Array1::zeros(channels),
            running_mean: Array1::zeros(channels),
            running_var: Array1::ones(channels),
            momentum,
            eps,
        }
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    /// Train-mode forward using the batch's own statistics. Pure: the
    /// running statistics are only touched by [`BatchNorm::update_running`].
    pub fn forward_train(&self, x: &Array4<f64>) -> (Array4<f64>, BnCache) {
        let (n, c, h, w) = x.dim();
        let hw = h * w;
        let m = (n * hw) as f64;
        let xs = x.as_slice().expect("standard layout");

        let mut batch_mean = Array1::<f64>::zeros(c);
        let mut batch_var = Array1::<f64>::zeros(c);
        let mut inv_std = Array1::<f64>::zeros(c);
        for ci in 0..c {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for s in 0..n {
                let base = (s * c + ci) * hw;
                for &v in &xs[base..base + hw] {
                    sum += v;
                    sumsq += v * v;
                }
            }
            let mean = sum / m;
            let var = (sumsq / m - mean * mean).max(0.0);
            batch_mean[ci] = mean;
            batch_var[ci] = var;
            inv_std[ci] = 1.0 / (var + self.eps).sqrt();
        }

        let mut x_hat = Array4::<f64>::zeros((n, c, h, w));
        let mut y = Array4::<f64>::zeros((n, c, h, w));
        {
            let hs = x_hat.as_slice_mut().expect("freshly allocated");
            let ys = y.as_slice_mut().expect("freshly allocated");
            for ci in 0..c {
                let (mean, istd) = (batch_mean[ci], inv_std[ci]);
                let (g, b) = (self.gamma[ci], self.beta[ci]);
                for s in 0..n {
                    let base = (s * c + ci) * hw;
                    for p in base..base + hw {
                        let xh = (xs[p] - mean) * istd;
                        hs[p] = xh;
                        ys[p] = g * xh + b;
                    }
                }
            }
        }

        (
            y,
            BnCache {
                x_hat,
                inv_std,
                batch_mean,
                batch_var,
            },
        )
    }

    /// Folds one batch's statistics into the running estimates.
    pub fn update_running(&mut self, cache: &BnCache) {
        let m = self.momentum;
        for ci in 0..self.channels() {
            self.running_mean[ci] = (1.0 - m) * self.running_mean[ci] + m * cache.batch_mean[ci];
            self.running_var[ci] = (1.0 - m) * self.running_var[ci] + m * cache.batch_var[ci];
        }
    }

    /// Inference-mode forward using the running statistics.
    pub fn forward_infer(&self, x: &Array4<f64>) -> Array4<f64> {
        let (n, c, h, w) = x.dim();
        let hw = h * w;
        let xs = x.as_slice().expect("standard layout");
        let mut y = Array4::<f64>::zeros((n, c, h, w));
        let ys = y.as_slice_mut().expect("freshly allocated");
        for ci in 0..c {
            let istd = 1.0 / (self.running_var[ci] + self.eps).sqrt();
            let mean = self.running_mean[ci];
            let (g, b) = (self.gamma[ci], self.beta[ci]);
            for s in 0..n {
                let base = (s * c + ci) * hw;
                for p in base..base + hw {
                    ys[p] = g * (xs[p] - mean) * istd + b;
                }
            }
        }
        y
    }

    /// Gradients w.r.t. input, gamma, and beta given the forward cache.
    pub fn backward(
        &self,
        cache: &BnCache,
        grad_out: &Array4<f64>,
    ) -> (Array4<f64>, Array1<f64>, Array1<f64>) {
        let (n, c, h, w) = grad_out.dim();
        let hw = h * w;
        let m = (n * hw) as f64;
        let gs = grad_out.as_slice().expect("standard layout");
        let hs = cache.x_hat.as_slice().expect("standard layout");

        let mut grad_gamma = Array1::<f64>::zeros(c);
        let mut grad_beta = Array1::<f64>::zeros(c);
        let mut grad_x = Array4::<f64>::zeros((n, c, h, w));
        let dxs = grad_x.as_slice_mut().expect("freshly allocated");

        for ci in 0..c {
            let mut sum_dy = 0.0;
            let mut sum_dy_xhat = 0.0;
            for s in 0..n {
                let base = (s * c + ci) * hw;
                for p in base..base + hw {
                    sum_dy += gs[p];
                    sum_dy_xhat += gs[p] * hs[p];
                }
            }
            grad_beta[ci] = sum_dy;
            grad_gamma[ci] = sum_dy_xhat;

            let coef = self.gamma[ci] * cache.inv_std[ci] / m;
            for s in 0..n {
                let base = (s * c + ci) * hw;
                for p in base..base + hw {
                    dxs[p] = coef * (m * gs[p] - sum_dy - hs[p] * sum_dy_xhat);
                }
            }
        }
        (grad_x, grad_gamma, grad_beta)
    }
}
