//! Fully connected output layer.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Affine map from flattened features to outputs: `y = x W^T + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `(outputs, features)`.
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    /// Fan-in-scaled uniform weights drawn in row-major order; zero biases.
    pub fn new(features: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (features as f64).sqrt();
        let values: Vec<f64> = (0..outputs * features)
            .map(|_| rng.random::<f64>() * 2.0 * bound - bound)
            .collect();
        Self {
            weight: Array2::from_shape_vec((outputs, features), values)
                .expect("shape matches draw count"),
            bias: Array1::zeros(outputs),
        }
    }

    pub fn features(&self) -> usize {
        self.weight.dim().1
    }

    pub fn outputs(&self) -> usize {
        self.weight.dim().0
    }

    /// `x` is `(batch, features)`; returns `(batch, outputs)`.
    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.weight.t()) + &self.bias
    }

    /// Gradients w.r.t. input, weight, and bias.
    pub fn backward(
        &self,
        x: &Array2<f64>,
        grad_out: &Array2<f64>,
    ) -> (Array2<f64>, Array2<f64>, Array1<f64>) {
        let grad_x = grad_out.dot(&self.weight);
        let grad_w = grad_out.t().dot(x);
        let grad_b = grad_out.sum_axis(Axis(0));
        (grad_x, grad_w, grad_b)
    }
}
