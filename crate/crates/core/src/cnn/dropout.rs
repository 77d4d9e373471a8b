//! Inverted dropout on flattened features.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Inverted dropout: surviving activations are scaled by `1/(1 - rate)` at
/// train time so inference is a plain identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dropout {
    pub rate: f64,
}

impl Dropout {
    /// Train-mode pass. Returns the output and the mask (already holding
    /// the inverse-keep scaling), which the backward pass reuses. Mask
    /// entries are drawn in row-major order, one uniform draw per feature.
    pub fn forward_train(
        &self,
        x: &Array2<f64>,
        rng: &mut ChaCha8Rng,
    ) -> (Array2<f64>, Array2<f64>) {
        let scale = 1.0 / (1.0 - self.rate);
        let values: Vec<f64> = (0..x.len())
            .map(|_| if rng.random::<f64>() >= self.rate { scale } else { 0.0 })
            .collect();
        let mask = Array2::from_shape_vec(x.dim(), values).expect("shape matches draw count");
        (x * &mask, mask)
    }

    /// Gradient w.r.t. input given the stored mask.
    pub fn backward(&self, mask: &Array2<f64>, grad_out: &Array2<f64>) -> Array2<f64> {
        grad_out * mask
    }
}
