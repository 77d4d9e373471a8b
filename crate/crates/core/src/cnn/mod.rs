//! From-scratch convolutional surrogate: six conv/batch-norm/ReLU blocks,
//! dropout, and a dense head mapping the microstructure image to the three
//! properties. Forward, backward, optimizer, training loop, evaluation, and
//! checkpointing are all implemented here in plain `f64` arithmetic.

mod adam;
mod batchnorm;
mod checkpoint;
mod conv;
mod dense;
mod dropout;
mod eval;
mod train;

pub use adam::{Adam, AdamState};
pub use batchnorm::{BatchNorm, BnCache};
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use conv::Conv2d;
pub use dense::Dense;
pub use dropout::Dropout;
pub use eval::{evaluate, write_eval_csv, EvalReport, PropertyEval};
pub use train::{train, write_history_csv, EpochRecord, TrainConfig, TrainHistory};

use ndarray::{Array2, Array4};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::Grid;
use crate::microstructure::Microstructure;
use crate::predict::{PredictError, PropertyPredictor};
use crate::properties::CompositeProperties;
use crate::seeds::domain_seed;

/// Batch rows processed per inference chunk when predicting large sets.
const INFER_CHUNK: usize = 256;

/// Network architecture and normalization hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CnnConfig {
    pub grid: Grid,
    /// Channel plan: `channels[0]` is the single input channel, each
    /// further entry one conv/batch-norm/ReLU block.
    pub channels: Vec<usize>,
    pub dropout_rate: f64,
    pub bn_momentum: f64,
    pub bn_eps: f64,
}

impl CnnConfig {
    /// The six-block plan used for real runs: 1-16-32-32-64-64-64.
    pub fn standard(grid: Grid) -> Self {
        Self {
            grid,
            channels: vec![1, 16, 32, 32, 64, 64, 64],
            dropout_rate: 0.25,
            bn_momentum: 0.1,
            bn_eps: 1e-5,
        }
    }

    pub fn block_count(&self) -> usize {
        self.channels.len() - 1
    }

    /// Flattened feature count entering the dense head.
    pub fn feature_count(&self) -> usize {
        self.channels.last().copied().unwrap_or(0) * self.grid.gene_count()
    }

    fn validate(&self) -> Result<(), CnnError> {
        let bad = |msg: &str| Err(CnnError::BadConfig(msg.to_string()));
        if self.channels.len() < 2 {
            return bad("need at least one block");
        }
        if self.channels[0] != 1 {
            return bad("input must have exactly one channel");
        }
        if self.channels.iter().any(|&c| c == 0) {
            return bad("channel counts must be positive");
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad("dropout rate must lie in [0, 1)");
        }
        if !(self.bn_momentum > 0.0 && self.bn_momentum <= 1.0) {
            return bad("batch-norm momentum must lie in (0, 1]");
        }
        if !(self.bn_eps > 0.0 && self.bn_eps.is_finite()) {
            return bad("batch-norm epsilon must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CnnError {
    #[error("invalid model configuration: {0}")]
    BadConfig(String),
    #[error("expected images (n, 1, {expected_h}, {expected_w}), got {got:?}")]
    ShapeMismatch {
        expected_h: usize,
        expected_w: usize,
        got: (usize, usize, usize, usize),
    },
    #[error("targets shape {got:?} does not match {expected_n} images with 3 outputs")]
    TargetMismatch {
        expected_n: usize,
        got: (usize, usize),
    },
    #[error("non-finite training loss at epoch {epoch}, batch {batch}: training diverged")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("network produced a non-finite output")]
    NonFiniteOutput,
    #[error("cannot train on an empty training set")]
    EmptyTrainSet,
    #[error("dataset grid {got} does not match model grid {expected}")]
    GridMismatch { expected: Grid, got: Grid },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("checkpoint corrupt: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Block {
    conv: Conv2d,
    bn: BatchNorm,
}

/// The convolutional surrogate model.
#[derive(Debug, Clone, PartialEq)]
pub struct CnnModel {
    config: CnnConfig,
    blocks: Vec<Block>,
    dropout: Dropout,
    dense: Dense,
    label_mean: [f64; 3],
    label_std: [f64; 3],
}

/// Gradient tensors flattened in canonical parameter order (matching
/// [`CnnModel::param_slices_mut`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    tensors: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn tensor_count(&self) -> usize {
        self.tensors.len()
    }

    pub fn tensor(&self, index: usize) -> &[f64] {
        &self.tensors[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.tensors.iter().map(Vec::as_slice)
    }
}

/// One training pass over a batch: loss, per-property losses (all in
/// normalized label space), normalized predictions, and gradients.
#[derive(Debug, Clone)]
pub struct TrainStepOutput {
    pub loss: f64,
    pub loss_per_property: [f64; 3],
    pub predictions_norm: Array2<f64>,
    pub gradients: Gradients,
}

struct ForwardTrainState {
    input_shapes: Vec<(usize, usize, usize, usize)>,
    cols: Vec<Array2<f64>>,
    bn_caches: Vec<BnCache>,
    relu_masks: Vec<Array4<f64>>,
    dropped: Array2<f64>,
    drop_mask: Array2<f64>,
    y_norm: Array2<f64>,
}

fn relu_with_mask(x: Array4<f64>) -> (Array4<f64>, Array4<f64>) {
    let mask = x.map(|&v| if v > 0.0 { 1.0 } else { 0.0 });
    (x * &mask, mask)
}

impl CnnModel {
    /// Builds a freshly initialized model. All weight draws come from one
    /// seeded stream, so equal `(config, seed)` means an identical model.
    pub fn new(config: CnnConfig, seed: u64) -> Result<Self, CnnError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(domain_seed(seed, "cnn-init"));
        let blocks = config
            .channels
            .windows(2)
            .map(|pair| Block {
                conv: Conv2d::new(pair[0], pair[1], &mut rng),
                bn: BatchNorm::new(pair[1], config.bn_momentum, config.bn_eps),
            })
            .collect();
        let dense = Dense::new(config.feature_count(), 3, &mut rng);
        Ok(Self {
            dropout: Dropout {
                rate: config.dropout_rate,
            },
            blocks,
            dense,
            config,
            label_mean: [0.0; 3],
            label_std: [1.0; 3],
        })
    }

    pub fn config(&self) -> &CnnConfig {
        &self.config
    }

    pub fn grid(&self) -> Grid {
        self.config.grid
    }

    /// Sets the per-property z-score constants (training-set statistics).
    pub fn set_label_stats(&mut self, mean: [f64; 3], std: [f64; 3]) -> Result<(), CnnError> {
        if mean.iter().chain(&std).any(|v| !v.is_finite()) || std.iter().any(|&s| s <= 0.0) {
            return Err(CnnError::BadConfig(
                "label stats must be finite with positive stddev".to_string(),
            ));
        }
        self.label_mean = mean;
        self.label_std = std;
        Ok(())
    }

    pub fn label_stats(&self) -> ([f64; 3], [f64; 3]) {
        (self.label_mean, self.label_std)
    }

    pub fn normalize_label(&self, physical: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|k| (physical[k] - self.label_mean[k]) / self.label_std[k])
    }

    pub fn denormalize_label(&self, normalized: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|k| normalized[k] * self.label_std[k] + self.label_mean[k])
    }

    fn check_images(&self, images: &Array4<f64>) -> Result<(), CnnError> {
        let dim = images.dim();
        let (h, w) = (self.config.grid.height(), self.config.grid.width());
        if dim.1 != 1 || dim.2 != h || dim.3 != w {
            return Err(CnnError::ShapeMismatch {
                expected_h: h,
                expected_w: w,
                got: dim,
            });
        }
        Ok(())
    }

    /// Inference-mode physical-unit predictions, `(n, 3)`.
    pub fn predict_images(&self, images: &Array4<f64>) -> Result<Array2<f64>, CnnError> {
        let y_norm = self.forward_infer_norm(images)?;
        let mut y = y_norm;
        for mut row in y.rows_mut() {
            for k in 0..3 {
                row[k] = row[k] * self.label_std[k] + self.label_mean[k];
            }
        }
        Ok(y)
    }

    /// Inference-mode normalized outputs: running batch-norm statistics,
    /// no dropout.
    pub fn forward_infer_norm(&self, images: &Array4<f64>) -> Result<Array2<f64>, CnnError> {
        self.check_images(images)?;
        let n = images.dim().0;
        let mut a = images.clone();
        for block in &self.blocks {
            let (z, _) = block.conv.forward(&a);
            let zn = block.bn.forward_infer(&z);
            a = zn.map(|&v| v.max(0.0));
        }
        let flat = a
            .into_shape_with_order((n, self.config.feature_count()))
            .expect("activation count equals feature count");
        let y = self.dense.forward(&flat);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(CnnError::NonFiniteOutput);
        }
        Ok(y)
    }

    fn forward_train_full(
        &self,
        images: &Array4<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<ForwardTrainState, CnnError> {
        self.check_images(images)?;
        let n = images.dim().0;
        let mut input_shapes = Vec::with_capacity(self.blocks.len());
        let mut cols = Vec::with_capacity(self.blocks.len());
        let mut bn_caches = Vec::with_capacity(self.blocks.len());
        let mut relu_masks = Vec::with_capacity(self.blocks.len());

        let mut a = images.clone();
        for block in &self.blocks {
            input_shapes.push(a.dim());
            let (z, cols_b) = block.conv.forward(&a);
            cols.push(cols_b);
            let (zn, cache) = block.bn.forward_train(&z);
            bn_caches.push(cache);
            let (y, mask) = relu_with_mask(zn);
            relu_masks.push(mask);
            a = y;
        }
        let flat = a
            .into_shape_with_order((n, self.config.feature_count()))
            .expect("activation count equals feature count");
        let (dropped, drop_mask) = self.dropout.forward_train(&flat, rng);
        let y_norm = self.dense.forward(&dropped);
        Ok(ForwardTrainState {
            input_shapes,
            cols,
            bn_caches,
            relu_masks,
            dropped,
            drop_mask,
            y_norm,
        })
    }

    fn losses(y: &Array2<f64>, targets: &Array2<f64>) -> (f64, [f64; 3]) {
        let n = y.dim().0 as f64;
        let mut per = [0.0f64; 3];
        for (row, target) in y.rows().into_iter().zip(targets.rows()) {
            for k in 0..3 {
                let r = row[k] - target[k];
                per[k] += r * r;
            }
        }
        for p in &mut per {
            *p /= n;
        }
        ((per[0] + per[1] + per[2]) / 3.0, per)
    }

    /// Train-mode loss only (batch statistics + dropout), without touching
    /// any model state. Pass a clone of the same RNG to reproduce the
    /// dropout mask of a paired call.
    pub fn train_loss(
        &self,
        images: &Array4<f64>,
        targets_norm: &Array2<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<f64, CnnError> {
        self.check_targets(images, targets_norm)?;
        let state = self.forward_train_full(images, rng)?;
        Ok(Self::losses(&state.y_norm, targets_norm).0)
    }

    fn check_targets(&self, images: &Array4<f64>, targets: &Array2<f64>) -> Result<(), CnnError> {
        if targets.dim() != (images.dim().0, 3) {
            return Err(CnnError::TargetMismatch {
                expected_n: images.dim().0,
                got: targets.dim(),
            });
        }
        Ok(())
    }

    /// Train-mode loss and gradients of the normalized-space MSE with
    /// respect to every parameter, without updating model state.
    pub fn train_gradients(
        &self,
        images: &Array4<f64>,
        targets_norm: &Array2<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<TrainStepOutput, CnnError> {
        let (output, _) = self.train_gradients_with_caches(images, targets_norm, rng)?;
        Ok(output)
    }

    fn train_gradients_with_caches(
        &self,
        images: &Array4<f64>,
        targets_norm: &Array2<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<(TrainStepOutput, Vec<BnCache>), CnnError> {
        self.check_targets(images, targets_norm)?;
        let state = self.forward_train_full(images, rng)?;
        let n = images.dim().0;
        let (loss, loss_per_property) = Self::losses(&state.y_norm, targets_norm);

        // d(MSE)/dy for the mean over all n*3 squared residuals.
        let scale = 2.0 / (n as f64 * 3.0);
        let grad_y = (&state.y_norm - targets_norm) * scale;

        let block_count = self.blocks.len();
        let mut tensors: Vec<Vec<f64>> = vec![Vec::new(); 4 * block_count + 2];

        let (grad_dropped, grad_dense_w, grad_dense_b) =
            self.dense.backward(&state.dropped, &grad_y);
        tensors[4 * block_count] = grad_dense_w.as_slice().expect("standard layout").to_vec();
        tensors[4 * block_count + 1] = grad_dense_b.to_vec();

        let grad_flat = self.dropout.backward(&state.drop_mask, &grad_dropped);
        let last_c = *self.config.channels.last().expect("validated non-empty");
        let (h, w) = (self.config.grid.height(), self.config.grid.width());
        let mut grad_a = grad_flat
            .into_shape_with_order((n, last_c, h, w))
            .expect("feature count matches activation shape");

        for (b, block) in self.blocks.iter().enumerate().rev() {
            let grad_zn = grad_a * &state.relu_masks[b];
            let (grad_z, grad_gamma, grad_beta) = block.bn.backward(&state.bn_caches[b], &grad_zn);
            let (grad_x, grad_w, grad_b) =
                block
                    .conv
                    .backward(&state.cols[b], state.input_shapes[b], &grad_z);
            tensors[4 * b] = grad_w.as_slice().expect("standard layout").to_vec();
            tensors[4 * b + 1] = grad_b.to_vec();
            tensors[4 * b + 2] = grad_gamma.to_vec();
            tensors[4 * b + 3] = grad_beta.to_vec();
            grad_a = grad_x;
        }

        Ok((
            TrainStepOutput {
                loss,
                loss_per_property,
                predictions_norm: state.y_norm,
                gradients: Gradients { tensors },
            },
            state.bn_caches,
        ))
    }

    /// One full training pass: forward, backward, and the batch-norm
    /// running-statistics update. Parameter updates are the caller's job
    /// (see [`train`]).
    pub fn train_step(
        &mut self,
        images: &Array4<f64>,
        targets_norm: &Array2<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<TrainStepOutput, CnnError> {
        let (output, bn_caches) = self.train_gradients_with_caches(images, targets_norm, rng)?;
        for (block, cache) in self.blocks.iter_mut().zip(&bn_caches) {
            block.bn.update_running(cache);
        }
        Ok(output)
    }

    /// All trainable parameter tensors as mutable flat slices, in the fixed
    /// canonical order: per block `conv weights, conv bias, gamma, beta`,
    /// then `dense weights, dense bias`. [`Gradients`] uses the same order.
    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::with_capacity(4 * self.blocks.len() + 2);
        for block in &mut self.blocks {
            out.push(block.conv.weight.as_slice_mut().expect("standard layout"));
            out.push(block.conv.bias.as_slice_mut().expect("standard layout"));
            out.push(block.bn.gamma.as_slice_mut().expect("standard layout"));
            out.push(block.bn.beta.as_slice_mut().expect("standard layout"));
        }
        out.push(self.dense.weight.as_slice_mut().expect("standard layout"));
        out.push(self.dense.bias.as_slice_mut().expect("standard layout"));
        out
    }

    /// Read-only view of the same tensors in the same canonical order.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::with_capacity(4 * self.blocks.len() + 2);
        for block in &self.blocks {
            out.push(block.conv.weight.as_slice().expect("standard layout"));
            out.push(block.conv.bias.as_slice().expect("standard layout"));
            out.push(block.bn.gamma.as_slice().expect("standard layout"));
            out.push(block.bn.beta.as_slice().expect("standard layout"));
        }
        out.push(self.dense.weight.as_slice().expect("standard layout"));
        out.push(self.dense.bias.as_slice().expect("standard layout"));
        out
    }
}

/// Stacks microstructure images into a `(n, 1, h, w)` batch tensor.
pub fn images_tensor(microstructures: &[Microstructure], grid: Grid) -> Array4<f64> {
    let (h, w) = (grid.height(), grid.width());
    let mut images = Array4::<f64>::zeros((microstructures.len(), 1, h, w));
    for (s, micro) in microstructures.iter().enumerate() {
        let img = micro.to_image();
        images
            .slice_mut(ndarray::s![s, 0, .., ..])
            .assign(&img);
    }
    images
}

impl PropertyPredictor for CnnModel {
    fn grid(&self) -> Grid {
        self.config.grid
    }

    fn predict_batch(
        &self,
        microstructures: &[Microstructure],
    ) -> Result<Vec<CompositeProperties>, PredictError> {
        for m in microstructures {
            if m.grid() != self.grid() {
                return Err(PredictError::GridMismatch {
                    expected: self.grid(),
                    got: m.grid(),
                });
            }
        }
        let mut out = Vec::with_capacity(microstructures.len());
        for chunk in microstructures.chunks(INFER_CHUNK) {
            let images = images_tensor(chunk, self.grid());
            let y = self
                .predict_images(&images)
                .map_err(|e| PredictError::Numeric(e.to_string()))?;
            for row in y.rows() {
                out.push(CompositeProperties::from_array([row[0], row[1], row[2]]));
            }
        }
        Ok(out)
    }
}
