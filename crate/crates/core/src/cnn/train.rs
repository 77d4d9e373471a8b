//! Mini-batch training loop with Adam and per-epoch loss history.

use std::fs;
use std::path::Path;

use ndarray::{Array2, Array4};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{images_tensor, Adam, AdamState, CnnError, CnnModel, INFER_CHUNK};
use crate::dataset::LabeledDataset;
use crate::properties::PropertyKind;
use crate::seeds::domain_seed;

/// Training hyper-parameters. Defaults: 200 epochs, batch 128, Adam at
/// 1e-3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 128,
            learning_rate: 1e-3,
            seed: 0,
        }
    }
}

/// Losses of one epoch, all in normalized label space. Train losses average
/// the mini-batch training losses; test losses come from a full
/// inference-mode pass (`NaN` when the test set is empty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_mse: f64,
    pub train_mse_per_property: [f64; 3],
    pub test_mse: f64,
    pub test_mse_per_property: [f64; 3],
}

/// Per-epoch loss history of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn final_train_mse(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.train_mse)
    }
}

/// Population mean and standard deviation of each property, accumulated in
/// the order given by `indices` so the result does not depend on how the
/// dataset happens to be ordered.
fn label_statistics(dataset: &LabeledDataset, indices: &[usize]) -> ([f64; 3], [f64; 3]) {
    let n = indices.len() as f64;
    let mut mean = [0.0f64; 3];
    let mut std = [0.0f64; 3];
    for (k, kind) in PropertyKind::ALL.into_iter().enumerate() {
        let value = |i: usize| dataset.samples()[i].properties.get(kind);
        let m = indices.iter().map(|&i| value(i)).sum::<f64>() / n;
        let var = indices
            .iter()
            .map(|&i| (value(i) - m) * (value(i) - m))
            .sum::<f64>()
            / n;
        mean[k] = m;
        // A constant property would zero the divisor; fall back to 1 so
        // normalization stays the identity shift.
        std[k] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    (mean, std)
}

/// Indices of `dataset` sorted by packed genome. Duplicated genomes carry
/// identical labels, so any stable order among them is equivalent.
fn canonical_indices(dataset: &LabeledDataset) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..dataset.len()).collect();
    indices.sort_by_key(|&i| dataset.samples()[i].microstructure.pack());
    indices
}

/// Normalized target matrix for the samples selected by `indices`, one row
/// per index in order.
fn normalized_targets(
    model: &CnnModel,
    dataset: &LabeledDataset,
    indices: &[usize],
) -> Array2<f64> {
    let mut targets = Array2::<f64>::zeros((indices.len(), 3));
    for (row, &i) in indices.iter().enumerate() {
        let norm = model.normalize_label(dataset.samples()[i].properties.as_array());
        for k in 0..3 {
            targets[(row, k)] = norm[k];
        }
    }
    targets
}

/// Normalized-space MSE of inference-mode predictions over a dataset,
/// total and per property. `NaN` on an empty dataset.
fn infer_mse(
    model: &CnnModel,
    images: &Array4<f64>,
    targets: &Array2<f64>,
) -> Result<(f64, [f64; 3]), CnnError> {
    let n = images.dim().0;
    if n == 0 {
        return Ok((f64::NAN, [f64::NAN; 3]));
    }
    let mut per = [0.0f64; 3];
    let mut start = 0;
    while start < n {
        let end = (start + INFER_CHUNK).min(n);
        let chunk = images.slice(ndarray::s![start..end, .., .., ..]).to_owned();
        let y = model.forward_infer_norm(&chunk)?;
        for (row, target) in y.rows().into_iter().zip(targets.rows().into_iter().skip(start)) {
            for k in 0..3 {
                let r = row[k] - target[k];
                per[k] += r * r;
            }
        }
        start = end;
    }
    for p in &mut per {
        *p /= n as f64;
    }
    Ok(((per[0] + per[1] + per[2]) / 3.0, per))
}

/// Trains `model` in place and returns the loss history.
///
/// The sample order is first canonicalized by packed genome, then shuffled
/// from the config seed, so the result is independent of the incoming
/// dataset order and reproducible for equal `(datasets, config)`.
pub fn train(
    model: &mut CnnModel,
    train_set: &LabeledDataset,
    test_set: &LabeledDataset,
    config: &TrainConfig,
) -> Result<TrainHistory, CnnError> {
    if config.epochs == 0 || config.batch_size == 0 {
        return Err(CnnError::BadConfig(
            "epochs and batch size must be positive".to_string(),
        ));
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(CnnError::BadConfig(
            "learning rate must be positive and finite".to_string(),
        ));
    }
    for ds in [train_set, test_set] {
        if ds.grid() != model.grid() {
            return Err(CnnError::GridMismatch {
                expected: model.grid(),
                got: ds.grid(),
            });
        }
    }
    let n = train_set.len();
    if n == 0 {
        return Err(CnnError::EmptyTrainSet);
    }

    let canonical = canonical_indices(train_set);
    let (mean, std) = label_statistics(train_set, &canonical);
    model.set_label_stats(mean, std)?;

    let ordered: Vec<_> = canonical
        .iter()
        .map(|&i| train_set.samples()[i].microstructure.clone())
        .collect();
    let images_all = images_tensor(&ordered, model.grid());
    let targets_all = normalized_targets(model, train_set, &canonical);

    // The test pass accumulates in canonical order too, so reported losses
    // are independent of the test set's ordering as well.
    let test_canonical = canonical_indices(test_set);
    let test_micros: Vec<_> = test_canonical
        .iter()
        .map(|&i| test_set.samples()[i].microstructure.clone())
        .collect();
    let test_images = images_tensor(&test_micros, model.grid());
    let test_targets = normalized_targets(model, test_set, &test_canonical);

    let adam = Adam::with_learning_rate(config.learning_rate);
    let mut states: Vec<AdamState> = model
        .param_slices_mut()
        .iter()
        .map(|s| AdamState::new(s.len()))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(domain_seed(config.seed, "train"));
    let mut order: Vec<usize> = (0..n).collect();
    let (h, w) = (model.grid().height(), model.grid().width());
    let mut records = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut train_sum = 0.0;
        let mut train_per = [0.0f64; 3];

        for (batch_index, batch) in order.chunks(config.batch_size).enumerate() {
            let mut images = Array4::<f64>::zeros((batch.len(), 1, h, w));
            let mut targets = Array2::<f64>::zeros((batch.len(), 3));
            for (row, &i) in batch.iter().enumerate() {
                images
                    .slice_mut(ndarray::s![row, .., .., ..])
                    .assign(&images_all.slice(ndarray::s![i, .., .., ..]));
                targets
                    .row_mut(row)
                    .assign(&targets_all.row(i));
            }

            let output = model.train_step(&images, &targets, &mut rng)?;
            if !output.loss.is_finite() {
                return Err(CnnError::NonFiniteLoss {
                    epoch,
                    batch: batch_index,
                });
            }
            train_sum += output.loss * batch.len() as f64;
            for k in 0..3 {
                train_per[k] += output.loss_per_property[k] * batch.len() as f64;
            }

            for (slice, (state, grads)) in model
                .param_slices_mut()
                .into_iter()
                .zip(states.iter_mut().zip(output.gradients.iter()))
            {
                adam.step(state, slice, grads);
            }
        }

        let train_mse = train_sum / n as f64;
        for p in &mut train_per {
            *p /= n as f64;
        }
        let (test_mse, test_per) = infer_mse(model, &test_images, &test_targets)?;
        records.push(EpochRecord {
            epoch,
            train_mse,
            train_mse_per_property: train_per,
            test_mse,
            test_mse_per_property: test_per,
        });
    }

    Ok(TrainHistory { records })
}

/// Writes the loss history as CSV, one row per epoch.
pub fn write_history_csv(path: &Path, history: &TrainHistory) -> Result<(), CnnError> {
    let mut out = String::from(
        "epoch,train_total,train_modulus,train_strength,train_toughness,\
         test_total,test_modulus,test_strength,test_toughness\n",
    );
    for r in &history.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.epoch,
            r.train_mse,
            r.train_mse_per_property[0],
            r.train_mse_per_property[1],
            r.train_mse_per_property[2],
            r.test_mse,
            r.test_mse_per_property[0],
            r.test_mse_per_property[1],
            r.test_mse_per_property[2],
        ));
    }
    fs::write(path, out)?;
    Ok(())
}
