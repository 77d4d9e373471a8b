//! Distributional statistics over labeled datasets: summary moments,
//! batch-means traces, and histogram binning for export.

use thiserror::Error;

use super::LabeledDataset;
use crate::properties::PropertyKind;

/// Summary moments of one property across a dataset.
///
/// Conventions: the standard deviation is the population (biased) form,
/// skew is the standardized third central moment, and `excess_kurtosis`
/// subtracts 3 so a normal distribution scores zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyStats {
    pub count: usize,
    pub mean: f64,
    /// Standard deviation over |mean|; non-finite when the mean is zero.
    pub coefficient_of_variation: f64,
    pub skew: f64,
    pub excess_kurtosis: f64,
}

/// Per-property summary statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub modulus: PropertyStats,
    pub strength: PropertyStats,
    pub toughness: PropertyStats,
}

impl DatasetStats {
    pub fn get(&self, kind: PropertyKind) -> &PropertyStats {
        match kind {
            PropertyKind::Modulus => &self.modulus,
            PropertyKind::Strength => &self.strength,
            PropertyKind::Toughness => &self.toughness,
        }
    }
}

/// Per-batch means and their running cumulative mean, per property.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchMeansTrace {
    batch_size: usize,
    batch_means: [Vec<f64>; 3],
    running_mean: [Vec<f64>; 3],
}

impl BatchMeansTrace {
    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn batch_count(&self) -> usize {
        self.batch_means[0].len()
    }

    /// Mean of each consecutive batch, in order.
    pub fn batch_means(&self, kind: PropertyKind) -> &[f64] {
        &self.batch_means[kind.index()]
    }

    /// Entry `k` is the mean of the first `k + 1` batch means.
    pub fn running_mean(&self, kind: PropertyKind) -> &[f64] {
        &self.running_mean[kind.index()]
    }
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("zero variance: every value equals {0}")]
    ZeroVariance(f64),
    #[error("batch size {batch_size} does not divide sample count {count}")]
    IndivisibleBatch { batch_size: usize, count: usize },
    #[error("histogram needs at least one bin")]
    ZeroBins,
}

/// Single-pass central moments of a value sequence (Pebay's online update),
/// reported in the conventions of [`PropertyStats`].
pub fn moments(values: &[f64]) -> Result<PropertyStats, StatsError> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::TooFewSamples { need: 2, got: n });
    }

    let (mut mean, mut m2, mut m3, mut m4) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (i, &x) in values.iter().enumerate() {
        let k = (i + 1) as f64;
        let delta = x - mean;
        let delta_n = delta / k;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * (k - 1.0);
        mean += delta_n;
        m4 += term1 * delta_n2 * (k * k - 3.0 * k + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
        m3 += term1 * delta_n * (k - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
    }

    if m2 == 0.0 {
        return Err(StatsError::ZeroVariance(mean));
    }
    let nf = n as f64;
    let std_dev = (m2 / nf).sqrt();
    Ok(PropertyStats {
        count: n,
        mean,
        coefficient_of_variation: std_dev / mean.abs(),
        skew: nf.sqrt() * m3 / m2.powf(1.5),
        excess_kurtosis: nf * m4 / (m2 * m2) - 3.0,
    })
}

/// Summary statistics for all three properties of a dataset.
pub fn summary_stats(dataset: &LabeledDataset) -> Result<DatasetStats, StatsError> {
    let stat = |kind| moments(&dataset.labels(kind));
    Ok(DatasetStats {
        modulus: stat(PropertyKind::Modulus)?,
        strength: stat(PropertyKind::Strength)?,
        toughness: stat(PropertyKind::Toughness)?,
    })
}

/// Means of consecutive batches of `batch_size` samples, plus the running
/// cumulative mean over batches. `batch_size` must divide the sample count.
pub fn batch_means(dataset: &LabeledDataset, batch_size: usize) -> Result<BatchMeansTrace, StatsError> {
    let count = dataset.len();
    if count == 0 {
        return Err(StatsError::TooFewSamples { need: 1, got: 0 });
    }
    if batch_size == 0 || count % batch_size != 0 {
        return Err(StatsError::IndivisibleBatch { batch_size, count });
    }

    let mut trace = BatchMeansTrace {
        batch_size,
        batch_means: Default::default(),
        running_mean: Default::default(),
    };
    for kind in PropertyKind::ALL {
        let values = dataset.labels(kind);
        let means: Vec<f64> = values
            .chunks_exact(batch_size)
            .map(|chunk| chunk.iter().sum::<f64>() / batch_size as f64)
            .collect();
        let mut cumulative = 0.0;
        let running: Vec<f64> = means
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                cumulative += m;
                cumulative / (k + 1) as f64
            })
            .collect();
        trace.batch_means[kind.index()] = means;
        trace.running_mean[kind.index()] = running;
    }
    Ok(trace)
}

/// An equal-width histogram: `edges` has one more entry than `counts`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Bins `values` into `bins` equal-width intervals spanning their range.
/// The maximum value lands in the last bin. Constant data is centered in a
/// unit-width range so the output stays well formed.
pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram, StatsError> {
    if bins == 0 {
        return Err(StatsError::ZeroBins);
    }
    if values.is_empty() {
        return Err(StatsError::TooFewSamples { need: 1, got: 0 });
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if min == max {
        min -= 0.5;
        max += 0.5;
    }
    let width = (max - min) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|b| min + b as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for &v in values {
        let raw = ((v - min) / width) as usize;
        counts[raw.min(bins - 1)] += 1;
    }
    Ok(Histogram { edges, counts })
}
