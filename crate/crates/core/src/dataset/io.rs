//! Binary dataset persistence and CSV export.
//!
//! File layout (all integers little-endian):
//!
//! ```text
//! magic   4 bytes  "CBDS"
//! version 1 byte   currently 1
//! width   1 byte   grid width in elements
//! height  1 byte   grid height in elements
//! count   8 bytes  number of records
//! records count x (packed genome ++ modulus f64 ++ strength f64 ++ toughness f64)
//! ```
//!
//! Records are fixed width, so any sample can be located by offset alone.

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::stats::{BatchMeansTrace, DatasetStats, Histogram};
use super::{LabeledDataset, LabeledSample};
use crate::grid::Grid;
use crate::microstructure::{Microstructure, MicrostructureError};
use crate::properties::{CompositeProperties, PropertyKind};

const MAGIC: &[u8; 4] = b"CBDS";
const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 2 + 8;

#[derive(Debug, Error)]
pub enum DatasetIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic bytes: not a dataset file")]
    BadMagic,
    #[error("unsupported dataset format version {0}")]
    UnsupportedVersion(u8),
    #[error("header names unknown grid {width}x{height}")]
    UnknownGrid { width: u8, height: u8 },
    #[error("file truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("{extra} trailing bytes after the final record")]
    TrailingBytes { extra: usize },
    #[error("record {index}: {source}")]
    BadRecord {
        index: usize,
        source: MicrostructureError,
    },
    #[error("record {index} was packed for grid {got}, file declares {expected}")]
    RecordGridMismatch {
        index: usize,
        expected: Grid,
        got: Grid,
    },
    #[error("record {index} holds a non-finite label")]
    NonFiniteLabel { index: usize },
}

fn to_bytes(dataset: &LabeledDataset) -> Vec<u8> {
    let grid = dataset.grid();
    let record_len = Microstructure::packed_len(grid) + 24;
    let mut buf = Vec::with_capacity(HEADER_LEN + record_len * dataset.len());
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    buf.push(grid.width() as u8);
    buf.push(grid.height() as u8);
    buf.extend_from_slice(&(dataset.len() as u64).to_le_bytes());
    for sample in dataset.samples() {
        buf.extend_from_slice(&sample.microstructure.pack());
        for value in sample.properties.as_array() {
            buf.extend_from_slice(&value.to_le_bytes());
        }
    }
    buf
}

fn from_bytes(buf: &[u8]) -> Result<LabeledDataset, DatasetIoError> {
    if buf.len() < HEADER_LEN {
        return Err(DatasetIoError::Truncated {
            expected: HEADER_LEN,
            got: buf.len(),
        });
    }
    if &buf[..4] != MAGIC {
        return Err(DatasetIoError::BadMagic);
    }
    if buf[4] != VERSION {
        return Err(DatasetIoError::UnsupportedVersion(buf[4]));
    }
    let (width, height) = (buf[5], buf[6]);
    let grid = Grid::from_dims(width as usize, height as usize)
        .ok_or(DatasetIoError::UnknownGrid { width, height })?;
    let count = u64::from_le_bytes(buf[7..15].try_into().expect("8 header bytes")) as usize;

    let record_len = Microstructure::packed_len(grid) + 24;
    let expected = HEADER_LEN + count * record_len;
    if buf.len() < expected {
        return Err(DatasetIoError::Truncated {
            expected,
            got: buf.len(),
        });
    }
    if buf.len() > expected {
        return Err(DatasetIoError::TrailingBytes {
            extra: buf.len() - expected,
        });
    }

    let mut samples = Vec::with_capacity(count);
    for index in 0..count {
        let record = &buf[HEADER_LEN + index * record_len..HEADER_LEN + (index + 1) * record_len];
        let (genome, labels) = record.split_at(record_len - 24);
        let microstructure = Microstructure::unpack(genome)
            .map_err(|source| DatasetIoError::BadRecord { index, source })?;
        if microstructure.grid() != grid {
            return Err(DatasetIoError::RecordGridMismatch {
                index,
                expected: grid,
                got: microstructure.grid(),
            });
        }
        let mut values = [0.0f64; 3];
        for (slot, chunk) in values.iter_mut().zip(labels.chunks_exact(8)) {
            *slot = f64::from_le_bytes(chunk.try_into().expect("8-byte label"));
        }
        let properties = CompositeProperties::from_array(values);
        if !properties.is_finite() {
            return Err(DatasetIoError::NonFiniteLabel { index });
        }
        samples.push(LabeledSample {
            microstructure,
            properties,
        });
    }
    Ok(LabeledDataset { grid, samples })
}

/// Writes a dataset file; the round trip through [`read_dataset`] is
/// bit-exact.
pub fn write_dataset(path: &Path, dataset: &LabeledDataset) -> Result<(), DatasetIoError> {
    Ok(fs::write(path, to_bytes(dataset))?)
}

/// Reads a dataset file written by [`write_dataset`].
pub fn read_dataset(path: &Path) -> Result<LabeledDataset, DatasetIoError> {
    from_bytes(&fs::read(path)?)
}

/// Writes summary statistics as CSV, one row per property.
pub fn write_stats_csv(path: &Path, stats: &DatasetStats) -> Result<(), DatasetIoError> {
    let mut out = String::from("property,count,mean,coefficient_of_variation,skew,excess_kurtosis\n");
    for kind in PropertyKind::ALL {
        let s = stats.get(kind);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            kind, s.count, s.mean, s.coefficient_of_variation, s.skew, s.excess_kurtosis
        ));
    }
    Ok(fs::write(path, out)?)
}

/// Writes a batch-means trace as CSV, one row per batch.
pub fn write_batch_means_csv(path: &Path, trace: &BatchMeansTrace) -> Result<(), DatasetIoError> {
    let mut out = String::from(
        "batch,modulus_mean,strength_mean,toughness_mean,\
         modulus_running,strength_running,toughness_running\n",
    );
    for k in 0..trace.batch_count() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            k,
            trace.batch_means(PropertyKind::Modulus)[k],
            trace.batch_means(PropertyKind::Strength)[k],
            trace.batch_means(PropertyKind::Toughness)[k],
            trace.running_mean(PropertyKind::Modulus)[k],
            trace.running_mean(PropertyKind::Strength)[k],
            trace.running_mean(PropertyKind::Toughness)[k],
        ));
    }
    Ok(fs::write(path, out)?)
}

/// Writes a histogram as CSV, one row per bin.
pub fn write_histogram_csv(path: &Path, histogram: &Histogram) -> Result<(), DatasetIoError> {
    let mut out = String::from("bin_start,bin_end,count\n");
    for (b, &count) in histogram.counts.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            histogram.edges[b],
            histogram.edges[b + 1],
            count
        ));
    }
    Ok(fs::write(path, out)?)
}
