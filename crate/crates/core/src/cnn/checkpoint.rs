//! Model checkpointing.
//!
//! File layout (all multi-byte values little-endian):
//!
//! ```text
//! magic      4 bytes "CBNN"
//! version    1 byte  currently 1
//! width      1 byte  grid width
//! height     1 byte  grid height
//! blocks     1 byte  block count
//! channels   (blocks + 1) x u16
//! f64 run:   dropout rate, bn momentum, bn eps,
//!            label mean x3, label stddev x3,
//!            per block: conv weights, conv bias, gamma, beta,
//!                       running mean, running variance,
//!            dense weights, dense bias
//! ```

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, Array4};

use super::{BatchNorm, Block, CnnConfig, CnnError, CnnModel, Conv2d, Dense, Dropout};
use crate::grid::Grid;

const MAGIC: &[u8; 4] = b"CBNN";
const VERSION: u8 = 1;

fn push_f64s<'a>(buf: &mut Vec<u8>, values: impl IntoIterator<Item = &'a f64>) {
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

/// Serializes a model to a checkpoint file.
pub fn save_checkpoint(path: &Path, model: &CnnModel) -> Result<(), CnnError> {
    let config = model.config();
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    buf.push(config.grid.width() as u8);
    buf.push(config.grid.height() as u8);
    buf.push(config.block_count() as u8);
    for &c in &config.channels {
        buf.extend_from_slice(&(c as u16).to_le_bytes());
    }
    push_f64s(
        &mut buf,
        [&config.dropout_rate, &config.bn_momentum, &config.bn_eps],
    );
    push_f64s(&mut buf, &model.label_mean);
    push_f64s(&mut buf, &model.label_std);
    for block in &model.blocks {
        push_f64s(&mut buf, block.conv.weight.iter());
        push_f64s(&mut buf, block.conv.bias.iter());
        push_f64s(&mut buf, block.bn.gamma.iter());
        push_f64s(&mut buf, block.bn.beta.iter());
        push_f64s(&mut buf, block.bn.running_mean.iter());
        push_f64s(&mut buf, block.bn.running_var.iter());
    }
    push_f64s(&mut buf, model.dense.weight.iter());
    push_f64s(&mut buf, model.dense.bias.iter());
    fs::write(path, buf)?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CnnError> {
        if self.pos + n > self.buf.len() {
            return Err(CnnError::Corrupt(format!(
                "truncated: wanted {n} bytes at offset {}, file has {}",
                self.pos,
                self.buf.len()
            )));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, CnnError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, CnnError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, CnnError> {
        let bytes = self.take(n * 8)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

/// Loads a model from a checkpoint file written by [`save_checkpoint`].
pub fn load_checkpoint(path: &Path) -> Result<CnnModel, CnnError> {
    let bytes = fs::read(path)?;
    let mut r = Reader { buf: &bytes, pos: 0 };

    if r.take(4)? != MAGIC {
        return Err(CnnError::Corrupt("bad magic bytes".to_string()));
    }
    let version = r.u8()?;
    if version != VERSION {
        return Err(CnnError::Corrupt(format!("unsupported version {version}")));
    }
    let (width, height) = (r.u8()? as usize, r.u8()? as usize);
    let grid = Grid::from_dims(width, height)
        .ok_or_else(|| CnnError::Corrupt(format!("unknown grid {width}x{height}")))?;
    let block_count = r.u8()? as usize;
    let mut channels = Vec::with_capacity(block_count + 1);
    for _ in 0..block_count + 1 {
        channels.push(r.u16()? as usize);
    }
    let header = r.f64s(3)?;
    let config = CnnConfig {
        grid,
        channels,
        dropout_rate: header[0],
        bn_momentum: header[1],
        bn_eps: header[2],
    };
    config.validate().map_err(|e| CnnError::Corrupt(e.to_string()))?;

    let label_mean: [f64; 3] = r.f64s(3)?.try_into().expect("3 values");
    let label_std: [f64; 3] = r.f64s(3)?.try_into().expect("3 values");

    let array1 = |values: Vec<f64>| Array1::from_vec(values);
    let mut blocks = Vec::with_capacity(block_count);
    for pair in config.channels.windows(2) {
        let (c_in, c_out) = (pair[0], pair[1]);
        let weight = Array4::from_shape_vec((c_out, c_in, 3, 3), r.f64s(c_out * c_in * 9)?)
            .expect("shape matches read count");
        blocks.push(Block {
            conv: Conv2d {
                weight,
                bias: array1(r.f64s(c_out)?),
            },
            bn: BatchNorm {
                gamma: array1(r.f64s(c_out)?),
                beta: array1(r.f64s(c_out)?),
                running_mean: array1(r.f64s(c_out)?),
                running_var: array1(r.f64s(c_out)?),
                momentum: config.bn_momentum,
                eps: config.bn_eps,
            },
        });
    }
    let features = config.feature_count();
    let dense = Dense {
        weight: Array2::from_shape_vec((3, features), r.f64s(3 * features)?)
            .expect("shape matches read count"),
        bias: array1(r.f64s(3)?),
    };
    if r.pos != bytes.len() {
        return Err(CnnError::Corrupt(format!(
            "{} trailing bytes after parameters",
            bytes.len() - r.pos
        )));
    }

    let model = CnnModel {
        dropout: Dropout {
            rate: config.dropout_rate,
        },
        blocks,
        dense,
        config,
        label_mean,
        label_std,
    };
    if model.param_slices().iter().any(|s| s.iter().any(|v| !v.is_finite())) {
        return Err(CnnError::Corrupt("non-finite parameter".to_string()));
    }
    Ok(model)
}
