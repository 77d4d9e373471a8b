//! Loading saved surrogate models of either kind from one path.
//!
//! The two formats are self-identifying: CNN checkpoints start with the
//! `CBNN` magic bytes, linear bundles are CSV text. `eval` and `optimize`
//! detect the kind from the file, so no flag has to repeat it.

use std::fs;
use std::path::Path;

use checkerboard::cnn::{load_checkpoint, CnnModel};
use checkerboard::linear::LinearSurrogate;
use checkerboard::predict::PropertyPredictor;

use crate::error::{io_error, CliError};

const CNN_MAGIC: &[u8; 4] = b"CBNN";

pub enum LoadedModel {
    Linear(LinearSurrogate),
    Cnn(CnnModel),
}

impl LoadedModel {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = fs::read(path).map_err(|e| io_error(path.display(), e))?;
        if bytes.starts_with(CNN_MAGIC) {
            let model = load_checkpoint(path)
                .map_err(|e| io_error(format!("checkpoint {}", path.display()), e))?;
            Ok(LoadedModel::Cnn(model))
        } else {
            let model = LinearSurrogate::load_csv(path)
                .map_err(|e| io_error(format!("model {}", path.display()), e))?;
            Ok(LoadedModel::Linear(model))
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            LoadedModel::Linear(_) => "linear",
            LoadedModel::Cnn(_) => "cnn",
        }
    }

    pub fn as_predictor(&self) -> &dyn PropertyPredictor {
        match self {
            LoadedModel::Linear(model) => model,
            LoadedModel::Cnn(model) => model,
        }
    }
}
