//! Common interface for anything that maps microstructures to properties:
//! the exact FE solver and both surrogate families. The GA and the
//! evaluation metrics are written against this trait so every backend is
//! interchangeable.

use thiserror::Error;

use crate::grid::Grid;
use crate::microstructure::Microstructure;
use crate::properties::CompositeProperties;

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("predictor built for grid {expected}, got microstructure on {got}")]
    GridMismatch { expected: Grid, got: Grid },
    #[error("prediction failed: {0}")]
    Numeric(String),
}

/// Maps microstructures to property triples. Implementations must be
/// deterministic: the same input yields bit-identical output.
pub trait PropertyPredictor: Sync {
    /// Grid the predictor expects its inputs on.
    fn grid(&self) -> Grid;

    /// Predicts a batch in order. Backends free to batch internally.
    fn predict_batch(
        &self,
        microstructures: &[Microstructure],
    ) -> Result<Vec<CompositeProperties>, PredictError>;

    fn predict_one(
        &self,
        microstructure: &Microstructure,
    ) -> Result<CompositeProperties, PredictError> {
        let mut out = self.predict_batch(std::slice::from_ref(microstructure))?;
        Ok(out.pop().expect("predict_batch returned empty output"))
    }
}
