//! Genetic-algorithm search over microstructure genomes.
//!
//! The GA maximizes a scalar fitness over fixed-length bit genomes using
//! roulette-wheel selection, two-point crossover, per-gene mutation, and
//! elitism ([`evolve`]). Fitness comes from a [`FitnessOracle`]; the
//! [`PropertyObjectiveOracle`] adapter turns any property predictor — the
//! exact FE solver or a trained surrogate — into one, either for a single
//! property or for the amplified multi-property objective ([`aof`]).

mod aof;
mod evolve;
mod operators;
mod oracle;

pub use aof::{aof, AofWeights, AOF_EXPONENT};
pub use evolve::{evolve, GaParams, GaRun, Generation, STAGNATION_EPS};
pub use operators::{mutate, roulette, splice, two_point_crossover};
pub use oracle::{FitnessOracle, Objective, PropertyObjectiveOracle};

use thiserror::Error;

use crate::predict::PredictError;

#[derive(Debug, Error)]
pub enum GaError {
    #[error("invalid GA parameter: {0}")]
    BadParams(String),
    #[error("invalid objective: {0}")]
    BadObjective(String),
    #[error("fitness oracle failed: {0}")]
    Oracle(#[from] PredictError),
    #[error("genome has {got} genes, oracle expects {expected}")]
    GenomeLength { expected: usize, got: usize },
    #[error("oracle returned {got} fitness values for {expected} genomes")]
    OracleCount { expected: usize, got: usize },
    #[error("non-finite fitness for genome {index} in generation {generation}")]
    NonFiniteFitness { generation: usize, index: usize },
}
