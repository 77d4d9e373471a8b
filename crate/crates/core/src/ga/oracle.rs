//! Fitness oracles: scalar objectives the GA maximizes.

use super::{aof, AofWeights, GaError};
use crate::microstructure::Microstructure;
use crate::predict::PropertyPredictor;
use crate::properties::{CompositeProperties, PropertyKind};

/// Scalar fitness over bit genomes. Implementations must be deterministic
/// and return one finite value per genome, in order.
pub trait FitnessOracle {
    /// Number of genes each genome must have.
    fn gene_count(&self) -> usize;

    /// Fitness of each genome, in order.
    fn evaluate(&self, genomes: &[Vec<bool>]) -> Result<Vec<f64>, GaError>;
}

/// What a [`PropertyObjectiveOracle`] maximizes.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// A single property on its own.
    Single(PropertyKind),
    /// The amplified combination of normalized properties ([`aof`]).
    Aof {
        weights: AofWeights,
        /// Positive reference values, usually the single-objective optima.
        normalizers: CompositeProperties,
    },
}

/// Adapts any property predictor — the exact FE solver or a trained
/// surrogate — to a scalar fitness.
pub struct PropertyObjectiveOracle<'a, P: PropertyPredictor + ?Sized> {
    predictor: &'a P,
    objective: Objective,
}

impl<'a, P: PropertyPredictor + ?Sized> PropertyObjectiveOracle<'a, P> {
    pub fn new(predictor: &'a P, objective: Objective) -> Result<Self, GaError> {
        if let Objective::Aof { normalizers, .. } = &objective {
            for kind in PropertyKind::ALL {
                let n = normalizers.get(kind);
                if !(n.is_finite() && n > 0.0) {
                    return Err(GaError::BadObjective(format!(
                        "{kind} normalizer {n} must be finite and positive"
                    )));
                }
            }
        }
        Ok(Self {
            predictor,
            objective,
        })
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }
}

impl<P: PropertyPredictor + ?Sized> FitnessOracle for PropertyObjectiveOracle<'_, P> {
    fn gene_count(&self) -> usize {
        self.predictor.grid().gene_count()
    }

    fn evaluate(&self, genomes: &[Vec<bool>]) -> Result<Vec<f64>, GaError> {
        let grid = self.predictor.grid();
        let microstructures = genomes
            .iter()
            .map(|genome| {
                Microstructure::new(grid, genome.clone()).map_err(|_| GaError::GenomeLength {
                    expected: grid.gene_count(),
                    got: genome.len(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let properties = self.predictor.predict_batch(&microstructures)?;
        Ok(properties
            .iter()
            .map(|p| match &self.objective {
                Objective::Single(kind) => p.get(*kind),
                Objective::Aof {
                    weights,
                    normalizers,
                } => aof(p, weights, normalizers),
            })
            .collect())
    }
}
