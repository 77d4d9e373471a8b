//! Amplified objective function for multi-property optimization.

use super::GaError;
use crate::properties::{CompositeProperties, PropertyKind};

/// Exponent of the amplified objective. Raising each normalized property to
/// the fourth power rewards designs that stay close to the single-objective
/// optima on every weighted property at once.
pub const AOF_EXPONENT: i32 = 4;

/// Non-negative property weights of the amplified objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AofWeights {
    pub modulus: f64,
    pub strength: f64,
    pub toughness: f64,
}

impl AofWeights {
    /// Validates that every weight is finite and non-negative and that at
    /// least one is positive.
    pub fn new(modulus: f64, strength: f64, toughness: f64) -> Result<Self, GaError> {
        let weights = Self {
            modulus,
            strength,
            toughness,
        };
        for kind in PropertyKind::ALL {
            let w = weights.get(kind);
            if !(w.is_finite() && w >= 0.0) {
                return Err(GaError::BadObjective(format!(
                    "{kind} weight {w} must be finite and non-negative"
                )));
            }
        }
        if weights.modulus + weights.strength + weights.toughness <= 0.0 {
            return Err(GaError::BadObjective(
                "at least one weight must be positive".to_string(),
            ));
        }
        Ok(weights)
    }

    /// Equal thirds over all three properties.
    pub fn balanced() -> Self {
        Self {
            modulus: 1.0 / 3.0,
            strength: 1.0 / 3.0,
            toughness: 1.0 / 3.0,
        }
    }

    pub fn get(&self, kind: PropertyKind) -> f64 {
        match kind {
            PropertyKind::Modulus => self.modulus,
            PropertyKind::Strength => self.strength,
            PropertyKind::Toughness => self.toughness,
        }
    }
}

/// Amplified objective `sum_k w_k (p_k / n_k)^4` over the three properties.
///
/// The normalizers are positive reference values, usually each property's
/// single-objective optimum, so a design matching a reference scores the
/// corresponding weight exactly.
pub fn aof(
    properties: &CompositeProperties,
    weights: &AofWeights,
    normalizers: &CompositeProperties,
) -> f64 {
    PropertyKind::ALL
        .into_iter()
        .map(|kind| {
            weights.get(kind) * (properties.get(kind) / normalizers.get(kind)).powi(AOF_EXPONENT)
        })
        .sum()
}
