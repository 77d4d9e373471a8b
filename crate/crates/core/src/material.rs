//! Linear-elastic phase materials and the stiff/soft pairing.

use thiserror::Error;

/// Isotropic linear-elastic material under plane stress, with a von Mises
/// failure strain for the strength criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticMaterial {
    youngs_modulus: f64,
    poisson_ratio: f64,
    failure_strain: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum MaterialError {
    #[error("Young's modulus must be positive and finite, got {0}")]
    InvalidModulus(f64),
    #[error("Poisson ratio must lie in [0, 0.5), got {0}")]
    InvalidPoisson(f64),
    #[error("failure strain must be positive and finite, got {0}")]
    InvalidFailureStrain(f64),
    #[error("stiff phase modulus {stiff} must exceed soft phase modulus {soft}")]
    StiffNotStiffer { stiff: f64, soft: f64 },
}

impl ElasticMaterial {
    pub fn new(
        youngs_modulus: f64,
        poisson_ratio: f64,
        failure_strain: f64,
    ) -> Result<Self, MaterialError> {
        if !(youngs_modulus.is_finite() && youngs_modulus > 0.0) {
            return Err(MaterialError::InvalidModulus(youngs_modulus));
        }
        if !(poisson_ratio.is_finite() && (0.0..0.5).contains(&poisson_ratio)) {
            return Err(MaterialError::InvalidPoisson(poisson_ratio));
        }
        if !(failure_strain.is_finite() && failure_strain > 0.0) {
            return Err(MaterialError::InvalidFailureStrain(failure_strain));
        }
        Ok(Self {
            youngs_modulus,
            poisson_ratio,
            failure_strain,
        })
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.poisson_ratio
    }

    pub fn failure_strain(&self) -> f64 {
        self.failure_strain
    }

    /// Bulk modulus E / (3(1 - 2nu)). Documented for completeness; the
    /// plane-stress constitutive matrix does not go through it.
    pub fn bulk_modulus(&self) -> f64 {
        self.youngs_modulus / (3.0 * (1.0 - 2.0 * self.poisson_ratio))
    }
}

/// The two-phase material system: a stiff brittle phase and a soft ductile
/// phase sharing one Poisson ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialPair {
    stiff: ElasticMaterial,
    soft: ElasticMaterial,
}

impl MaterialPair {
    pub fn new(stiff: ElasticMaterial, soft: ElasticMaterial) -> Result<Self, MaterialError> {
        if stiff.youngs_modulus <= soft.youngs_modulus {
            return Err(MaterialError::StiffNotStiffer {
                stiff: stiff.youngs_modulus,
                soft: soft.youngs_modulus,
            });
        }
        Ok(Self { stiff, soft })
    }

    pub fn stiff(&self) -> ElasticMaterial {
        self.stiff
    }

    pub fn soft(&self) -> ElasticMaterial {
        self.soft
    }

    /// Returns the pair with both moduli scaled by `factor` (failure strains
    /// and Poisson ratios unchanged).
    pub fn scaled_modulus(&self, factor: f64) -> Result<Self, MaterialError> {
        let stiff = ElasticMaterial::new(
            self.stiff.youngs_modulus * factor,
            self.stiff.poisson_ratio,
            self.stiff.failure_strain,
        )?;
        let soft = ElasticMaterial::new(
            self.soft.youngs_modulus * factor,
            self.soft.poisson_ratio,
            self.soft.failure_strain,
        )?;
        MaterialPair::new(stiff, soft)
    }
}

impl Default for MaterialPair {
    /// The reference system: stiff phase E = 1 GPa, failure strain 10%; soft
    /// phase E = 0.1 GPa, failure strain 100%; nu = 1/3 for both. All lengths
    /// and stresses in the crate are in the implied GPa / unit-plate system.
    fn default() -> Self {
        Self {
            stiff: ElasticMaterial::new(1.0, 1.0 / 3.0, 0.1).unwrap(),
            soft: ElasticMaterial::new(0.1, 1.0 / 3.0, 1.0).unwrap(),
        }
    }
}
