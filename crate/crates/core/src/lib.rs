//! Composite design pipeline for cracked two-phase checkerboard plates.
//!
//! The crate covers the full loop from physics to design: a plane-stress
//! finite-element solver labels microstructures with effective modulus,
//! strength, and toughness ([`fem`]); [`dataset`] generates reproducible
//! labeled datasets in parallel; [`linear`] and [`cnn`] fit surrogate models
//! to those labels; and [`ga`] searches the design space with a genetic
//! algorithm driven by either the exact solver or a trained surrogate.
//!
//! Everything downstream of a root seed is deterministic, including parallel
//! dataset generation and CNN training, so any run can be reproduced from its
//! command line.

pub mod cnn;
pub mod dataset;
pub mod fem;
pub mod ga;
pub mod grid;
pub mod linear;
pub mod material;
pub mod microstructure;
pub mod predict;
pub mod properties;
pub mod seeds;

pub use grid::Grid;
pub use material::{ElasticMaterial, MaterialPair};
pub use microstructure::Microstructure;
pub use predict::PropertyPredictor;
pub use properties::{CompositeProperties, PropertyKind};
