//! Effective mechanical properties extracted from a half-model solve.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// The three scalar labels attached to every microstructure: effective
/// modulus (nominal stress at unit nominal strain), strength (nominal stress
/// at crack-tip failure), and toughness (work to failure per unit volume).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeProperties {
    pub modulus: f64,
    pub strength: f64,
    pub toughness: f64,
}

impl CompositeProperties {
    pub fn get(&self, kind: PropertyKind) -> f64 {
        match kind {
            PropertyKind::Modulus => self.modulus,
            PropertyKind::Strength => self.strength,
            PropertyKind::Toughness => self.toughness,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.modulus, self.strength, self.toughness]
    }

    pub fn from_array(values: [f64; 3]) -> Self {
        Self {
            modulus: values[0],
            strength: values[1],
            toughness: values[2],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

/// Selector for one of the three properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropertyKind {
    Modulus,
    Strength,
    Toughness,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown property {0:?}, expected modulus, strength, or toughness")]
pub struct ParsePropertyError(pub String);

impl PropertyKind {
    pub const ALL: [PropertyKind; 3] = [
        PropertyKind::Modulus,
        PropertyKind::Strength,
        PropertyKind::Toughness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::Modulus => "modulus",
            PropertyKind::Strength => "strength",
            PropertyKind::Toughness => "toughness",
        }
    }

    pub fn index(self) -> usize {
        match self {
            PropertyKind::Modulus => 0,
            PropertyKind::Strength => 1,
            PropertyKind::Toughness => 2,
        }
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyKind {
    type Err = ParsePropertyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "modulus" => Ok(PropertyKind::Modulus),
            "strength" => Ok(PropertyKind::Strength),
            "toughness" => Ok(PropertyKind::Toughness),
            other => Err(ParsePropertyError(other.to_string())),
        }
    }
}
