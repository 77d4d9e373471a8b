//! Supported checkerboard grid shapes.
//!
//! A grid is `width x height` square elements covering the upper half of the
//! plate (the model exploits symmetry about the crack plane), so the full
//! plate is `width x 2*height`. Width always equals twice the height, and the
//! edge crack spans the first quarter of the width.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Grid shapes the pipeline supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grid {
    /// 4 x 2 elements, 8 genes. Small enough to enumerate exhaustively.
    G4x2,
    /// 8 x 4 elements, 32 genes.
    G8x4,
    /// 16 x 8 elements, 128 genes.
    G16x8,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unsupported grid {0:?}, expected one of 4x2, 8x4, 16x8")]
pub struct ParseGridError(pub String);

impl Grid {
    pub const ALL: [Grid; 3] = [Grid::G4x2, Grid::G8x4, Grid::G16x8];

    /// Number of element columns (crack-parallel direction).
    pub fn width(self) -> usize {
        match self {
            Grid::G4x2 => 4,
            Grid::G8x4 => 8,
            Grid::G16x8 => 16,
        }
    }

    /// Number of element rows in the half model.
    pub fn height(self) -> usize {
        self.width() / 2
    }

    /// Genes in a genome, one per element.
    pub fn gene_count(self) -> usize {
        self.width() * self.height()
    }

    /// Cracked element edges along the bottom boundary (a quarter of the
    /// plate width).
    pub fn crack_elements(self) -> usize {
        (0.25 * self.width() as f64).round() as usize
    }

    /// Looks up the grid for an element layout, if supported.
    pub fn from_dims(width: usize, height: usize) -> Option<Grid> {
        Grid::ALL
            .into_iter()
            .find(|g| g.width() == width && g.height() == height)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width(), self.height())
    }
}

impl FromStr for Grid {
    type Err = ParseGridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "4x2" => Ok(Grid::G4x2),
            "8x4" => Ok(Grid::G8x4),
            "16x8" => Ok(Grid::G16x8),
            other => Err(ParseGridError(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_are_consistent() {
        for g in Grid::ALL {
            assert_eq!(g.width(), 2 * g.height());
            assert_eq!(g.gene_count(), g.width() * g.height());
            assert_eq!(g.crack_elements() * 4, g.width());
        }
    }

    #[test]
    fn crack_lengths() {
        assert_eq!(Grid::G4x2.crack_elements(), 1);
        assert_eq!(Grid::G8x4.crack_elements(), 2);
        assert_eq!(Grid::G16x8.crack_elements(), 4);
    }

    #[test]
    fn parse_round_trips() {
        for g in Grid::ALL {
            assert_eq!(g.to_string().parse::<Grid>().unwrap(), g);
        }
        assert!("5x3".parse::<Grid>().is_err());
        assert_eq!(Grid::from_dims(8, 4), Some(Grid::G8x4));
        assert_eq!(Grid::from_dims(8, 8), None);
    }
}
