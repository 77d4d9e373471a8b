//! Checkerboard microstructures: genome bits, element grid, image form.
//!
//! One bit per element, row-major starting at the symmetry line, so row 0
//! holds the crack-tip ligament element and gene `g` maps to element
//! `(g / width, g % width)`. Bit value 1 marks the soft phase, 0 the stiff
//! phase. Every module in the crate goes through this mapping; nothing else
//! re-derives it.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::Grid;
use crate::seeds::domain_seed;

/// Binary material layout over a half-model element grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Microstructure {
    grid: Grid,
    bits: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MicrostructureError {
    #[error("expected {expected} bits for grid {grid}, got {got}")]
    WrongLength {
        grid: Grid,
        expected: usize,
        got: usize,
    },
    #[error("packed buffer truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("packed header names unsupported grid {width}x{height}")]
    UnsupportedGrid { width: u8, height: u8 },
    #[error("packed buffer has nonzero padding bits past the genome")]
    DirtyPadding,
}

impl Microstructure {
    /// Builds a microstructure from genome bits (row-major, 1 = soft).
    pub fn new(grid: Grid, bits: Vec<bool>) -> Result<Self, MicrostructureError> {
        if bits.len() != grid.gene_count() {
            return Err(MicrostructureError::WrongLength {
                grid,
                expected: grid.gene_count(),
                got: bits.len(),
            });
        }
        Ok(Self { grid, bits })
    }

    pub fn all_stiff(grid: Grid) -> Self {
        Self {
            grid,
            bits: vec![false; grid.gene_count()],
        }
    }

    pub fn all_soft(grid: Grid) -> Self {
        Self {
            grid,
            bits: vec![true; grid.gene_count()],
        }
    }

    /// Draws each bit independently with probability 1/2, reproducibly.
    pub fn random_uniform(grid: Grid, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(domain_seed(seed, "microstructure"));
        Self::random_with_rng(grid, &mut rng)
    }

    /// Same draw as [`random_uniform`](Self::random_uniform) from a caller
    /// rng (one draw per gene, in genome order).
    pub fn random_with_rng(grid: Grid, rng: &mut impl Rng) -> Self {
        let bits = (0..grid.gene_count()).map(|_| rng.random::<bool>()).collect();
        Self { grid, bits }
    }

    /// Draws a soft-element count uniformly over `0..=gene_count`, then a
    /// uniformly random arrangement with exactly that count.
    ///
    /// Each element is still soft with marginal probability 1/2, but unlike
    /// [`random_with_rng`](Self::random_with_rng) the volume fraction itself
    /// is spread evenly over [0, 1] instead of concentrating near one half,
    /// so a sample sweeps the full property range from all-stiff to all-soft.
    pub fn random_volume_fraction_uniform(grid: Grid, rng: &mut impl Rng) -> Self {
        let n = grid.gene_count();
        let soft_count = rng.random_range(0..=n);
        let mut order: Vec<usize> = (0..n).collect();
        // Partial Fisher-Yates: the first `soft_count` entries end up being a
        // uniform subset of that size.
        for i in 0..soft_count {
            let j = rng.random_range(i..n);
            order.swap(i, j);
        }
        let mut bits = vec![false; n];
        for &g in &order[..soft_count] {
            bits[g] = true;
        }
        Self { grid, bits }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn gene_count(&self) -> usize {
        self.bits.len()
    }

    /// Genome index of element `(row, col)`.
    pub fn gene_index(grid: Grid, row: usize, col: usize) -> usize {
        debug_assert!(row < grid.height() && col < grid.width());
        row * grid.width() + col
    }

    /// Element coordinate `(row, col)` of gene `g`.
    pub fn element_of(grid: Grid, g: usize) -> (usize, usize) {
        debug_assert!(g < grid.gene_count());
        (g / grid.width(), g % grid.width())
    }

    /// True when element `(row, col)` is soft.
    pub fn is_soft(&self, row: usize, col: usize) -> bool {
        self.bits[Self::gene_index(self.grid, row, col)]
    }

    /// Genome index of the crack-tip ligament element (row 0, first bonded
    /// column past the crack).
    pub fn crack_tip_gene(grid: Grid) -> usize {
        Self::gene_index(grid, 0, grid.crack_elements())
    }

    pub fn volume_fraction_soft(&self) -> f64 {
        self.bits.iter().filter(|&&b| b).count() as f64 / self.bits.len() as f64
    }

    /// Single-channel image, pixel `(r, c)` = bit at element `(r, c)` as
    /// 0.0/1.0. Shape is `(height, width)`.
    pub fn to_image(&self) -> Array2<f64> {
        let (h, w) = (self.grid.height(), self.grid.width());
        Array2::from_shape_fn((h, w), |(r, c)| {
            if self.bits[Self::gene_index(self.grid, r, c)] {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Serializes to a 2-byte `[width, height]` header plus the genome bits,
    /// LSB-first within each byte, zero padding in the last byte.
    pub fn pack(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::packed_len(self.grid));
        out.push(self.grid.width() as u8);
        out.push(self.grid.height() as u8);
        out.extend(std::iter::repeat(0u8).take(self.bits.len().div_ceil(8)));
        for (g, &bit) in self.bits.iter().enumerate() {
            if bit {
                out[2 + g / 8] |= 1 << (g % 8);
            }
        }
        out
    }

    /// Packed size in bytes for a grid's genomes.
    pub fn packed_len(grid: Grid) -> usize {
        2 + grid.gene_count().div_ceil(8)
    }

    /// Inverse of [`pack`](Self::pack). Rejects truncated buffers, unknown
    /// dimensions, and dirty padding bits.
    pub fn unpack(buf: &[u8]) -> Result<Self, MicrostructureError> {
        if buf.len() < 2 {
            return Err(MicrostructureError::Truncated {
                expected: 2,
                got: buf.len(),
            });
        }
        let (w, h) = (buf[0], buf[1]);
        let grid = Grid::from_dims(w as usize, h as usize)
            .ok_or(MicrostructureError::UnsupportedGrid { width: w, height: h })?;
        let expected = Self::packed_len(grid);
        if buf.len() != expected {
            return Err(MicrostructureError::Truncated {
                expected,
                got: buf.len(),
            });
        }
        let n = grid.gene_count();
        let bits: Vec<bool> = (0..n).map(|g| buf[2 + g / 8] & (1 << (g % 8)) != 0).collect();
        let used = n % 8;
        if used != 0 && buf[expected - 1] >> used != 0 {
            return Err(MicrostructureError::DirtyPadding);
        }
        Ok(Self { grid, bits })
    }
}
