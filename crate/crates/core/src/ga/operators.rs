//! Selection, crossover, and mutation primitives.
//!
//! All operators draw from a caller-provided rng and consume a predictable
//! number of draws, so a whole GA run is reproducible from one seed.

use rand::Rng;

/// Mass added to every roulette slot when fitness values are not all
/// positive, so the worst genome keeps a small nonzero chance.
const SHIFT_EPS: f64 = 1e-12;

/// Fitness-proportional (roulette-wheel) selection; returns the index of the
/// chosen genome.
///
/// Selection probability is proportional to fitness. When any fitness is
/// non-positive, all values are first shifted by `-min + SHIFT_EPS` so every
/// slot keeps positive mass; equal fitness therefore degrades to a uniform
/// pick no matter its sign.
pub fn roulette<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> usize {
    assert!(!fitness.is_empty(), "roulette over an empty population");
    let min = fitness.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = if min <= 0.0 { -min + SHIFT_EPS } else { 0.0 };
    let total: f64 = fitness.iter().map(|f| f + shift).sum();
    if !(total > 0.0 && total.is_finite()) {
        return rng.random_range(0..fitness.len());
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, f) in fitness.iter().enumerate() {
        acc += f + shift;
        if target < acc {
            return i;
        }
    }
    fitness.len() - 1
}

/// Deterministic two-point splice: the children exchange the middle segment
/// `[cut1, cut2)`. Cuts must be interior and ordered:
/// `0 < cut1 < cut2 < len`.
pub fn splice(a: &[bool], b: &[bool], cut1: usize, cut2: usize) -> (Vec<bool>, Vec<bool>) {
    assert_eq!(a.len(), b.len(), "crossover parents must have equal length");
    assert!(
        0 < cut1 && cut1 < cut2 && cut2 < a.len(),
        "cuts ({cut1}, {cut2}) must satisfy 0 < cut1 < cut2 < {}",
        a.len()
    );
    let mut first = a.to_vec();
    let mut second = b.to_vec();
    first[cut1..cut2].copy_from_slice(&b[cut1..cut2]);
    second[cut1..cut2].copy_from_slice(&a[cut1..cut2]);
    (first, second)
}

/// Two-point crossover at two distinct interior cuts drawn uniformly.
/// Genomes too short for two interior cuts are returned as clones.
pub fn two_point_crossover<R: Rng + ?Sized>(
    a: &[bool],
    b: &[bool],
    rng: &mut R,
) -> (Vec<bool>, Vec<bool>) {
    assert_eq!(a.len(), b.len(), "crossover parents must have equal length");
    let genes = a.len();
    if genes < 3 {
        return (a.to_vec(), b.to_vec());
    }
    let first = rng.random_range(1..genes);
    let mut second = rng.random_range(1..genes);
    while second == first {
        second = rng.random_range(1..genes);
    }
    let (lo, hi) = if first < second {
        (first, second)
    } else {
        (second, first)
    };
    splice(a, b, lo, hi)
}

/// Flips each gene independently with probability `rate`. Exactly one draw
/// is consumed per gene, so the rng stream position never depends on which
/// genes happened to flip.
pub fn mutate<R: Rng + ?Sized>(genome: &mut [bool], rate: f64, rng: &mut R) {
    for gene in genome.iter_mut() {
        if rng.random::<f64>() < rate {
            *gene = !*gene;
        }
    }
}
