//! The evolutionary loop: elitism plus roulette selection, two-point
//! crossover, and per-gene mutation, with early stopping on stagnation.

use std::cmp::Ordering;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::operators::{mutate, roulette, two_point_crossover};
use super::{FitnessOracle, GaError};
use crate::seeds::domain_seed;

/// Best-fitness improvement below which a window of generations counts as
/// stagnant.
pub const STAGNATION_EPS: f64 = 1e-9;

/// GA hyper-parameters. The defaults are the search settings used throughout
/// the pipeline: population 1024 over up to 150 generations, crossover 0.95,
/// mutation 0.005, elitism 0.10, stopping early once the best fitness
/// improves by less than [`STAGNATION_EPS`] over 30 generations.
#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Fraction of the population copied unchanged into the next
    /// generation. The count rounds to the nearest whole number but never
    /// drops below one, so the best genome always survives and the best
    /// fitness is monotone under a deterministic oracle.
    pub elitism: f64,
    /// Generations without meaningful improvement before the run stops
    /// early; zero disables early stopping.
    pub stagnation_window: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 1024,
            generations: 150,
            crossover_rate: 0.95,
            mutation_rate: 0.005,
            elitism: 0.10,
            stagnation_window: 30,
            seed: 0,
        }
    }
}

/// Summary of one generation, recorded right after its fitness evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub index: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_genome: Vec<bool>,
}

/// A finished GA run: per-generation history plus the last evaluated
/// population.
#[derive(Debug, Clone, PartialEq)]
pub struct GaRun {
    pub history: Vec<Generation>,
    pub final_population: Vec<Vec<bool>>,
    pub final_fitness: Vec<f64>,
}

impl GaRun {
    /// Best genome of the last generation and its fitness.
    pub fn best(&self) -> (&[bool], f64) {
        let last = self
            .history
            .last()
            .expect("a run records at least one generation");
        (&last.best_genome, last.best_fitness)
    }

    /// The `k` fittest distinct genomes of the final population, best first.
    /// Ties break toward the lexicographically smaller genome.
    pub fn top_k(&self, k: usize) -> Vec<(Vec<bool>, f64)> {
        let mut pairs: Vec<(Vec<bool>, f64)> = self
            .final_population
            .iter()
            .cloned()
            .zip(self.final_fitness.iter().copied())
            .collect();
        pairs.sort_by(compare_for_rank);
        pairs.dedup_by(|a, b| a.0 == b.0);
        pairs.truncate(k);
        pairs
    }
}

/// Orders by fitness descending, then genome ascending. Total because
/// fitness values are validated finite before use.
fn compare_for_rank(a: &(Vec<bool>, f64), b: &(Vec<bool>, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .expect("fitness validated finite")
        .then_with(|| a.0.cmp(&b.0))
}

fn validate(params: &GaParams) -> Result<(), GaError> {
    if params.population == 0 {
        return Err(GaError::BadParams("population must be positive".to_string()));
    }
    if params.generations == 0 {
        return Err(GaError::BadParams("generations must be positive".to_string()));
    }
    for (name, value) in [
        ("crossover rate", params.crossover_rate),
        ("mutation rate", params.mutation_rate),
        ("elitism", params.elitism),
    ] {
        if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
            return Err(GaError::BadParams(format!(
                "{name} {value} must lie in [0, 1]"
            )));
        }
    }
    Ok(())
}

fn evaluate_checked<O: FitnessOracle + ?Sized>(
    oracle: &O,
    population: &[Vec<bool>],
    generation: usize,
) -> Result<Vec<f64>, GaError> {
    let fitness = oracle.evaluate(population)?;
    if fitness.len() != population.len() {
        return Err(GaError::OracleCount {
            expected: population.len(),
            got: fitness.len(),
        });
    }
    if let Some(index) = fitness.iter().position(|f| !f.is_finite()) {
        return Err(GaError::NonFiniteFitness { generation, index });
    }
    Ok(fitness)
}

fn summarize(index: usize, population: &[Vec<bool>], fitness: &[f64]) -> Generation {
    let mut best = 0;
    for i in 1..fitness.len() {
        if fitness[i] > fitness[best]
            || (fitness[i] == fitness[best] && population[i] < population[best])
        {
            best = i;
        }
    }
    Generation {
        index,
        best_fitness: fitness[best],
        mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
        best_genome: population[best].clone(),
    }
}

fn elite_count(population: usize, fraction: f64) -> usize {
    ((fraction * population as f64).round() as usize).clamp(1, population)
}

fn next_generation<R: Rng>(
    population: &[Vec<bool>],
    fitness: &[f64],
    params: &GaParams,
    rng: &mut R,
) -> Vec<Vec<bool>> {
    let size = population.len();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&i, &j| {
        fitness[j]
            .partial_cmp(&fitness[i])
            .expect("fitness validated finite")
            .then_with(|| population[i].cmp(&population[j]))
    });

    let mut next: Vec<Vec<bool>> = order[..elite_count(size, params.elitism)]
        .iter()
        .map(|&i| population[i].clone())
        .collect();

    while next.len() < size {
        let a = roulette(fitness, rng);
        let b = roulette(fitness, rng);
        let (mut child1, mut child2) = if rng.random::<f64>() < params.crossover_rate {
            two_point_crossover(&population[a], &population[b], rng)
        } else {
            (population[a].clone(), population[b].clone())
        };
        mutate(&mut child1, params.mutation_rate, rng);
        mutate(&mut child2, params.mutation_rate, rng);
        next.push(child1);
        if next.len() < size {
            next.push(child2);
        }
    }
    next
}

/// Runs the GA and returns its history and final population.
///
/// The run is deterministic in `(oracle, params)`: the population is seeded
/// from `params.seed`, and elites are re-evaluated each generation together
/// with everyone else, which costs nothing extra under the batch oracle and
/// keeps the loop simple.
pub fn evolve<O: FitnessOracle + ?Sized>(oracle: &O, params: &GaParams) -> Result<GaRun, GaError> {
    validate(params)?;
    let genes = oracle.gene_count();
    if genes == 0 {
        return Err(GaError::BadParams(
            "oracle must report a positive gene count".to_string(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(domain_seed(params.seed, "ga"));
    let mut population: Vec<Vec<bool>> = (0..params.population)
        .map(|_| (0..genes).map(|_| rng.random::<bool>()).collect())
        .collect();

    let mut history: Vec<Generation> = Vec::new();
    loop {
        let generation = history.len();
        let fitness = evaluate_checked(oracle, &population, generation)?;
        history.push(summarize(generation, &population, &fitness));

        let exhausted = generation + 1 == params.generations;
        let stalled = params.stagnation_window > 0
            && generation >= params.stagnation_window
            && history[generation].best_fitness
                - history[generation - params.stagnation_window].best_fitness
                < STAGNATION_EPS;
        if exhausted || stalled {
            return Ok(GaRun {
                history,
                final_population: population,
                final_fitness: fitness,
            });
        }
        population = next_generation(&population, &fitness, params, &mut rng);
    }
}
