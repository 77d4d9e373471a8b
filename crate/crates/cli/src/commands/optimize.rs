//! `optimize`: search microstructures with the genetic algorithm.
//!
//! The fitness oracle is either the exact finite-element solver or a saved
//! surrogate; the objective is a single property or the amplified combined
//! objective over all three. Writes the per-generation history and the top
//! distinct genomes of the final population.

use std::fs;
use std::path::PathBuf;

use checkerboard::fem::FemEvaluator;
use checkerboard::ga::{
    evolve, AofWeights, GaError, GaParams, Objective, PropertyObjectiveOracle,
};
use checkerboard::grid::Grid;
use checkerboard::predict::PropertyPredictor;
use checkerboard::properties::{CompositeProperties, PropertyKind};
use clap::{Args, ValueEnum};

use crate::config::{pick, pick_required, resolve_grid, FileConfig, Picked};
use crate::error::{io_error, CliError};
use crate::model_file::LoadedModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    /// Exact finite-element evaluation of every genome.
    Fem,
    /// A surrogate saved by `train`.
    Surrogate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    Modulus,
    Strength,
    Toughness,
    /// Amplified combination of all three normalized properties.
    Aof,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Fitness oracle.
    #[arg(long, value_enum)]
    oracle: OracleKind,
    /// Composite grid; required with --oracle fem.
    #[arg(long)]
    grid: Option<Grid>,
    /// Saved surrogate file; required with --oracle surrogate.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// What to maximize.
    #[arg(long, value_enum)]
    objective: ObjectiveKind,
    /// AOF property weights as three comma-separated numbers summing to 1,
    /// e.g. 0.5,0.5,0 (modulus, strength, toughness).
    #[arg(long, value_name = "M,S,T")]
    weights: Option<String>,
    /// AOF normalizers (reference property values, usually the
    /// single-objective optima), e.g. 0.88,0.11,0.0061.
    #[arg(long, value_name = "M,S,T")]
    normalizers: Option<String>,
    /// Population size.
    #[arg(long)]
    population: Option<usize>,
    /// Maximum generations.
    #[arg(long)]
    generations: Option<usize>,
    /// Crossover probability per selected pair.
    #[arg(long)]
    crossover_rate: Option<f64>,
    /// Per-gene mutation probability.
    #[arg(long)]
    mutation_rate: Option<f64>,
    /// Fraction of the population copied unchanged each generation.
    #[arg(long)]
    elitism: Option<f64>,
    /// Generations without improvement before stopping early (0 disables).
    #[arg(long)]
    stagnation_window: Option<usize>,
    /// GA seed; equal seeds reproduce the run bit for bit.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of distinct top genomes to report.
    #[arg(long)]
    top_k: Option<usize>,
    /// Directory for history.csv and topk.csv.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
}

pub fn run(args: OptimizeArgs, config: &FileConfig) -> Result<(), CliError> {
    let objective = build_objective(&args, config)?;

    // Build the predictor the oracle wraps; the holders keep it alive.
    let fem_holder;
    let model_holder;
    let predictor: &dyn PropertyPredictor = match args.oracle {
        OracleKind::Fem => {
            if args.model.is_some() {
                return Err(CliError::Argument(
                    "--model only applies to --oracle surrogate".into(),
                ));
            }
            let section = config.dataset_section();
            let grid = resolve_grid(args.grid, section.grid.as_deref())?.ok_or_else(|| {
                CliError::Argument("--grid is required with --oracle fem".into())
            })?;
            fem_holder = FemEvaluator::with_materials(grid, config.material_pair()?);
            &fem_holder
        }
        OracleKind::Surrogate => {
            let path = args.model.as_ref().ok_or_else(|| {
                CliError::Argument("--model is required with --oracle surrogate".into())
            })?;
            model_holder = LoadedModel::load(path)?;
            let predictor = model_holder.as_predictor();
            if let Some(grid) = args.grid {
                if grid != predictor.grid() {
                    return Err(CliError::Argument(format!(
                        "--grid {grid} does not match the model grid {}",
                        predictor.grid()
                    )));
                }
            }
            predictor
        }
    };

    let defaults = GaParams::default();
    let ga = config.ga_section();
    let params = GaParams {
        population: pick(args.population, ga.population, defaults.population)
            .check(|&p| p > 0, "--population must be positive")?,
        generations: pick(args.generations, ga.generations, defaults.generations)
            .check(|&g| g > 0, "--generations must be positive")?,
        crossover_rate: pick(args.crossover_rate, ga.crossover_rate, defaults.crossover_rate)
            .check(|r| (0.0..=1.0).contains(r), "--crossover-rate must lie in [0, 1]")?,
        mutation_rate: pick(args.mutation_rate, ga.mutation_rate, defaults.mutation_rate)
            .check(|r| (0.0..=1.0).contains(r), "--mutation-rate must lie in [0, 1]")?,
        elitism: pick(args.elitism, ga.elitism, defaults.elitism)
            .check(|e| (0.0..=1.0).contains(e), "--elitism must lie in [0, 1]")?,
        stagnation_window: pick(args.stagnation_window, ga.stagnation_window, defaults.stagnation_window).value,
        seed: pick(args.seed, ga.seed, 0).value,
    };
    let top_k = pick(args.top_k, ga.top_k, 5).check(|&k| k > 0, "--top-k must be positive")?;

    let oracle = PropertyObjectiveOracle::new(predictor, objective)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let run = evolve(&oracle, &params).map_err(ga_error)?;

    fs::create_dir_all(&args.out_dir).map_err(|e| io_error(args.out_dir.display(), e))?;
    let mut history = String::from("generation,best_fitness,mean_fitness,best_genome\n");
    for generation in &run.history {
        history.push_str(&format!(
            "{},{},{},{}\n",
            generation.index,
            generation.best_fitness,
            generation.mean_fitness,
            genome_string(&generation.best_genome)
        ));
    }
    let history_path = args.out_dir.join("history.csv");
    fs::write(&history_path, history).map_err(|e| io_error(history_path.display(), e))?;

    let mut topk = String::from("rank,fitness,soft_fraction,genome\n");
    for (rank, (genome, fitness)) in run.top_k(top_k).iter().enumerate() {
        topk.push_str(&format!(
            "{},{},{},{}\n",
            rank + 1,
            fitness,
            soft_fraction(genome),
            genome_string(genome)
        ));
    }
    let topk_path = args.out_dir.join("topk.csv");
    fs::write(&topk_path, topk).map_err(|e| io_error(topk_path.display(), e))?;

    let (best_genome, best_fitness) = run.best();
    let stopped_early = run.history.len() < params.generations;
    println!(
        "best fitness {best_fitness} after {} generations{}",
        run.history.len(),
        if stopped_early { " (stopped early on stagnation)" } else { "" }
    );
    println!(
        "best genome {} (soft fraction {:.3})",
        genome_string(best_genome),
        soft_fraction(best_genome)
    );
    println!("wrote history and top {top_k} genomes to {}", args.out_dir.display());
    Ok(())
}

/// Resolves the objective, with the AOF weights and normalizers validated
/// and classified by where each value came from.
fn build_objective(args: &OptimizeArgs, config: &FileConfig) -> Result<Objective, CliError> {
    match args.objective {
        ObjectiveKind::Modulus => return single(args, PropertyKind::Modulus),
        ObjectiveKind::Strength => return single(args, PropertyKind::Strength),
        ObjectiveKind::Toughness => return single(args, PropertyKind::Toughness),
        ObjectiveKind::Aof => {}
    }

    let section = config.aof_section();
    let weights = triple(args.weights.as_deref(), section.weights, "weights", "aof.weights")?;
    if !weights.value.iter().all(|w| w.is_finite() && *w >= 0.0) {
        return Err(weights.reject(format!(
            "aof weights must be finite and non-negative, got {:?}",
            weights.value
        )));
    }
    let sum: f64 = weights.value.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(weights.reject(format!("aof weights must sum to 1, got {sum}")));
    }
    let [m, s, t] = weights.value;
    let aof_weights = AofWeights::new(m, s, t).map_err(|e| weights.reject(e.to_string()))?;

    let normalizers = triple(
        args.normalizers.as_deref(),
        section.normalizers,
        "normalizers",
        "aof.normalizers",
    )?;
    if !normalizers.value.iter().all(|n| n.is_finite() && *n > 0.0) {
        return Err(normalizers.reject(format!(
            "aof normalizers must be positive and finite, got {:?}",
            normalizers.value
        )));
    }

    Ok(Objective::Aof {
        weights: aof_weights,
        normalizers: CompositeProperties::from_array(normalizers.value),
    })
}

fn single(args: &OptimizeArgs, kind: PropertyKind) -> Result<Objective, CliError> {
    if args.weights.is_some() || args.normalizers.is_some() {
        return Err(CliError::Argument(
            "--weights and --normalizers only apply to --objective aof".into(),
        ));
    }
    Ok(Objective::Single(kind))
}

/// Resolves one comma-separated triple flag against its config array.
fn triple(
    flag: Option<&str>,
    config: Option<[f64; 3]>,
    flag_name: &str,
    config_key: &str,
) -> Result<Picked<[f64; 3]>, CliError> {
    let parsed = match flag {
        Some(text) => Some(parse_triple(text).map_err(|e| {
            CliError::Argument(format!("--{flag_name}: {e}"))
        })?),
        None => None,
    };
    pick_required(parsed, config, flag_name, config_key)
}

fn parse_triple(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {text:?}"));
    }
    let mut out = [0.0f64; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("bad number {part:?}"))?;
    }
    Ok(out)
}

fn ga_error(error: GaError) -> CliError {
    match error {
        GaError::BadParams(_) | GaError::BadObjective(_) => CliError::Config(error.to_string()),
        _ => CliError::Numeric(error.to_string()),
    }
}

/// Genomes print as one character per element, `1` marking the soft phase,
/// in row-major element order.
fn genome_string(genome: &[bool]) -> String {
    genome.iter().map(|&soft| if soft { '1' } else { '0' }).collect()
}

fn soft_fraction(genome: &[bool]) -> f64 {
    genome.iter().filter(|&&soft| soft).count() as f64 / genome.len() as f64
}
