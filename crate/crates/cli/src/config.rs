//! The optional TOML config file and the flag/config/default merge.
//!
//! Every setting can be given as a command-line flag; the config file
//! supplies defaults for flags left out. A flag always wins over the file.
//! Validation failures are classified by where the offending value came
//! from: flags exit with the argument code, file values (and anything the
//! user never set) with the config code.

use std::fmt;
use std::fs;
use std::path::Path;

use checkerboard::material::{ElasticMaterial, MaterialPair};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub materials: Option<MaterialsSection>,
    pub dataset: Option<DatasetSection>,
    pub train: Option<TrainSection>,
    pub ga: Option<GaSection>,
    pub aof: Option<AofSection>,
}

/// `[materials]`: phase properties for every finite-element evaluation.
/// Fields left out keep the built-in pair (stiff 1.0/0.1, soft 0.1/1.0,
/// shared Poisson ratio 1/3).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsSection {
    pub stiff_modulus: Option<f64>,
    pub stiff_poisson: Option<f64>,
    pub stiff_failure_strain: Option<f64>,
    pub soft_modulus: Option<f64>,
    pub soft_poisson: Option<f64>,
    pub soft_failure_strain: Option<f64>,
}

/// `[dataset]`: defaults for `gen-data` and for commands that need a grid.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub grid: Option<String>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

/// `[train]`: defaults for the `train` command.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub model: Option<String>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub split: Option<f64>,
    pub seed: Option<u64>,
}

/// `[ga]`: defaults for the `optimize` command.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaSection {
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub crossover_rate: Option<f64>,
    pub mutation_rate: Option<f64>,
    pub elitism: Option<f64>,
    pub stagnation_window: Option<usize>,
    pub seed: Option<u64>,
    pub top_k: Option<usize>,
}

/// `[aof]`: defaults for the combined objective of `optimize`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AofSection {
    pub weights: Option<[f64; 3]>,
    pub normalizers: Option<[f64; 3]>,
}

impl FileConfig {
    /// Loads the file when a path was given, otherwise an empty config. An
    /// unreadable file is an io error; unparseable content or unknown keys
    /// are config errors.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    pub fn materials_section(&self) -> MaterialsSection {
        self.materials.clone().unwrap_or_default()
    }

    pub fn dataset_section(&self) -> DatasetSection {
        self.dataset.clone().unwrap_or_default()
    }

    pub fn train_section(&self) -> TrainSection {
        self.train.clone().unwrap_or_default()
    }

    pub fn ga_section(&self) -> GaSection {
        self.ga.clone().unwrap_or_default()
    }

    pub fn aof_section(&self) -> AofSection {
        self.aof.clone().unwrap_or_default()
    }

    /// The phase material pair, with config overrides applied on top of the
    /// built-in defaults. Materials have no flags, so failures are config
    /// errors.
    pub fn material_pair(&self) -> Result<MaterialPair, CliError> {
        let section = self.materials_section();
        let defaults = MaterialPair::default();
        let build = |e: Option<f64>,
                     nu: Option<f64>,
                     eps: Option<f64>,
                     base: ElasticMaterial|
         -> Result<ElasticMaterial, CliError> {
            ElasticMaterial::new(
                e.unwrap_or(base.youngs_modulus()),
                nu.unwrap_or(base.poisson_ratio()),
                eps.unwrap_or(base.failure_strain()),
            )
            .map_err(|e| CliError::Config(format!("materials: {e}")))
        };
        let stiff = build(
            section.stiff_modulus,
            section.stiff_poisson,
            section.stiff_failure_strain,
            defaults.stiff(),
        )?;
        let soft = build(
            section.soft_modulus,
            section.soft_poisson,
            section.soft_failure_strain,
            defaults.soft(),
        )?;
        MaterialPair::new(stiff, soft).map_err(|e| CliError::Config(format!("materials: {e}")))
    }
}

/// Where a resolved setting came from, for error classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Flag,
    Config,
    Default,
}

/// A setting after the flag/config/default merge, remembering its origin.
#[derive(Debug, Clone, Copy)]
pub struct Picked<T> {
    pub value: T,
    pub source: Source,
}

/// Resolves one setting: flag first, then config, then the default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> Picked<T> {
    match (flag, config) {
        (Some(value), _) => Picked { value, source: Source::Flag },
        (None, Some(value)) => Picked { value, source: Source::Config },
        (None, None) => Picked { value: default, source: Source::Default },
    }
}

/// Resolves a setting that has no default: flag first, then config,
/// otherwise an argument error naming both ways to supply it.
pub fn pick_required<T>(
    flag: Option<T>,
    config: Option<T>,
    flag_name: &str,
    config_key: &str,
) -> Result<Picked<T>, CliError> {
    match (flag, config) {
        (Some(value), _) => Ok(Picked { value, source: Source::Flag }),
        (None, Some(value)) => Ok(Picked { value, source: Source::Config }),
        (None, None) => Err(CliError::Argument(format!(
            "--{flag_name} is required (or set {config_key} in the config)"
        ))),
    }
}

/// Resolves a grid from the typed flag or the config's string form.
pub fn resolve_grid(
    flag: Option<checkerboard::grid::Grid>,
    config: Option<&str>,
) -> Result<Option<checkerboard::grid::Grid>, CliError> {
    if let Some(grid) = flag {
        return Ok(Some(grid));
    }
    match config {
        Some(text) => text
            .parse()
            .map(Some)
            .map_err(|e| CliError::Config(format!("config dataset.grid: {e}"))),
        None => Ok(None),
    }
}

impl<T> Picked<T> {
    /// An error about this value, classified by the value's origin.
    pub fn reject(&self, message: impl Into<String>) -> CliError {
        match self.source {
            Source::Flag => CliError::Argument(message.into()),
            Source::Config | Source::Default => CliError::Config(message.into()),
        }
    }

    /// Unwraps the value if `valid` accepts it, otherwise rejects with
    /// `requirement, got <value>`.
    pub fn check(self, valid: impl FnOnce(&T) -> bool, requirement: &str) -> Result<T, CliError>
    where
        T: fmt::Display,
    {
        if valid(&self.value) {
            Ok(self.value)
        } else {
            let message = format!("{requirement}, got {}", self.value);
            Err(self.reject(message))
        }
    }
}
