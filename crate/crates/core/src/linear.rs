//! Baseline linear surrogate: one affine model `y = A·x + B` per property,
//! fit by exact least squares over the 0/1 genome features, with metrics
//! and the weight-ranking export used to read crack physics off the fit.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::dataset::LabeledDataset;
use crate::grid::Grid;
use crate::microstructure::Microstructure;
use crate::predict::{PredictError, PropertyPredictor};
use crate::properties::{CompositeProperties, PropertyKind};

/// Ridge strength used when the normal equations are rank-deficient.
const RIDGE_LAMBDA: f64 = 1e-8;

/// An affine per-property model: `prediction = intercept + weights · bits`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    grid: Grid,
    target: PropertyKind,
    weights: Vec<f64>,
    intercept: f64,
    ridge_engaged: bool,
}

#[derive(Debug, Error)]
pub enum LinearError {
    #[error("cannot fit on an empty dataset")]
    EmptyDataset,
    #[error("normal equations are rank-deficient and the ridge fallback is disabled")]
    RankDeficient,
    #[error("weight vector length {got} does not match grid {grid} ({expected} genes)")]
    WrongLength { grid: Grid, expected: usize, got: usize },
    #[error("model was fit for {expected}, asked about {got}")]
    TargetMismatch { expected: PropertyKind, got: PropertyKind },
    #[error("bundled models must share one grid, got {0} and {1}")]
    MixedGrids(Grid, Grid),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("model file line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Least-squares fit of one property with the ridge fallback enabled.
pub fn fit(dataset: &LabeledDataset, target: PropertyKind) -> Result<LinearModel, LinearError> {
    fit_with_options(dataset, target, true)
}

/// Least-squares fit; `ridge_fallback` controls whether a rank-deficient
/// system is retried with `lambda = 1e-8` on the diagonal instead of
/// failing.
pub fn fit_with_options(
    dataset: &LabeledDataset,
    target: PropertyKind,
    ridge_fallback: bool,
) -> Result<LinearModel, LinearError> {
    let n = dataset.len();
    if n == 0 {
        return Err(LinearError::EmptyDataset);
    }
    let grid = dataset.grid();
    let genes = grid.gene_count();
    let cols = genes + 1; // genome features then the intercept column

    // Build the normal equations directly: gram = X^T X, rhs = X^T y.
    let mut gram = DMatrix::<f64>::zeros(cols, cols);
    let mut rhs = DVector::<f64>::zeros(cols);
    let mut row = vec![0.0f64; cols];
    for sample in dataset.samples() {
        for (g, &bit) in sample.microstructure.bits().iter().enumerate() {
            row[g] = if bit { 1.0 } else { 0.0 };
        }
        row[genes] = 1.0;
        let y = sample.properties.get(target);
        for i in 0..cols {
            if row[i] == 0.0 {
                continue;
            }
            for j in 0..cols {
                gram[(i, j)] += row[i] * row[j];
            }
            rhs[i] += row[i] * y;
        }
    }

    let (beta, ridge_engaged) = match gram.clone().cholesky() {
        Some(chol) => (chol.solve(&rhs), false),
        None => {
            if !ridge_fallback {
                return Err(LinearError::RankDeficient);
            }
            let mut ridged = gram;
            for d in 0..cols {
                ridged[(d, d)] += RIDGE_LAMBDA;
            }
            let chol = ridged.cholesky().ok_or(LinearError::RankDeficient)?;
            (chol.solve(&rhs), true)
        }
    };

    Ok(LinearModel {
        grid,
        target,
        weights: beta.as_slice()[..genes].to_vec(),
        intercept: beta[genes],
        ridge_engaged,
    })
}

impl LinearModel {
    /// Rebuilds a model from stored parts (e.g. a loaded file).
    pub fn from_parts(
        grid: Grid,
        target: PropertyKind,
        weights: Vec<f64>,
        intercept: f64,
    ) -> Result<Self, LinearError> {
        if weights.len() != grid.gene_count() {
            return Err(LinearError::WrongLength {
                grid,
                expected: grid.gene_count(),
                got: weights.len(),
            });
        }
        Ok(Self { grid, target, weights, intercept, ridge_engaged: false })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn target(&self) -> PropertyKind {
        self.target
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    /// True when the fit needed the ridge fallback.
    pub fn ridge_engaged(&self) -> bool {
        self.ridge_engaged
    }

    pub fn predict(&self, microstructure: &Microstructure) -> f64 {
        let dot: f64 = microstructure
            .bits()
            .iter()
            .zip(&self.weights)
            .filter(|(&bit, _)| bit)
            .map(|(_, w)| w)
            .sum();
        self.intercept + dot
    }

    /// Coefficient of determination `1 - SSE/SST` on a dataset. A
    /// zero-variance dataset scores 1 when predicted exactly and negative
    /// infinity otherwise.
    pub fn r_squared(&self, dataset: &LabeledDataset) -> f64 {
        let values = dataset.labels(self.target);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut sse = 0.0;
        let mut sst = 0.0;
        for (sample, &y) in dataset.samples().iter().zip(&values) {
            let e = self.predict(&sample.microstructure) - y;
            sse += e * e;
            sst += (y - mean) * (y - mean);
        }
        if sst == 0.0 {
            return if sse == 0.0 { 1.0 } else { f64::NEG_INFINITY };
        }
        1.0 - sse / sst
    }

    /// Mean squared error on a dataset.
    pub fn mse(&self, dataset: &LabeledDataset) -> f64 {
        let n = dataset.len() as f64;
        dataset
            .samples()
            .iter()
            .map(|s| {
                let e = self.predict(&s.microstructure) - s.properties.get(self.target);
                e * e
            })
            .sum::<f64>()
            / n
    }

    /// Mean absolute percentage error on a dataset, in percent.
    pub fn mape(&self, dataset: &LabeledDataset) -> f64 {
        let n = dataset.len() as f64;
        dataset
            .samples()
            .iter()
            .map(|s| {
                let y = s.properties.get(self.target);
                ((self.predict(&s.microstructure) - y) / y).abs()
            })
            .sum::<f64>()
            / n
            * 100.0
    }

    /// Signed ranks per element: positive weights get +1 (largest) counting
    /// up, negative weights get -1 (most negative) counting down, zero
    /// weights get 0. Ties break by element index.
    pub fn rank_weights(&self) -> Vec<i32> {
        let mut ranks = vec![0i32; self.weights.len()];

        let mut positive: Vec<usize> =
            (0..self.weights.len()).filter(|&g| self.weights[g] > 0.0).collect();
        positive.sort_by(|&a, &b| {
            self.weights[b].partial_cmp(&self.weights[a]).unwrap().then(a.cmp(&b))
        });
        for (order, &g) in positive.iter().enumerate() {
            ranks[g] = order as i32 + 1;
        }

        let mut negative: Vec<usize> =
            (0..self.weights.len()).filter(|&g| self.weights[g] < 0.0).collect();
        negative.sort_by(|&a, &b| {
            self.weights[a].partial_cmp(&self.weights[b]).unwrap().then(a.cmp(&b))
        });
        for (order, &g) in negative.iter().enumerate() {
            ranks[g] = -(order as i32 + 1);
        }

        ranks
    }

    /// Appends the model's CSV block: metadata lines, then one row per
    /// element.
    fn append_csv(&self, out: &mut String) {
        out.push_str(&format!("target,{}\n", self.target));
        out.push_str(&format!("grid,{}\n", self.grid));
        out.push_str(&format!("intercept,{}\n", self.intercept));
        out.push_str("index,weight\n");
        for (g, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("{g},{w}\n"));
        }
    }

    /// Saves the model as a single CSV block.
    pub fn save_csv(&self, path: &Path) -> Result<(), LinearError> {
        let mut out = String::new();
        self.append_csv(&mut out);
        Ok(fs::write(path, out)?)
    }

    /// Loads a model saved by [`LinearModel::save_csv`].
    pub fn load_csv(path: &Path) -> Result<Self, LinearError> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let model = parse_model_block(&mut lines)?;
        reject_trailing_lines(lines)?;
        Ok(model)
    }

    /// Exports the signed rank of every element as CSV rows
    /// `row,col,weight,rank` for plotting over the grid.
    pub fn save_rank_csv(&self, path: &Path) -> Result<(), LinearError> {
        let ranks = self.rank_weights();
        let mut out = String::from("row,col,weight,rank\n");
        for g in 0..self.weights.len() {
            let (row, col) = Microstructure::element_of(self.grid, g);
            out.push_str(&format!("{row},{col},{},{}\n", self.weights[g], ranks[g]));
        }
        Ok(fs::write(path, out)?)
    }
}

/// Parses one saved model block (four metadata/header lines plus one weight
/// row per element), consuming exactly the block from the line stream.
fn parse_model_block<'a, I>(lines: &mut I) -> Result<LinearModel, LinearError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let parse_err = |line: usize, reason: &str| LinearError::Parse {
        line,
        reason: reason.to_string(),
    };

    let mut field = |key: &str| -> Result<(usize, String), LinearError> {
        let (i, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, "unexpected end of file"))?;
        let (k, v) = line
            .split_once(',')
            .ok_or_else(|| parse_err(i + 1, "expected key,value"))?;
        if k != key {
            return Err(parse_err(i + 1, &format!("expected key {key:?}, got {k:?}")));
        }
        Ok((i + 1, v.to_string()))
    };

    let (at, target) = field("target")?;
    let target: PropertyKind = target.parse().map_err(|_| parse_err(at, "unknown property"))?;
    let (at, grid) = field("grid")?;
    let grid: Grid = grid.parse().map_err(|_| parse_err(at, "unknown grid"))?;
    let (at, intercept) = field("intercept")?;
    let intercept: f64 = intercept.parse().map_err(|_| parse_err(at, "bad intercept"))?;
    let (at, header) = field("index")?;
    if header != "weight" {
        return Err(parse_err(at, "expected header index,weight"));
    }

    let mut weights = vec![0.0f64; grid.gene_count()];
    let mut seen = vec![false; weights.len()];
    for _ in 0..weights.len() {
        let (i, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, "unexpected end of file"))?;
        let (g, w) = line
            .split_once(',')
            .ok_or_else(|| parse_err(i + 1, "expected index,weight"))?;
        let g: usize = g.parse().map_err(|_| parse_err(i + 1, "bad index"))?;
        if g >= weights.len() {
            return Err(parse_err(i + 1, "element index out of range"));
        }
        if seen[g] {
            return Err(parse_err(i + 1, "duplicate element index"));
        }
        seen[g] = true;
        weights[g] = w.parse().map_err(|_| parse_err(i + 1, "bad weight"))?;
    }
    LinearModel::from_parts(grid, target, weights, intercept)
}

fn reject_trailing_lines<'a, I>(mut lines: I) -> Result<(), LinearError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    match lines.find(|(_, l)| !l.trim().is_empty()) {
        Some((i, _)) => Err(LinearError::Parse {
            line: i + 1,
            reason: "trailing content after the last model".to_string(),
        }),
        None => Ok(()),
    }
}

/// All three per-property linear models bundled as a property predictor.
#[derive(Debug, Clone)]
pub struct LinearSurrogate {
    models: [LinearModel; 3],
}

impl LinearSurrogate {
    /// Fits one model per property on the same dataset.
    pub fn fit_all(dataset: &LabeledDataset) -> Result<Self, LinearError> {
        Ok(Self {
            models: [
                fit(dataset, PropertyKind::Modulus)?,
                fit(dataset, PropertyKind::Strength)?,
                fit(dataset, PropertyKind::Toughness)?,
            ],
        })
    }

    /// Bundles three already-built models; they must target modulus,
    /// strength, and toughness in that order on one shared grid.
    pub fn from_models(models: [LinearModel; 3]) -> Result<Self, LinearError> {
        for (model, kind) in models.iter().zip(PropertyKind::ALL) {
            if model.target() != kind {
                return Err(LinearError::TargetMismatch {
                    expected: kind,
                    got: model.target(),
                });
            }
        }
        for model in &models[1..] {
            if model.grid() != models[0].grid() {
                return Err(LinearError::MixedGrids(models[0].grid(), model.grid()));
            }
        }
        Ok(Self { models })
    }

    pub fn model(&self, kind: PropertyKind) -> &LinearModel {
        &self.models[kind.index()]
    }

    /// Saves all three models into one CSV file: the modulus, strength, and
    /// toughness blocks in order.
    pub fn save_csv(&self, path: &Path) -> Result<(), LinearError> {
        let mut out = String::new();
        for model in &self.models {
            model.append_csv(&mut out);
        }
        Ok(fs::write(path, out)?)
    }

    /// Loads a bundle saved by [`LinearSurrogate::save_csv`].
    pub fn load_csv(path: &Path) -> Result<Self, LinearError> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let models = [
            parse_model_block(&mut lines)?,
            parse_model_block(&mut lines)?,
            parse_model_block(&mut lines)?,
        ];
        reject_trailing_lines(lines)?;
        Self::from_models(models)
    }
}

impl PropertyPredictor for LinearSurrogate {
    fn grid(&self) -> Grid {
        self.models[0].grid
    }

    fn predict_batch(
        &self,
        microstructures: &[Microstructure],
    ) -> Result<Vec<CompositeProperties>, PredictError> {
        microstructures
            .iter()
            .map(|m| {
                if m.grid() != self.grid() {
                    return Err(PredictError::GridMismatch {
                        expected: self.grid(),
                        got: m.grid(),
                    });
                }
                Ok(CompositeProperties::from_array([
                    self.models[0].predict(m),
                    self.models[1].predict(m),
                    self.models[2].predict(m),
                ]))
            })
            .collect()
    }
}
