//! `train`: fit a linear or CNN surrogate on a labeled dataset.
//!
//! Both model kinds end with the same test-set evaluation written to
//! `eval.csv`. The linear model additionally saves its weights, per-property
//! weight rankings, and an R² table; the CNN saves its checkpoint and the
//! per-epoch loss history.

use std::fs;
use std::path::{Path, PathBuf};

use checkerboard::cnn::{
    evaluate, save_checkpoint, train, write_eval_csv, write_history_csv, CnnConfig, CnnModel,
    TrainConfig,
};
use checkerboard::dataset::{read_dataset, LabeledDataset};
use checkerboard::linear::LinearSurrogate;
use checkerboard::predict::PropertyPredictor;
use checkerboard::properties::PropertyKind;
use clap::{Args, ValueEnum};

use crate::config::{pick, pick_required, FileConfig};
use crate::error::{io_error, numeric_error, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Linear,
    Cnn,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Surrogate family to fit.
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// Labeled training dataset.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Separate labeled test dataset (alternative to --split).
    #[arg(long, value_name = "FILE", conflicts_with = "split")]
    test_data: Option<PathBuf>,
    /// Train fraction for a seeded split of --data (default 0.9).
    #[arg(long)]
    split: Option<f64>,
    /// CNN training epochs.
    #[arg(long)]
    epochs: Option<usize>,
    /// CNN mini-batch size.
    #[arg(long)]
    batch_size: Option<usize>,
    /// CNN Adam learning rate.
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Root seed covering the split, the weight init, and the batch order.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for the model and its reports.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
}

pub fn run(args: TrainArgs, config: &FileConfig) -> Result<(), CliError> {
    let section = config.train_section();
    let config_model = match section.model.as_deref() {
        None => None,
        Some("linear") => Some(ModelKind::Linear),
        Some("cnn") => Some(ModelKind::Cnn),
        Some(other) => {
            return Err(CliError::Config(format!(
                "train.model must be \"linear\" or \"cnn\", got {other:?}"
            )))
        }
    };
    let model_kind = pick_required(args.model, config_model, "model", "train.model")?.value;
    let seed = pick(args.seed, section.seed, 0).value;

    let data = read_dataset(&args.data).map_err(|e| io_error(args.data.display(), e))?;
    if data.is_empty() {
        return Err(CliError::Argument(format!(
            "dataset {} has no samples",
            args.data.display()
        )));
    }

    let (train_set, test_set) = match &args.test_data {
        Some(path) => {
            let test = read_dataset(path).map_err(|e| io_error(path.display(), e))?;
            if test.grid() != data.grid() {
                return Err(CliError::Argument(format!(
                    "test dataset grid {} does not match training grid {}",
                    test.grid(),
                    data.grid()
                )));
            }
            if test.is_empty() {
                return Err(CliError::Argument(format!(
                    "test dataset {} has no samples",
                    path.display()
                )));
            }
            (data, test)
        }
        None => {
            let fraction = pick(args.split, section.split, 0.9);
            let f = fraction.check(
                |&f| f > 0.0 && f < 1.0,
                "--split must lie strictly between 0 and 1",
            )?;
            let (train_part, test_part) = data
                .split(f, seed)
                .map_err(|e| numeric_error("split failed", e))?;
            if train_part.is_empty() || test_part.is_empty() {
                return Err(fraction.reject(format!(
                    "split {f} leaves an empty part ({} train, {} test samples)",
                    train_part.len(),
                    test_part.len()
                )));
            }
            (train_part, test_part)
        }
    };

    fs::create_dir_all(&args.out_dir).map_err(|e| io_error(args.out_dir.display(), e))?;
    println!(
        "training a {} surrogate on {} samples (grid {}), testing on {}",
        match model_kind {
            ModelKind::Linear => "linear",
            ModelKind::Cnn => "cnn",
        },
        train_set.len(),
        train_set.grid(),
        test_set.len()
    );

    match model_kind {
        ModelKind::Linear => {
            let surrogate = LinearSurrogate::fit_all(&train_set)
                .map_err(|e| numeric_error("linear fit failed", e))?;
            let model_path = args.out_dir.join("model.csv");
            surrogate
                .save_csv(&model_path)
                .map_err(|e| io_error(model_path.display(), e))?;

            let mut table = String::from("property,train_r2,test_r2,train_mape,test_mape\n");
            for kind in PropertyKind::ALL {
                let model = surrogate.model(kind);
                let (train_r2, test_r2) = (model.r_squared(&train_set), model.r_squared(&test_set));
                table.push_str(&format!(
                    "{kind},{train_r2},{test_r2},{},{}\n",
                    model.mape(&train_set),
                    model.mape(&test_set)
                ));
                println!("linear {kind}: train R² {train_r2:.4}, test R² {test_r2:.4}");
                let rank_path = args.out_dir.join(format!("rank_{kind}.csv"));
                model
                    .save_rank_csv(&rank_path)
                    .map_err(|e| io_error(rank_path.display(), e))?;
            }
            let table_path = args.out_dir.join("r_squared.csv");
            fs::write(&table_path, table).map_err(|e| io_error(table_path.display(), e))?;

            write_test_report(&surrogate, &test_set, &args.out_dir)?;
        }
        ModelKind::Cnn => {
            let epochs =
                pick(args.epochs, section.epochs, 50).check(|&e| e > 0, "--epochs must be positive")?;
            let batch_size = pick(args.batch_size, section.batch_size, 128)
                .check(|&b| b > 0, "--batch-size must be positive")?;
            let learning_rate = pick(args.learning_rate, section.learning_rate, 1e-3).check(
                |&lr| lr.is_finite() && lr > 0.0,
                "--learning-rate must be positive and finite",
            )?;

            let mut model = CnnModel::new(CnnConfig::standard(train_set.grid()), seed)
                .map_err(|e| numeric_error("model construction failed", e))?;
            let train_config = TrainConfig { epochs, batch_size, learning_rate, seed };
            let history = train(&mut model, &train_set, &test_set, &train_config)
                .map_err(|e| numeric_error("training failed", e))?;

            let model_path = args.out_dir.join("model.cbnn");
            save_checkpoint(&model_path, &model)
                .map_err(|e| io_error(model_path.display(), e))?;
            let history_path = args.out_dir.join("history.csv");
            write_history_csv(&history_path, &history)
                .map_err(|e| io_error(history_path.display(), e))?;
            let last = history.records.last().expect("at least one epoch");
            println!(
                "cnn: {} epochs, final train MSE {:.6e}, final test MSE {:.6e} (normalized labels)",
                history.records.len(),
                last.train_mse,
                last.test_mse
            );

            write_test_report(&model, &test_set, &args.out_dir)?;
        }
    }

    println!("wrote model and reports to {}", args.out_dir.display());
    Ok(())
}

/// Scores the trained surrogate on the test set, writes `eval.csv`, and
/// prints the per-property percentage errors.
fn write_test_report(
    predictor: &dyn PropertyPredictor,
    test_set: &LabeledDataset,
    out_dir: &Path,
) -> Result<(), CliError> {
    let report =
        evaluate(predictor, test_set).map_err(|e| numeric_error("test evaluation failed", e))?;
    let path = out_dir.join("eval.csv");
    write_eval_csv(&path, &report).map_err(|e| io_error(path.display(), e))?;
    for kind in PropertyKind::ALL {
        let eval = report.get(kind);
        println!(
            "test {kind}: MAPE {:.3}%, max {:.3}%, above 5% on {:.1}% of samples",
            eval.mape,
            eval.max_abs_percentage_error,
            eval.fraction_above_5pct * 100.0
        );
    }
    Ok(())
}
