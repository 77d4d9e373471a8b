//! `eval`: score a saved surrogate against a labeled dataset.

use std::path::PathBuf;

use checkerboard::cnn::{evaluate, write_eval_csv};
use checkerboard::dataset::read_dataset;
use checkerboard::properties::PropertyKind;
use clap::Args;

use crate::config::FileConfig;
use crate::error::{io_error, numeric_error, CliError};
use crate::model_file::LoadedModel;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Saved model file; the format (linear CSV or CNN checkpoint) is
    /// detected from the file itself.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Labeled dataset to score against.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Report CSV output path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

pub fn run(args: EvalArgs, _config: &FileConfig) -> Result<(), CliError> {
    let model = LoadedModel::load(&args.model)?;
    let predictor = model.as_predictor();
    let dataset = read_dataset(&args.data).map_err(|e| io_error(args.data.display(), e))?;
    if dataset.is_empty() {
        return Err(CliError::Argument(format!(
            "dataset {} has no samples",
            args.data.display()
        )));
    }
    if dataset.grid() != predictor.grid() {
        return Err(CliError::Argument(format!(
            "model grid {} does not match dataset grid {}",
            predictor.grid(),
            dataset.grid()
        )));
    }

    let report =
        evaluate(predictor, &dataset).map_err(|e| numeric_error("evaluation failed", e))?;
    write_eval_csv(&args.out, &report).map_err(|e| io_error(args.out.display(), e))?;

    println!(
        "{} model on {} samples (grid {})",
        model.kind_name(),
        dataset.len(),
        dataset.grid()
    );
    for kind in PropertyKind::ALL {
        let eval = report.get(kind);
        println!(
            "{kind}: MAPE {:.3}%, max {:.3}%, above 5% on {:.1}% of samples",
            eval.mape,
            eval.max_abs_percentage_error,
            eval.fraction_above_5pct * 100.0
        );
    }
    println!("wrote report to {}", args.out.display());
    Ok(())
}
