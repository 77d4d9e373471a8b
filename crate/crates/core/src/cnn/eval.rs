//! Percentage-error evaluation shared by every property predictor.

use std::fs;
use std::path::Path;

use crate::dataset::LabeledDataset;
use crate::predict::{PredictError, PropertyPredictor};
use crate::properties::PropertyKind;

/// Error summary for one property, all percentages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyEval {
    /// Mean absolute percentage error over included samples.
    pub mape: f64,
    /// Largest absolute percentage error.
    pub max_abs_percentage_error: f64,
    /// Fraction of included samples with error above 5%.
    pub fraction_above_5pct: f64,
    /// Samples skipped because the true label is exactly zero.
    pub excluded: usize,
}

/// Evaluation over a labeled dataset, per property.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub modulus: PropertyEval,
    pub strength: PropertyEval,
    pub toughness: PropertyEval,
    pub sample_count: usize,
}

impl EvalReport {
    pub fn get(&self, kind: PropertyKind) -> &PropertyEval {
        match kind {
            PropertyKind::Modulus => &self.modulus,
            PropertyKind::Strength => &self.strength,
            PropertyKind::Toughness => &self.toughness,
        }
    }
}

/// Compares a predictor's outputs against a dataset's labels.
///
/// Samples whose true label is exactly zero are excluded from that
/// property's percentages and counted in `excluded`.
pub fn evaluate<P: PropertyPredictor + ?Sized>(
    predictor: &P,
    dataset: &LabeledDataset,
) -> Result<EvalReport, PredictError> {
    let micros: Vec<_> = dataset
        .samples()
        .iter()
        .map(|s| s.microstructure.clone())
        .collect();
    let predictions = predictor.predict_batch(&micros)?;

    let mut evals = [PropertyEval {
        mape: 0.0,
        max_abs_percentage_error: 0.0,
        fraction_above_5pct: 0.0,
        excluded: 0,
    }; 3];

    for (k, kind) in PropertyKind::ALL.into_iter().enumerate() {
        let mut sum = 0.0;
        let mut max = 0.0f64;
        let mut above = 0usize;
        let mut included = 0usize;
        for (sample, prediction) in dataset.samples().iter().zip(&predictions) {
            let y = sample.properties.get(kind);
            if y == 0.0 {
                evals[k].excluded += 1;
                continue;
            }
            let pct = ((prediction.get(kind) - y) / y).abs() * 100.0;
            sum += pct;
            max = max.max(pct);
            if pct > 5.0 {
                above += 1;
            }
            included += 1;
        }
        if included > 0 {
            evals[k].mape = sum / included as f64;
            evals[k].max_abs_percentage_error = max;
            evals[k].fraction_above_5pct = above as f64 / included as f64;
        }
    }

    Ok(EvalReport {
        modulus: evals[0],
        strength: evals[1],
        toughness: evals[2],
        sample_count: dataset.len(),
    })
}

/// Writes an evaluation report as CSV, one row per property.
pub fn write_eval_csv(path: &Path, report: &EvalReport) -> Result<(), std::io::Error> {
    let mut out = String::from("property,mape,max_error,frac_gt_5pct\n");
    for kind in PropertyKind::ALL {
        let e = report.get(kind);
        out.push_str(&format!(
            "{},{},{},{}\n",
            kind, e.mape, e.max_abs_percentage_error, e.fraction_above_5pct
        ));
    }
    fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, LabeledDataset, LabeledSample};
    use crate::fem::FemEvaluator;
    use crate::grid::Grid;
    use crate::microstructure::Microstructure;
    use crate::predict::PredictError;
    use crate::properties::CompositeProperties;
    use approx::assert_relative_eq;

    /// Test double: scales the true labels by a per-index factor.
    struct ScaledOracle {
        grid: Grid,
        factors: Vec<f64>,
    }

    impl PropertyPredictor for ScaledOracle {
        fn grid(&self) -> Grid {
            self.grid
        }

        fn predict_batch(
            &self,
            micros: &[Microstructure],
        ) -> Result<Vec<CompositeProperties>, PredictError> {
            let fem = FemEvaluator::new(self.grid);
            micros
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let truth = fem.evaluate(m).map_err(|e| PredictError::Numeric(e.to_string()))?;
                    let f = self.factors[i % self.factors.len()];
                    Ok(CompositeProperties::from_array(truth.as_array().map(|v| v * f)))
                })
                .collect()
        }
    }

    #[test]
    fn perfect_predictions_score_zero() {
        let ds = generate(Grid::G4x2, 40, 1, 0).unwrap();
        let report = evaluate(&FemEvaluator::new(Grid::G4x2), &ds).unwrap();
        for kind in PropertyKind::ALL {
            let e = report.get(kind);
            assert_eq!(
                (e.mape, e.max_abs_percentage_error, e.fraction_above_5pct),
                (0.0, 0.0, 0.0)
            );
            assert_eq!(e.excluded, 0);
        }
    }

    #[test]
    fn single_half_prediction_scores_fifty_percent() {
        let micro = Microstructure::all_stiff(Grid::G4x2);
        let truth = FemEvaluator::new(Grid::G4x2).evaluate(&micro).unwrap();
        let ds = LabeledDataset::new(
            Grid::G4x2,
            vec![LabeledSample {
                microstructure: micro,
                properties: CompositeProperties::from_array(truth.as_array().map(|v| 2.0 * v)),
            }],
        )
        .unwrap();
        // Predictor returns the FE truth = half of every stored label.
        let report = evaluate(&FemEvaluator::new(Grid::G4x2), &ds).unwrap();
        for kind in PropertyKind::ALL {
            let e = report.get(kind);
            assert_relative_eq!(e.mape, 50.0, epsilon = 1e-9);
            assert_relative_eq!(e.max_abs_percentage_error, 50.0, epsilon = 1e-9);
            assert_eq!(e.fraction_above_5pct, 1.0);
        }
    }

    #[test]
    fn alternating_errors_match_hand_computed_report() {
        // Exhaustive 4x2 set; predictions alternate +3% and +7% by sample
        // index: MAPE 5%, max 7%, and exactly half the samples above 5%.
        let grid = Grid::G4x2;
        let evaluator = FemEvaluator::new(grid);
        let samples: Vec<LabeledSample> = (0..256u16)
            .map(|genome| {
                let bits = (0..8).map(|g| genome >> g & 1 == 1).collect();
                let micro = Microstructure::new(grid, bits).unwrap();
                let properties = evaluator.evaluate(&micro).unwrap();
                LabeledSample { microstructure: micro, properties }
            })
            .collect();
        let ds = LabeledDataset::new(grid, samples).unwrap();
        let oracle = ScaledOracle {
            grid,
            factors: vec![1.03, 1.07],
        };
        let report = evaluate(&oracle, &ds).unwrap();
        assert_eq!(report.sample_count, 256);
        for kind in PropertyKind::ALL {
            let e = report.get(kind);
            assert_relative_eq!(e.mape, 5.0, epsilon = 1e-9);
            assert_relative_eq!(e.max_abs_percentage_error, 7.0, epsilon = 1e-9);
            assert_relative_eq!(e.fraction_above_5pct, 0.5, epsilon = 1e-12);
            assert_eq!(e.excluded, 0);
        }
    }

    #[test]
    fn zero_labels_are_excluded_with_count() {
        let micro = Microstructure::all_stiff(Grid::G4x2);
        let truth = FemEvaluator::new(Grid::G4x2).evaluate(&micro).unwrap();
        let mut zeroed = truth.as_array();
        zeroed[0] = 0.0; // modulus label zero -> excluded for modulus only
        let ds = LabeledDataset::new(
            Grid::G4x2,
            vec![
                LabeledSample {
                    microstructure: micro.clone(),
                    properties: CompositeProperties::from_array(zeroed),
                },
                LabeledSample {
                    microstructure: micro.clone(),
                    properties: truth,
                },
            ],
        )
        .unwrap();
        let report = evaluate(&FemEvaluator::new(Grid::G4x2), &ds).unwrap();
        assert_eq!(report.modulus.excluded, 1);
        assert_eq!(report.strength.excluded, 0);
        assert_relative_eq!(report.modulus.mape, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn eval_csv_is_written() {
        let ds = generate(Grid::G4x2, 10, 2, 0).unwrap();
        let report = evaluate(&FemEvaluator::new(Grid::G4x2), &ds).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eval.csv");
        write_eval_csv(&path, &report).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("property,mape,max_error,frac_gt_5pct\n"));
    }
}
