use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::auc::auc;
use super::folds::make_folds;
use super::models::{train, ClassifierSpec, Dataset};
use crate::error::{Error, Result};
use crate::features::{FeatureKind, FeatureMatrix, Standardizer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: ClassifierSpec,
    pub feature_kind: FeatureKind,
    pub per_fold_auc: Vec<f64>,
    pub mean_auc: f64,
    /// Population standard deviation of `per_fold_auc`.
    pub std_auc: f64,
    /// Fitting time per fold; for KNN, time to score the test chunk.
    pub train_seconds_per_fold: Vec<f64>,
}

impl EvalReport {
    pub fn from_folds(
        classifier: ClassifierSpec,
        feature_kind: FeatureKind,
        per_fold_auc: Vec<f64>,
        train_seconds_per_fold: Vec<f64>,
    ) -> Self {
        let n = per_fold_auc.len() as f64;
        let mean_auc = per_fold_auc.iter().sum::<f64>() / n;
        let std_auc = (per_fold_auc.iter().map(|a| (a - mean_auc).powi(2)).sum::<f64>() / n).sqrt();
        Self {
            classifier,
            feature_kind,
            per_fold_auc,
            mean_auc,
            std_auc,
            train_seconds_per_fold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentOptions {
    /// Record wall-clock timings; when false they are reported as 0.
    pub timing: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self { timing: true }
    }
}

pub fn run_experiment(features: &FeatureMatrix, spec: &ClassifierSpec, seed: u64) -> Result<EvalReport> {
    run_experiment_with(features, spec, seed, ExperimentOptions::default())
}

/// Six-fold evaluation: per fold, standardize with statistics of the five
/// training chunks, fit (selecting the epoch by validation AUC), and score
/// the test chunk.
pub fn run_experiment_with(
    features: &FeatureMatrix,
    spec: &ClassifierSpec,
    seed: u64,
    options: ExperimentOptions,
) -> Result<EvalReport> {
    spec.validate()?;
    if features.is_empty() {
        return Err(Error::EmptyInput("features"));
    }
    let folds = make_folds(&features.labels, seed)?;
    let f = features.f;
    let mut per_fold_auc = Vec::with_capacity(folds.folds.len());
    let mut seconds = Vec::with_capacity(folds.folds.len());

    for (k, fold) in folds.folds.iter().enumerate() {
        let train_rows = folds.train_rows(fold);
        let scaler = Standardizer::fit(train_rows.iter().map(|&i| features.row(i)))?;
        let (mut train_x, train_y) = features.select(&train_rows);
        let (mut val_x, val_y) = features.select(folds.validation_rows(fold));
        let (mut test_x, test_y) = features.select(folds.test_rows(fold));
        scaler.apply(&mut train_x);
        scaler.apply(&mut val_x);
        scaler.apply(&mut test_x);
        let train_set = Dataset::new(&train_x, &train_y, f)?;
        let val_set = Dataset::new(&val_x, &val_y, f)?;

        let started = Instant::now();
        let fitted = train(&train_set, spec, Some(&val_set), seed.wrapping_add(k as u64))?;
        let mut elapsed = started.elapsed().as_secs_f64();

        let started = Instant::now();
        let scores = fitted.model.score_rows(&test_x, f);
        if !spec.kind.is_gradient_trained() {
            elapsed = started.elapsed().as_secs_f64();
        }
        per_fold_auc.push(auc(&scores, &test_y)?);
        seconds.push(if options.timing { elapsed } else { 0.0 });
    }
    Ok(EvalReport::from_folds(*spec, features.kind, per_fold_auc, seconds))
}
