//! Classifiers, AUC, and the cross-validated evaluation harness.

mod auc;
mod experiment;
mod folds;
mod models;

pub use auc::auc;
pub use experiment::{run_experiment, run_experiment_with, EvalReport, ExperimentOptions};
pub use folds::{make_folds, Fold, Folds, N_CHUNKS, N_FOLDS};
pub use models::{
    knn_score, logreg_loss_grad, mlp_loss_grad, sigmoid, svm_loss_grad, train, train_logreg, train_mlp,
    train_svm, ClassifierKind, ClassifierSpec, Dataset, FitTrace, KnnModel, LinearModel, MlpLayout,
    MlpModel, Model, Trained,
};
