//! Dense vector representations of medical event codes learned from
//! timestamped patient records, patient vectors built by summing them, and
//! the case-control heart-failure prediction experiment that evaluates them.
//!
//! The pipeline runs in stages, one module each:
//!
//! * [`ingest`] parses event and patient logs and groups events into visits.
//! * [`corpus`] flattens visits into sequences and emits skip-gram pairs.
//! * [`skipgram`] holds the tied-weight full-softmax objective, its gradient
//!   and the training loop; [`optim`] holds the Adadelta update it uses.
//! * [`embedding_space`] answers cosine neighbor and additive queries and
//!   reads/writes the embedding text format.
//! * [`cohort`] applies the incident heart-failure case definition and
//!   draws matched controls.
//! * [`features`] turns observation windows into standardized patient rows.
//! * [`predict`] has the four classifiers, AUC and the 7-chunk cross
//!   validation harness.
//! * [`synthgen`] generates synthetic populations with planted structure.

pub mod cohort;
pub mod corpus;
pub mod embedding_space;
pub mod error;
pub mod features;
pub mod ingest;
pub mod optim;
pub mod predict;
pub mod skipgram;
pub mod synthgen;

pub use cohort::{CaseCriteria, CohortLabel, CohortStatus};
pub use corpus::{TrainingPair, WindowConfig};
pub use embedding_space::ScoredConcept;
pub use error::{Error, Result};
pub use features::{FeatureKind, FeatureMatrix, Standardizer};
pub use ingest::{
    ConceptCode, Domain, EventRecord, EventSource, PatientRecord, PatientTimeline, Sex, Vocabulary,
};
pub use optim::{Adadelta, AdadeltaConfig};
pub use predict::{ClassifierKind, ClassifierSpec, EvalReport};
pub use skipgram::{EmbeddingMatrix, TrainConfig};
pub use synthgen::SynthConfig;
