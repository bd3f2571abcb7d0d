//! `medvec`: command-line entry points for the concept embedding and
//! heart-failure prediction pipeline.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use medvec_core::FeatureKind;

#[derive(Debug, Parser)]
#[command(name = "medvec", version, about = "Medical concept embeddings and heart-failure prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic population with planted concept clusters.
    Synth(SynthArgs),
    /// Train concept vectors on an event log.
    TrainEmbeddings(TrainArgs),
    /// Print the concepts closest to a code by cosine similarity.
    QueryNn(QueryArgs),
    /// Print the concepts closest to a sum/difference of concept vectors.
    Analogy(AnalogyArgs),
    /// Identify heart-failure cases and draw matched controls.
    BuildCohort(CohortArgs),
    /// Build patient feature rows for a cohort.
    Featurize(FeaturizeArgs),
    /// Cross-validate all four classifiers on both feature kinds.
    Evaluate(EvaluateArgs),
    /// Write vectors and labels as two tab-separated files.
    ExportVectors(ExportArgs),
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: u64,
    /// Output event log (JSON lines).
    #[arg(long)]
    pub events: PathBuf,
    /// Output patient table (JSON lines).
    #[arg(long)]
    pub patients: PathBuf,
    /// Output ground-truth JSON.
    #[arg(long)]
    pub truth: PathBuf,
    /// Base configuration as JSON; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_patients: Option<usize>,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub hf_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subset {
    /// Every patient in the event log.
    All,
    /// Cohort cases only.
    Cases,
    /// Cohort cases and their matched controls.
    CasesAndControls,
}

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 100)]
    pub batch: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Cohort file, required unless `--subset all`.
    #[arg(long)]
    pub cohort: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Subset::All)]
    pub subset: Subset,
}

#[derive(Debug, clap::Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub emb: PathBuf,
    /// Concept as `domain:code`.
    #[arg(long)]
    pub code: String,
    #[arg(long, default_value_t = 50)]
    pub k: usize,
}

#[derive(Debug, clap::Args)]
pub struct AnalogyArgs {
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long, required = true)]
    pub plus: Vec<String>,
    #[arg(long)]
    pub minus: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
}

#[derive(Debug, clap::Args)]
pub struct CohortArgs {
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub patients: PathBuf,
    /// Qualifying diagnosis codes, one per line; defaults to the built-in list.
    #[arg(long)]
    pub codes: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    ConceptVector,
    OneHotCounts,
}

impl From<KindArg> for FeatureKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::ConceptVector => FeatureKind::ConceptVector,
            KindArg::OneHotCounts => FeatureKind::OneHotCounts,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub cohort: PathBuf,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Embedding file, required for concept vectors.
    #[arg(long)]
    pub emb: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub cohort: PathBuf,
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Directory receiving one JSON report per cell.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Report zero timings so that reruns are byte-identical.
    #[arg(long)]
    pub reference: bool,
}

#[derive(Debug, clap::Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub emb: PathBuf,
    /// One tab-separated vector per line.
    #[arg(long)]
    pub vectors: PathBuf,
    /// One concept label per line, aligned with `--vectors`.
    #[arg(long)]
    pub metadata: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = manifest::RunManifest::from_command(&cli.command)
        .check()
        .and_then(|()| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
