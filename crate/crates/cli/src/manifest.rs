use std::path::PathBuf;

use anyhow::{bail, Result};

use crate::Command;

/// What one invocation reads, writes and is seeded with.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub overrides: Vec<(&'static str, String)>,
}

impl RunManifest {
    pub fn from_command(cmd: &Command) -> Self {
        let mut m = RunManifest {
            subcommand: "",
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            overrides: Vec::new(),
        };
        match cmd {
            Command::Synth(a) => {
                m.subcommand = "synth";
                m.inputs.extend(a.config.clone());
                m.outputs = vec![a.events.clone(), a.patients.clone(), a.truth.clone()];
                m.seed = Some(a.seed);
                let opt = |name, v: Option<String>| v.map(|v| (name, v));
                m.overrides.extend(
                    [
                        opt("n_patients", a.n_patients.map(|v| v.to_string())),
                        opt("clusters", a.clusters.map(|v| v.to_string())),
                        opt("noise", a.noise.map(|v| v.to_string())),
                        opt("hf_rate", a.hf_rate.map(|v| v.to_string())),
                    ]
                    .into_iter()
                    .flatten(),
                );
            }
            Command::TrainEmbeddings(a) => {
                m.subcommand = "train-embeddings";
                m.inputs.push(a.events.clone());
                m.inputs.extend(a.cohort.clone());
                m.outputs.push(a.out.clone());
                m.seed = Some(a.seed);
                m.overrides = vec![
                    ("dim", a.dim.to_string()),
                    ("window", a.window.to_string()),
                    ("epochs", a.epochs.to_string()),
                    ("batch", a.batch.to_string()),
                ];
            }
            Command::QueryNn(a) => {
                m.subcommand = "query-nn";
                m.inputs.push(a.emb.clone());
            }
            Command::Analogy(a) => {
                m.subcommand = "analogy";
                m.inputs.push(a.emb.clone());
            }
            Command::BuildCohort(a) => {
                m.subcommand = "build-cohort";
                m.inputs = vec![a.events.clone(), a.patients.clone()];
                m.inputs.extend(a.codes.clone());
                m.outputs.push(a.out.clone());
                m.seed = Some(a.seed);
            }
            Command::Featurize(a) => {
                m.subcommand = "featurize";
                m.inputs = vec![a.events.clone(), a.cohort.clone()];
                m.inputs.extend(a.emb.clone());
                m.outputs.push(a.out.clone());
            }
            Command::Evaluate(a) => {
                m.subcommand = "evaluate";
                m.inputs = vec![a.events.clone(), a.cohort.clone(), a.emb.clone()];
                m.outputs.push(a.out_dir.clone());
                m.seed = Some(a.seed);
            }
            Command::ExportVectors(a) => {
                m.subcommand = "export-vectors";
                m.inputs.push(a.emb.clone());
                m.outputs = vec![a.vectors.clone(), a.metadata.clone()];
            }
        }
        m
    }

    /// Fails unless every input path names an existing file and no output
    /// path would overwrite an input.
    pub fn check(&self) -> Result<()> {
        for p in &self.inputs {
            if !p.is_file() {
                bail!("{}: input file not found: {}", self.subcommand, p.display());
            }
        }
        for out in &self.outputs {
            if self.inputs.contains(out) {
                bail!("{}: output would overwrite input {}", self.subcommand, out.display());
            }
        }
        Ok(())
    }
}
