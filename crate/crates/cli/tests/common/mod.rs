#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

pub fn medvec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medvec"))
        .args(args)
        .output()
        .expect("medvec binary runs")
}

pub fn medvec_ok(args: &[&str]) -> Output {
    let out = medvec(args);
    assert!(
        out.status.success(),
        "medvec {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().expect("utf-8 temp path").to_string()
}

/// Runs every subcommand once on a small synthetic population inside `dir`
/// and returns each artifact (files, stdout, stderr) by name.
pub fn run_pipeline(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut artifacts = Vec::new();
    let mut record = |name: &str, out: Output| {
        artifacts.push((format!("{name}.stdout"), out.stdout));
        artifacts.push((format!("{name}.stderr"), out.stderr));
    };
    let f = |name: &str| p(dir, name);

    record(
        "synth",
        medvec_ok(&[
            "synth", "--seed", "4", "--n-patients", "700", "--events", &f("events.jsonl"), "--patients",
            &f("patients.jsonl"), "--truth", &f("truth.json"),
        ]),
    );
    record(
        "build-cohort",
        medvec_ok(&[
            "build-cohort", "--events", &f("events.jsonl"), "--patients", &f("patients.jsonl"), "--seed", "2",
            "--out", &f("cohort.jsonl"),
        ]),
    );
    record(
        "train-embeddings",
        medvec_ok(&[
            "train-embeddings", "--events", &f("events.jsonl"), "--dim", "16", "--window", "5", "--epochs", "2",
            "--batch", "100", "--seed", "7", "--out", &f("emb.txt"),
        ]),
    );
    record(
        "train-embeddings-cases",
        medvec_ok(&[
            "train-embeddings", "--events", &f("events.jsonl"), "--dim", "8", "--epochs", "1", "--seed", "7",
            "--cohort", &f("cohort.jsonl"), "--subset", "cases", "--out", &f("emb_cases.txt"),
        ]),
    );
    record(
        "query-nn",
        medvec_ok(&["query-nn", "--emb", &f("emb.txt"), "--code", "diagnosis:S00.00", "--k", "10"]),
    );
    record(
        "analogy",
        medvec_ok(&[
            "analogy", "--emb", &f("emb.txt"), "--plus", "diagnosis:S00.00", "--plus", "medication:RX01-000",
            "--minus", "procedure:PX02000", "--k", "5",
        ]),
    );
    for kind in ["concept-vector", "one-hot-counts"] {
        record(
            &format!("featurize-{kind}"),
            medvec_ok(&[
                "featurize", "--events", &f("events.jsonl"), "--cohort", &f("cohort.jsonl"), "--kind", kind,
                "--emb", &f("emb_cases.txt"), "--out", &f(&format!("features-{kind}.jsonl")),
            ]),
        );
    }
    record(
        "evaluate",
        medvec_ok(&[
            "evaluate", "--events", &f("events.jsonl"), "--cohort", &f("cohort.jsonl"), "--emb", &f("emb.txt"),
            "--seed", "3", "--out-dir", &f("reports"), "--reference",
        ]),
    );
    record(
        "export-vectors",
        medvec_ok(&[
            "export-vectors", "--emb", &f("emb.txt"), "--vectors", &f("vectors.tsv"), "--metadata",
            &f("metadata.tsv"),
        ]),
    );

    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    collect_files(dir, dir, &mut files);
    files.sort();
    artifacts.extend(files);
    artifacts
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
    for entry in fs::read_dir(dir).expect("readable dir") {
        let path = entry.expect("dir entry").path();
        if path.is_dir() {
            collect_files(root, &path, out);
        } else {
            let name = path.strip_prefix(root).expect("under root").display().to_string();
            out.push((name, fs::read(&path).expect("readable file")));
        }
    }
}
