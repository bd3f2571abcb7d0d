use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use medvec_core::cohort::{self, MatchCriteria};
use medvec_core::embedding_space;
use medvec_core::features::{self, Coverage, Featurizer};
use medvec_core::ingest;
use medvec_core::predict::{run_experiment_with, ExperimentOptions};
use medvec_core::skipgram;
use medvec_core::synthgen;
use medvec_core::{
    CaseCriteria, ClassifierKind, ClassifierSpec, CohortLabel, CohortStatus, ConceptCode, EmbeddingMatrix,
    EvalReport, EventRecord, FeatureKind, FeatureMatrix, SynthConfig, TrainConfig, Vocabulary,
};

use crate::{
    AnalogyArgs, CohortArgs, Command, EvaluateArgs, ExportArgs, FeaturizeArgs, QueryArgs, Subset, SynthArgs,
    TrainArgs,
};

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth(a) => synth(a),
        Command::TrainEmbeddings(a) => train_embeddings(a),
        Command::QueryNn(a) => query_nn(a),
        Command::Analogy(a) => analogy(a),
        Command::BuildCohort(a) => build_cohort(a),
        Command::Featurize(a) => featurize(a),
        Command::Evaluate(a) => evaluate(a),
        Command::ExportVectors(a) => export_vectors(a),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Writes `bytes` to `path` in one go, so a failed command never leaves a
/// half-written file behind from its own formatting errors.
fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn read_events(path: &Path) -> Result<Vec<EventRecord>> {
    ingest::parse_events(open(path)?).with_context(|| format!("reading events from {}", path.display()))
}

fn read_cohort(path: &Path) -> Result<Vec<CohortLabel>> {
    cohort::read_cohort(open(path)?).with_context(|| format!("reading cohort from {}", path.display()))
}

fn read_embeddings(path: &Path) -> Result<(EmbeddingMatrix, Vocabulary)> {
    embedding_space::import_embeddings(open(path)?)
        .with_context(|| format!("reading embeddings from {}", path.display()))
}

fn parse_concept(s: &str) -> Result<ConceptCode> {
    ConceptCode::from_str(s).map_err(|e| anyhow!("bad concept {s:?}: {e}"))
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_reader(open(p)?).with_context(|| format!("reading {}", p.display()))?,
        None => SynthConfig::default(),
    };
    cfg.seed = a.seed;
    if let Some(n) = a.n_patients {
        cfg.n_patients = n;
    }
    if let Some(k) = a.clusters {
        cfg.n_clusters = k;
    }
    if let Some(x) = a.noise {
        cfg.noise_rate = x;
    }
    if let Some(x) = a.hf_rate {
        cfg.hf_rate = x;
    }
    let out = synthgen::generate(&cfg)?;

    let mut events = Vec::new();
    ingest::write_events(&mut events, &out.events)?;
    let mut patients = Vec::new();
    ingest::write_patients(&mut patients, &out.patients)?;
    let mut truth = serde_json::to_vec_pretty(&out.truth)?;
    truth.push(b'\n');

    write_file(&a.events, &events)?;
    write_file(&a.patients, &patients)?;
    write_file(&a.truth, &truth)?;
    eprintln!(
        "patients={} events={} intended_cases={}",
        out.patients.len(),
        out.events.len(),
        out.truth
            .intended_status
            .values()
            .filter(|&&s| s == CohortStatus::Case)
            .count()
    );
    Ok(())
}

fn train_embeddings(a: TrainArgs) -> Result<()> {
    let mut events = read_events(&a.events)?;
    if a.subset != Subset::All {
        let Some(path) = &a.cohort else {
            bail!("--subset {:?} needs --cohort", a.subset);
        };
        let cohort = read_cohort(path)?;
        let keep: HashSet<&str> = cohort
            .iter()
            .filter(|l| a.subset == Subset::CasesAndControls || l.status == CohortStatus::Case)
            .map(|l| l.patient_id.as_str())
            .collect();
        events.retain(|e| keep.contains(e.patient_id.as_str()));
    }
    let vocab = ingest::build_vocabulary(&events)?;
    let timelines = ingest::build_timelines(&events, &vocab)?;
    let cfg = TrainConfig {
        d: a.dim,
        w: a.window,
        epochs: a.epochs,
        batch_size: a.batch,
        seed: a.seed,
        ..TrainConfig::default()
    };
    eprintln!("patients={} concepts={}", timelines.len(), vocab.len());
    let emb = skipgram::train_logged(&timelines, vocab.len(), &cfg, &mut io::stderr().lock())?;

    let mut buf = Vec::new();
    embedding_space::export_embeddings(&emb, &vocab, &mut buf)?;
    write_file(&a.out, &buf)
}

fn print_scored(hits: &[medvec_core::ScoredConcept]) -> Result<()> {
    let mut out = io::stdout().lock();
    for h in hits {
        writeln!(out, "{}\t{:.6}", h.concept, h.score)?;
    }
    Ok(())
}

fn query_nn(a: QueryArgs) -> Result<()> {
    let (emb, vocab) = read_embeddings(&a.emb)?;
    let code = parse_concept(&a.code)?;
    let i = vocab
        .index_of(&code)
        .with_context(|| format!("{code} is not in {}", a.emb.display()))?;
    let hits = embedding_space::nearest_neighbors(&emb, &vocab, emb.row(i), a.k, &HashSet::from([i]))?;
    print_scored(&hits)
}

fn analogy(a: AnalogyArgs) -> Result<()> {
    let (emb, vocab) = read_embeddings(&a.emb)?;
    let plus = a.plus.iter().map(|s| parse_concept(s)).collect::<Result<Vec<_>>>()?;
    let minus = a.minus.iter().map(|s| parse_concept(s)).collect::<Result<Vec<_>>>()?;
    let hits = embedding_space::additive_query(&emb, &vocab, &plus, &minus, a.k)?;
    print_scored(&hits)
}

fn build_cohort(a: CohortArgs) -> Result<()> {
    let events = read_events(&a.events)?;
    let patients = ingest::parse_patients(open(&a.patients)?)
        .with_context(|| format!("reading patients from {}", a.patients.display()))?;
    let criteria = match &a.codes {
        Some(p) => CaseCriteria::with_codes(
            cohort::parse_qualifying_codes(open(p)?).with_context(|| format!("reading {}", p.display()))?,
        ),
        None => CaseCriteria::default(),
    };
    let (labels, summary) = cohort::build_cohort(&events, &patients, &criteria, &MatchCriteria::default(), a.seed)?;
    let mut buf = Vec::new();
    cohort::write_cohort(&mut buf, &labels)?;
    write_file(&a.out, &buf)?;
    eprintln!(
        "cases={} controls={} mean_controls_per_case={:.3} cases_without_controls={}",
        summary.cases,
        summary.controls,
        summary.mean_controls_per_case(),
        summary.cases_without_controls
    );
    Ok(())
}

struct Inputs {
    vocab: Vocabulary,
    timelines: Vec<medvec_core::PatientTimeline>,
    cohort: Vec<CohortLabel>,
}

fn load_inputs(events: &Path, cohort: &Path) -> Result<Inputs> {
    let events = read_events(events)?;
    let cohort = read_cohort(cohort)?;
    let vocab = ingest::build_vocabulary(&events)?;
    let timelines = ingest::build_timelines(&events, &vocab)?;
    Ok(Inputs {
        vocab,
        timelines,
        cohort,
    })
}

fn feature_matrix(inputs: &Inputs, kind: FeatureKind, emb: Option<&(EmbeddingMatrix, Vocabulary)>) -> Result<FeatureMatrix> {
    match kind {
        FeatureKind::OneHotCounts => Ok(features::build_features(
            &inputs.timelines,
            &inputs.cohort,
            Featurizer::OneHotCounts { n: inputs.vocab.len() },
        )?),
        FeatureKind::ConceptVector => {
            let Some((emb, emb_vocab)) = emb else {
                bail!("concept vectors need --emb");
            };
            let coverage = Coverage::between(&inputs.vocab, emb_vocab);
            eprintln!("covered {} of {} codes", coverage.covered(), inputs.vocab.len());
            Ok(features::build_features(
                &inputs.timelines,
                &inputs.cohort,
                Featurizer::ConceptVector {
                    emb,
                    coverage: &coverage,
                },
            )?)
        }
    }
}

fn featurize(a: FeaturizeArgs) -> Result<()> {
    let inputs = load_inputs(&a.events, &a.cohort)?;
    let emb = a.emb.as_deref().map(read_embeddings).transpose()?;
    let m = feature_matrix(&inputs, a.kind.into(), emb.as_ref())?;
    let mut buf = Vec::new();
    features::write_features(&mut buf, &m)?;
    write_file(&a.out, &buf)
}

fn report_file_name(r: &EvalReport) -> String {
    format!("{}__{}.json", r.classifier.kind.as_str(), r.feature_kind.as_str())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let inputs = load_inputs(&a.events, &a.cohort)?;
    let emb = read_embeddings(&a.emb)?;
    let one_hot = feature_matrix(&inputs, FeatureKind::OneHotCounts, None)?;
    let concept = feature_matrix(&inputs, FeatureKind::ConceptVector, Some(&emb))?;
    let options = ExperimentOptions { timing: !a.reference };

    let cells: Vec<(ClassifierSpec, &FeatureMatrix)> = ClassifierKind::ALL
        .iter()
        .flat_map(|&kind| {
            [&one_hot, &concept]
                .map(|m| (ClassifierSpec::tuned(kind, m.kind), m))
        })
        .collect();
    let reports: Vec<EvalReport> = std::thread::scope(|s| {
        let handles: Vec<_> = cells
            .iter()
            .map(|(spec, m)| s.spawn(move || run_experiment_with(m, spec, a.seed, options)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect::<medvec_core::Result<Vec<_>>>()
    })?;

    let mut files = Vec::with_capacity(reports.len());
    for r in &reports {
        let mut json = serde_json::to_vec_pretty(r)?;
        json.push(b'\n');
        files.push((a.out_dir.join(report_file_name(r)), json));
    }
    fs::create_dir_all(&a.out_dir).with_context(|| format!("cannot create {}", a.out_dir.display()))?;
    for (path, json) in &files {
        write_file(path, json)?;
    }

    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{:<20} {:<15} {:>8} {:>8} {:>12}",
        "classifier", "features", "mean_auc", "std_auc", "sec/fold"
    )?;
    for r in &reports {
        let secs = r.train_seconds_per_fold.iter().sum::<f64>() / r.train_seconds_per_fold.len() as f64;
        writeln!(
            out,
            "{:<20} {:<15} {:>8.4} {:>8.4} {:>12.4}",
            r.classifier.kind.as_str(),
            r.feature_kind.as_str(),
            r.mean_auc,
            r.std_auc,
            secs
        )?;
    }
    Ok(())
}

fn export_vectors(a: ExportArgs) -> Result<()> {
    let (emb, vocab) = read_embeddings(&a.emb)?;
    let mut vectors = BufWriter::new(Vec::new());
    let mut metadata = BufWriter::new(Vec::new());
    for (i, row) in emb.rows().enumerate() {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(vectors, "{}", line.join("\t"))?;
        writeln!(metadata, "{}", vocab.code_at(i))?;
    }
    write_file(&a.vectors, &vectors.into_inner()?)?;
    write_file(&a.metadata, &metadata.into_inner()?)
}
