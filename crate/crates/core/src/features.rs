//! Patient feature rows built from the 18-month observation window before
//! each index date: either the sum of concept vectors or the aggregated
//! one-hot code counts.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::cohort::{CohortLabel, CohortStatus};
use crate::error::{Error, Result};
use crate::ingest::{PatientTimeline, Vocabulary};
use crate::skipgram::EmbeddingMatrix;

/// 18 months, in days.
pub const OBSERVATION_DAYS: i64 = 548;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    ConceptVector,
    OneHotCounts,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 2] = [FeatureKind::OneHotCounts, FeatureKind::ConceptVector];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::ConceptVector => "concept_vector",
            FeatureKind::OneHotCounts => "one_hot_counts",
        }
    }
}

/// Row-major `P × f` features with binary labels (1 = case).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub kind: FeatureKind,
    pub f: usize,
    pub values: Vec<f64>,
    pub labels: Vec<u8>,
    pub patient_ids: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(
        kind: FeatureKind,
        f: usize,
        values: Vec<f64>,
        labels: Vec<u8>,
        patient_ids: Vec<String>,
    ) -> Result<Self> {
        if f == 0 || values.len() != labels.len() * f || patient_ids.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} values, {} labels and {} ids for width {f}",
                values.len(),
                labels.len(),
                patient_ids.len()
            )));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::Config("labels must be 0 or 1".into()));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(Self {
            kind,
            f,
            values,
            labels,
            patient_ids,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.f..(i + 1) * self.f]
    }

    /// Copies the selected rows, in order.
    pub fn select(&self, rows: &[usize]) -> (Vec<f64>, Vec<u8>) {
        let mut x = Vec::with_capacity(rows.len() * self.f);
        let mut y = Vec::with_capacity(rows.len());
        for &i in rows {
            x.extend_from_slice(self.row(i));
            y.push(self.labels[i]);
        }
        (x, y)
    }
}

/// Codes recorded in `[index_date − 548 days, index_date)`, multiplicity kept.
pub fn observation_window(timeline: &PatientTimeline, index_date: NaiveDate) -> Vec<usize> {
    let start = index_date - Duration::days(OBSERVATION_DAYS);
    timeline
        .visits
        .iter()
        .filter(|v| v.date >= start && v.date < index_date)
        .flat_map(|v| v.codes.iter().copied())
        .collect()
}

/// Maps each vocabulary index to its embedding row, when it has one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coverage(Vec<Option<usize>>);

impl Coverage {
    /// Concepts of `vocab` that also appear in the embedding's vocabulary.
    pub fn between(vocab: &Vocabulary, emb_vocab: &Vocabulary) -> Self {
        Self(vocab.codes().iter().map(|c| emb_vocab.index_of(c)).collect())
    }

    /// Indices sharing one vocabulary; only those in `covered` have vectors.
    pub fn subset(n: usize, covered: impl IntoIterator<Item = usize>) -> Self {
        let mut map = vec![None; n];
        for i in covered {
            map[i] = Some(i);
        }
        Self(map)
    }

    pub fn full(n: usize) -> Self {
        Self((0..n).map(Some).collect())
    }

    pub fn row_of(&self, index: usize) -> Option<usize> {
        self.0.get(index).copied().flatten()
    }

    pub fn covered(&self) -> usize {
        self.0.iter().filter(|r| r.is_some()).count()
    }
}

/// Sum of the embedding rows of covered codes; uncovered codes are skipped.
pub fn patient_vector(codes: &[usize], emb: &EmbeddingMatrix, coverage: &Coverage) -> Vec<f64> {
    let mut out = vec![0.0; emb.d()];
    for &c in codes {
        if let Some(r) = coverage.row_of(c) {
            for (o, x) in out.iter_mut().zip(emb.row(r)) {
                *o += x;
            }
        }
    }
    out
}

pub fn one_hot_counts(codes: &[usize], n: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    for &c in codes {
        *out
            .get_mut(c)
            .ok_or(Error::IndexOutOfRange { index: c, len: n })? += 1.0;
    }
    Ok(out)
}

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit<'a, I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        let Some(first) = rows.first() else {
            return Err(Error::EmptyInput("standardizer rows"));
        };
        let f = first.len();
        if rows.iter().any(|r| r.len() != f) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let p = rows.len() as f64;
        let mut mean = vec![0.0; f];
        for r in &rows {
            for (m, x) in mean.iter_mut().zip(*r) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= p);
        let mut var = vec![0.0; f];
        for r in &rows {
            for ((v, x), m) in var.iter_mut().zip(*r).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        // A constant column can leave rounding residue in `var`; pin it to 0.
        let constant: Vec<bool> = (0..f).map(|j| rows.iter().all(|r| r[j] == first[j])).collect();
        let std = var
            .into_iter()
            .zip(constant)
            .map(|(v, c)| if c { 0.0 } else { (v / p).sqrt() })
            .collect();
        Ok(Self { mean, std })
    }

    /// Standardizes one row in place; zero-variance features become 0.
    pub fn apply_row(&self, row: &mut [f64]) {
        for ((x, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
            *x = if *s > 0.0 { (*x - m) / s } else { 0.0 };
        }
    }

    /// Standardizes a flat row-major buffer of width `mean.len()`.
    pub fn apply(&self, values: &mut [f64]) {
        for row in values.chunks_exact_mut(self.mean.len()) {
            self.apply_row(row);
        }
    }
}

pub fn fit_standardizer(train_rows: &[Vec<f64>]) -> Result<Standardizer> {
    Standardizer::fit(train_rows.iter().map(Vec::as_slice))
}

pub fn apply_standardizer(s: &Standardizer, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| {
            let mut r = r.clone();
            s.apply_row(&mut r);
            r
        })
        .collect()
}

/// Source of per-code vectors for concept-vector features.
#[derive(Debug, Clone, Copy)]
pub enum Featurizer<'a> {
    ConceptVector {
        emb: &'a EmbeddingMatrix,
        coverage: &'a Coverage,
    },
    OneHotCounts {
        n: usize,
    },
}

impl Featurizer<'_> {
    pub fn kind(&self) -> FeatureKind {
        match self {
            Featurizer::ConceptVector { .. } => FeatureKind::ConceptVector,
            Featurizer::OneHotCounts { .. } => FeatureKind::OneHotCounts,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Featurizer::ConceptVector { emb, .. } => emb.d(),
            Featurizer::OneHotCounts { n } => *n,
        }
    }

    pub fn featurize(&self, codes: &[usize]) -> Result<Vec<f64>> {
        match self {
            Featurizer::ConceptVector { emb, coverage } => Ok(patient_vector(codes, emb, coverage)),
            Featurizer::OneHotCounts { n } => one_hot_counts(codes, *n),
        }
    }
}

/// One unstandardized row per cohort member, in cohort order. Cases are
/// labeled 1. A member without a timeline gets an empty window.
pub fn build_features(
    timelines: &[PatientTimeline],
    cohort: &[CohortLabel],
    featurizer: Featurizer<'_>,
) -> Result<FeatureMatrix> {
    let by_id: HashMap<&str, &PatientTimeline> =
        timelines.iter().map(|t| (t.patient_id.as_str(), t)).collect();
    let f = featurizer.width();
    let mut values = Vec::with_capacity(cohort.len() * f);
    let mut labels = Vec::with_capacity(cohort.len());
    let mut ids = Vec::with_capacity(cohort.len());
    for member in cohort {
        let codes = by_id
            .get(member.patient_id.as_str())
            .map(|t| observation_window(t, member.index_date))
            .unwrap_or_default();
        values.extend(featurizer.featurize(&codes)?);
        labels.push(u8::from(member.status == CohortStatus::Case));
        ids.push(member.patient_id.clone());
    }
    FeatureMatrix::new(featurizer.kind(), f, values, labels, ids)
}

#[derive(Debug, Serialize, Deserialize)]
struct FeatureLine {
    patient_id: String,
    label: u8,
    features: Vec<f64>,
}

pub fn write_features<W: Write>(mut w: W, m: &FeatureMatrix) -> Result<()> {
    for i in 0..m.len() {
        let line = FeatureLine {
            patient_id: m.patient_ids[i].clone(),
            label: m.labels[i],
            features: m.row(i).to_vec(),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_features<R: BufRead>(reader: R, kind: FeatureKind) -> Result<FeatureMatrix> {
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    let mut f = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: FeatureLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        let width = *f.get_or_insert(parsed.features.len());
        if parsed.features.len() != width {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected {width} features, found {}", parsed.features.len()),
            });
        }
        values.extend(parsed.features);
        labels.push(parsed.label);
        ids.push(parsed.patient_id);
    }
    FeatureMatrix::new(kind, f.unwrap_or(0), values, labels, ids)
}
