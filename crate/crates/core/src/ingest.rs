//! Event and patient log parsing, the code vocabulary, and per-patient
//! timelines of date-grouped visits.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Diagnosis,
    Medication,
    Procedure,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Diagnosis, Domain::Medication, Domain::Procedure];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Diagnosis => "diagnosis",
            Domain::Medication => "medication",
            Domain::Procedure => "procedure",
        }
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "diagnosis" => Ok(Domain::Diagnosis),
            "medication" => Ok(Domain::Medication),
            "procedure" => Ok(Domain::Procedure),
            other => Err(format!("unknown domain {other:?}")),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventSource {
    Encounter,
    ProblemList,
    MedicationOrder,
    ProcedureOrder,
    ImageOrder,
    OtherOrder,
}

impl EventSource {
    pub fn as_str(self) -> &'static str {
        match self {
            EventSource::Encounter => "encounter",
            EventSource::ProblemList => "problem_list",
            EventSource::MedicationOrder => "medication_order",
            EventSource::ProcedureOrder => "procedure_order",
            EventSource::ImageOrder => "image_order",
            EventSource::OtherOrder => "other_order",
        }
    }
}

impl FromStr for EventSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "encounter" => Ok(EventSource::Encounter),
            "problem_list" => Ok(EventSource::ProblemList),
            "medication_order" => Ok(EventSource::MedicationOrder),
            "procedure_order" => Ok(EventSource::ProcedureOrder),
            "image_order" => Ok(EventSource::ImageOrder),
            "other_order" => Ok(EventSource::OtherOrder),
            other => Err(format!("unknown source {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sex {
    F,
    M,
}

impl FromStr for Sex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "F" => Ok(Sex::F),
            "M" => Ok(Sex::M),
            other => Err(format!("unknown sex {other:?}")),
        }
    }
}

/// A medical code qualified by its domain. The same code string in two
/// domains names two different concepts.
///
/// Ordering is lexicographic on `(domain, code)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptCode {
    pub domain: Domain,
    pub code: String,
}

impl ConceptCode {
    pub fn new(domain: Domain, code: impl Into<String>) -> Self {
        Self {
            domain,
            code: code.into(),
        }
    }

    pub fn diagnosis(code: impl Into<String>) -> Self {
        Self::new(Domain::Diagnosis, code)
    }
}

impl fmt::Display for ConceptCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.domain, self.code)
    }
}

/// Parses the `<domain>:<code>` form used by the embedding file and the CLI.
impl FromStr for ConceptCode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (domain, code) = s
            .split_once(':')
            .ok_or_else(|| format!("expected <domain>:<code>, got {s:?}"))?;
        if code.is_empty() {
            return Err(format!("empty code in {s:?}"));
        }
        Ok(ConceptCode::new(domain.parse()?, code))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub patient_id: String,
    pub date: NaiveDate,
    pub concept: ConceptCode,
    pub source: EventSource,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatientRecord {
    pub patient_id: String,
    pub sex: Sex,
    pub birth_date: NaiveDate,
    pub clinic_id: String,
}

// Wire forms. Enum-valued fields stay strings here so that errors can name
// the offending field.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    patient_id: String,
    date: String,
    code: String,
    domain: String,
    source: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPatient {
    patient_id: String,
    sex: String,
    birth_date: String,
    clinic_id: String,
}

fn parse_date(value: &str, line: usize) -> Result<NaiveDate> {
    // chrono accepts unpadded fields; the format is fixed-width.
    if value.len() != 10 {
        return Err(Error::InvalidDate {
            line,
            value: value.to_string(),
        });
    }
    NaiveDate::parse_from_str(value, DATE_FORMAT).map_err(|_| Error::InvalidDate {
        line,
        value: value.to_string(),
    })
}

fn field_error(line: usize, field: &str, message: impl fmt::Display) -> Error {
    Error::Parse {
        line,
        message: format!("field `{field}`: {message}"),
    }
}

fn non_empty(line: usize, field: &str, value: String) -> Result<String> {
    if value.is_empty() {
        Err(field_error(line, field, "must not be empty"))
    } else {
        Ok(value)
    }
}

/// Reads the events JSON-lines stream. Blank lines are skipped; line numbers
/// in errors are 1-based.
pub fn parse_events<R: BufRead>(reader: R) -> Result<Vec<EventRecord>> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawEvent = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let domain = raw
            .domain
            .parse::<Domain>()
            .map_err(|e| field_error(line_no, "domain", e))?;
        let source = raw
            .source
            .parse::<EventSource>()
            .map_err(|e| field_error(line_no, "source", e))?;
        let code = non_empty(line_no, "code", raw.code)?;
        if code.contains(char::is_whitespace) {
            return Err(field_error(line_no, "code", "must not contain whitespace"));
        }
        events.push(EventRecord {
            patient_id: non_empty(line_no, "patient_id", raw.patient_id)?,
            date: parse_date(&raw.date, line_no)?,
            concept: ConceptCode::new(domain, code),
            source,
        });
    }
    Ok(events)
}

/// Reads the patients JSON-lines stream, rejecting duplicate ids.
pub fn parse_patients<R: BufRead>(reader: R) -> Result<Vec<PatientRecord>> {
    let mut patients = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawPatient = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let sex = raw
            .sex
            .parse::<Sex>()
            .map_err(|e| field_error(line_no, "sex", e))?;
        let patient_id = non_empty(line_no, "patient_id", raw.patient_id)?;
        if !seen.insert(patient_id.clone()) {
            return Err(field_error(
                line_no,
                "patient_id",
                format!("duplicate id {patient_id:?}"),
            ));
        }
        patients.push(PatientRecord {
            patient_id,
            sex,
            birth_date: parse_date(&raw.birth_date, line_no)?,
            clinic_id: raw.clinic_id,
        });
    }
    Ok(patients)
}

pub fn write_events<W: std::io::Write>(mut w: W, events: &[EventRecord]) -> Result<()> {
    for e in events {
        let raw = RawEvent {
            patient_id: e.patient_id.clone(),
            date: e.date.format(DATE_FORMAT).to_string(),
            code: e.concept.code.clone(),
            domain: e.concept.domain.as_str().to_string(),
            source: e.source.as_str().to_string(),
        };
        serde_json::to_writer(&mut w, &raw)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_patients<W: std::io::Write>(mut w: W, patients: &[PatientRecord]) -> Result<()> {
    for p in patients {
        let raw = RawPatient {
            patient_id: p.patient_id.clone(),
            sex: format!("{:?}", p.sex),
            birth_date: p.birth_date.format(DATE_FORMAT).to_string(),
            clinic_id: p.clinic_id.clone(),
        };
        serde_json::to_writer(&mut w, &raw)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Bijection between concepts and dense indices `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    index_of: HashMap<ConceptCode, usize>,
    code_at: Vec<ConceptCode>,
    frequency: Vec<u64>,
}

impl Vocabulary {
    /// Builds a vocabulary from an explicit ordering, e.g. the rows of an
    /// embedding file. Every frequency is set to 1.
    pub fn from_codes(codes: Vec<ConceptCode>) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::EmptyInput("vocabulary"));
        }
        let mut index_of = HashMap::with_capacity(codes.len());
        for (i, c) in codes.iter().enumerate() {
            if index_of.insert(c.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate concept {c}")));
            }
        }
        let frequency = vec![1; codes.len()];
        Ok(Self {
            index_of,
            code_at: codes,
            frequency,
        })
    }

    pub fn len(&self) -> usize {
        self.code_at.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code_at.is_empty()
    }

    pub fn index_of(&self, code: &ConceptCode) -> Option<usize> {
        self.index_of.get(code).copied()
    }

    pub fn code_at(&self, index: usize) -> &ConceptCode {
        &self.code_at[index]
    }

    pub fn codes(&self) -> &[ConceptCode] {
        &self.code_at
    }

    pub fn frequency(&self) -> &[u64] {
        &self.frequency
    }
}

/// Distinct concepts indexed by descending frequency; ties go to the
/// lexicographically smaller `(domain, code)`.
pub fn build_vocabulary(events: &[EventRecord]) -> Result<Vocabulary> {
    if events.is_empty() {
        return Err(Error::EmptyInput("events"));
    }
    let mut counts: HashMap<&ConceptCode, u64> = HashMap::new();
    for e in events {
        *counts.entry(&e.concept).or_default() += 1;
    }
    let mut entries: Vec<(&ConceptCode, u64)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let code_at: Vec<ConceptCode> = entries.iter().map(|(c, _)| (*c).clone()).collect();
    let frequency = entries.iter().map(|(_, n)| *n).collect();
    let index_of = code_at
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    Ok(Vocabulary {
        index_of,
        code_at,
        frequency,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visit {
    pub date: NaiveDate,
    pub codes: Vec<usize>,
}

/// One patient's codes grouped into visits with strictly increasing dates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatientTimeline {
    pub patient_id: String,
    pub visits: Vec<Visit>,
}

impl PatientTimeline {
    pub fn code_count(&self) -> usize {
        self.visits.iter().map(|v| v.codes.len()).sum()
    }
}

/// Groups events by patient and date. Timelines come out sorted by
/// patient id; within a visit codes keep their input order, duplicates
/// included.
pub fn build_timelines(events: &[EventRecord], vocab: &Vocabulary) -> Result<Vec<PatientTimeline>> {
    let mut by_patient: BTreeMap<&str, BTreeMap<NaiveDate, Vec<usize>>> = BTreeMap::new();
    for e in events {
        let idx = vocab
            .index_of(&e.concept)
            .ok_or_else(|| Error::UnknownConcept(e.concept.to_string()))?;
        by_patient
            .entry(&e.patient_id)
            .or_default()
            .entry(e.date)
            .or_default()
            .push(idx);
    }
    Ok(by_patient
        .into_iter()
        .map(|(id, visits)| PatientTimeline {
            patient_id: id.to_string(),
            visits: visits
                .into_iter()
                .map(|(date, codes)| Visit { date, codes })
                .collect(),
        })
        .collect())
}
