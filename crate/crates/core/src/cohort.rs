//! Incident heart-failure cases and matched controls.
//!
//! A case needs at least three qualifying encounters (distinct days) inside
//! one 365-day window, counted from the earliest of them, with age in
//! `[50, 85)` on that date. Controls share the case's clinic, sex and 5-year
//! age band, have no qualifying code in the year before the case's
//! diagnosis date, started care within a year of the case, and are still
//! seen around the diagnosis date.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};

use chrono::{Duration, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Domain, EventRecord, EventSource, PatientRecord, Sex, DATE_FORMAT};

/// ICD-9 codes that qualify as a heart-failure diagnosis.
pub const HF_QUALIFYING_CODES: [&str; 25] = [
    "398.91", "402.01", "402.11", "402.91", "404.01", "404.03", "404.11", "404.13", "404.91",
    "404.93", "428.0", "428.1", "428.20", "428.21", "428.22", "428.23", "428.30", "428.31",
    "428.32", "428.33", "428.40", "428.41", "428.42", "428.43", "428.9",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseCriteria {
    pub qualifying_codes: BTreeSet<String>,
    pub window_days: i64,
    pub min_encounters: usize,
    pub min_age_years: u32,
    pub max_age_years_exclusive: u32,
    pub qualifying_sources: BTreeSet<EventSource>,
}

impl Default for CaseCriteria {
    fn default() -> Self {
        Self::with_codes(HF_QUALIFYING_CODES.iter().map(|c| c.to_string()).collect())
    }
}

impl CaseCriteria {
    pub fn with_codes(qualifying_codes: BTreeSet<String>) -> Self {
        Self {
            qualifying_codes,
            window_days: 365,
            min_encounters: 3,
            min_age_years: 50,
            max_age_years_exclusive: 85,
            qualifying_sources: BTreeSet::from([
                EventSource::Encounter,
                EventSource::ProblemList,
                EventSource::MedicationOrder,
            ]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qualifying_codes.is_empty() {
            return Err(Error::Config("no qualifying codes".into()));
        }
        if self.min_encounters < 2 {
            return Err(Error::Config("min_encounters must be at least 2".into()));
        }
        if self.min_age_years >= self.max_age_years_exclusive {
            return Err(Error::Config("empty age range".into()));
        }
        Ok(())
    }

    /// Whether the event's code is a qualifying diagnosis, in any source.
    pub fn is_hf_code(&self, event: &EventRecord) -> bool {
        event.concept.domain == Domain::Diagnosis && self.qualifying_codes.contains(&event.concept.code)
    }

    /// Whether the event counts toward case qualification.
    pub fn qualifies(&self, event: &EventRecord) -> bool {
        self.is_hf_code(event) && self.qualifying_sources.contains(&event.source)
    }
}

/// Reads a qualifying-codes file: one code per line, blank lines ignored.
pub fn parse_qualifying_codes<R: BufRead>(reader: R) -> Result<BTreeSet<String>> {
    let mut codes = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        let code = line.trim();
        if !code.is_empty() {
            codes.insert(code.to_string());
        }
    }
    if codes.is_empty() {
        return Err(Error::EmptyInput("qualifying codes"));
    }
    Ok(codes)
}

/// Control selection rules; defaults follow the study protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchCriteria {
    pub max_controls: usize,
    pub age_band_years: u32,
    /// No qualifying code in this many days before the case's index date.
    pub washout_days: i64,
    /// Allowed distance between first encounters of case and control.
    pub first_encounter_days: i64,
    /// The control needs an encounter on or after index date minus this.
    pub followup_lead_days: i64,
}

impl Default for MatchCriteria {
    fn default() -> Self {
        Self {
            max_controls: 10,
            age_band_years: 5,
            washout_days: 365,
            first_encounter_days: 365,
            followup_lead_days: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CohortStatus {
    Case,
    Control,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortLabel {
    pub patient_id: String,
    pub status: CohortStatus,
    #[serde(with = "date_format")]
    pub index_date: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_case_id: Option<String>,
}

mod date_format {
    use super::DATE_FORMAT;
    use chrono::NaiveDate;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &NaiveDate, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&d.format(DATE_FORMAT).to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDate, D::Error> {
        let s = String::deserialize(d)?;
        NaiveDate::parse_from_str(&s, DATE_FORMAT).map_err(serde::de::Error::custom)
    }
}

/// Completed years of age on `on`.
pub fn age_in_years(birth: NaiveDate, on: NaiveDate) -> Option<u32> {
    on.years_since(birth)
}

/// Earliest date starting a run of `min_encounters` qualifying days that
/// all fall within `window_days` of it.
///
/// Scanning from the first date, an anchor that cannot collect enough
/// encounters in its window is dropped in favor of the next date. When the
/// second encounter lies beyond the window this moves the anchor to that
/// second encounter.
pub fn find_hf_diagnosis_date(dates: &[NaiveDate], criteria: &CaseCriteria) -> Result<Option<NaiveDate>> {
    if dates.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Unsorted("qualifying dates"));
    }
    let mut days: Vec<NaiveDate> = dates.to_vec();
    days.dedup();
    let need = criteria.min_encounters.max(1);
    let window = Duration::days(criteria.window_days);
    let mut end = 0;
    for (anchor, &start) in days.iter().enumerate() {
        end = end.max(anchor);
        while end < days.len() && days[end] - start <= window {
            end += 1;
        }
        if end - anchor >= need {
            return Ok(Some(start));
        }
    }
    Ok(None)
}

fn patient_index(patients: &[PatientRecord]) -> HashMap<&str, &PatientRecord> {
    patients.iter().map(|p| (p.patient_id.as_str(), p)).collect()
}

/// Patients meeting the case definition, sorted by patient id.
pub fn identify_cases(
    events: &[EventRecord],
    patients: &[PatientRecord],
    criteria: &CaseCriteria,
) -> Result<Vec<CohortLabel>> {
    criteria.validate()?;
    let by_id = patient_index(patients);
    let mut qualifying: HashMap<&str, BTreeSet<NaiveDate>> = HashMap::new();
    for e in events.iter().filter(|e| criteria.qualifies(e)) {
        qualifying.entry(&e.patient_id).or_default().insert(e.date);
    }
    let mut ids: Vec<&str> = qualifying.keys().copied().collect();
    ids.sort_unstable();

    let mut cases = Vec::new();
    for id in ids {
        let dates: Vec<NaiveDate> = qualifying[id].iter().copied().collect();
        let Some(hfdx) = find_hf_diagnosis_date(&dates, criteria)? else {
            continue;
        };
        let patient = by_id
            .get(id)
            .ok_or_else(|| Error::UnknownPatient(format!("{id} has no birth date on record")))?;
        let Some(age) = age_in_years(patient.birth_date, hfdx) else {
            continue;
        };
        if age >= criteria.min_age_years && age < criteria.max_age_years_exclusive {
            cases.push(CohortLabel {
                patient_id: id.to_string(),
                status: CohortStatus::Case,
                index_date: hfdx,
                matched_case_id: None,
            });
        }
    }
    Ok(cases)
}

#[derive(Debug, Default)]
struct EncounterSpan {
    first: Option<NaiveDate>,
    last: Option<NaiveDate>,
}

/// Per-patient facts the eligibility checks need.
struct MatchIndex<'a> {
    patients: HashMap<&'a str, &'a PatientRecord>,
    encounters: HashMap<&'a str, EncounterSpan>,
    hf_dates: HashMap<&'a str, Vec<NaiveDate>>,
}

impl<'a> MatchIndex<'a> {
    fn new(patients: &'a [PatientRecord], events: &'a [EventRecord], criteria: &CaseCriteria) -> Self {
        let mut encounters: HashMap<&str, EncounterSpan> = HashMap::new();
        let mut hf_dates: HashMap<&str, Vec<NaiveDate>> = HashMap::new();
        for e in events {
            if e.source == EventSource::Encounter {
                let span = encounters.entry(&e.patient_id).or_default();
                span.first = Some(span.first.map_or(e.date, |d| d.min(e.date)));
                span.last = Some(span.last.map_or(e.date, |d| d.max(e.date)));
            }
            if criteria.is_hf_code(e) {
                hf_dates.entry(&e.patient_id).or_default().push(e.date);
            }
        }
        for dates in hf_dates.values_mut() {
            dates.sort_unstable();
        }
        Self {
            patients: patient_index(patients),
            encounters,
            hf_dates,
        }
    }

    fn hf_code_between(&self, id: &str, from: NaiveDate, until_exclusive: NaiveDate) -> bool {
        self.hf_dates.get(id).is_some_and(|dates| {
            let i = dates.partition_point(|d| *d < from);
            i < dates.len() && dates[i] < until_exclusive
        })
    }
}

fn age_band(age: u32, criteria: &CaseCriteria, rules: &MatchCriteria) -> Option<u32> {
    (age >= criteria.min_age_years && age < criteria.max_age_years_exclusive)
        .then(|| (age - criteria.min_age_years) / rules.age_band_years)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchSummary {
    pub cases: usize,
    pub controls: usize,
    pub cases_without_controls: usize,
}

impl MatchSummary {
    pub fn mean_controls_per_case(&self) -> f64 {
        if self.cases == 0 {
            0.0
        } else {
            self.controls as f64 / self.cases as f64
        }
    }
}

/// Draws up to `rules.max_controls` controls per case. Cases are served in
/// ascending index date (then id); a patient is used as a control at most
/// once. Every patient not in `cases` is a candidate.
pub fn match_controls(
    cases: &[CohortLabel],
    patients: &[PatientRecord],
    events: &[EventRecord],
    criteria: &CaseCriteria,
    rules: &MatchCriteria,
    seed: u64,
) -> Result<Vec<CohortLabel>> {
    let index = MatchIndex::new(patients, events, criteria);
    let case_ids: HashSet<&str> = cases.iter().map(|c| c.patient_id.as_str()).collect();
    let mut candidates: Vec<&PatientRecord> = patients
        .iter()
        .filter(|p| !case_ids.contains(p.patient_id.as_str()))
        .collect();
    candidates.sort_by(|a, b| a.patient_id.cmp(&b.patient_id));

    let mut order: Vec<&CohortLabel> = cases.iter().collect();
    order.sort_by(|a, b| {
        a.index_date
            .cmp(&b.index_date)
            .then_with(|| a.patient_id.cmp(&b.patient_id))
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: HashSet<&str> = HashSet::new();
    let mut controls = Vec::new();
    let washout = Duration::days(rules.washout_days);
    let first_tol = Duration::days(rules.first_encounter_days);
    let lead = Duration::days(rules.followup_lead_days);

    for case in order {
        let hfdx = case.index_date;
        let case_rec = index
            .patients
            .get(case.patient_id.as_str())
            .ok_or_else(|| Error::UnknownPatient(case.patient_id.clone()))?;
        let Some(case_band) = age_in_years(case_rec.birth_date, hfdx).and_then(|a| age_band(a, criteria, rules))
        else {
            continue;
        };
        let Some(case_first) = index
            .encounters
            .get(case.patient_id.as_str())
            .and_then(|s| s.first)
        else {
            continue;
        };

        let eligible: Vec<&PatientRecord> = candidates
            .iter()
            .copied()
            .filter(|c| !used.contains(c.patient_id.as_str()))
            .filter(|c| c.clinic_id == case_rec.clinic_id && c.sex == case_rec.sex)
            .filter(|c| {
                age_in_years(c.birth_date, hfdx).and_then(|a| age_band(a, criteria, rules)) == Some(case_band)
            })
            .filter(|c| !index.hf_code_between(&c.patient_id, hfdx - washout, hfdx))
            .filter(|c| match index.encounters.get(c.patient_id.as_str()) {
                Some(EncounterSpan {
                    first: Some(first),
                    last: Some(last),
                }) => (*first - case_first).abs() <= first_tol && *last >= hfdx - lead,
                _ => false,
            })
            .collect();

        let take = eligible.len().min(rules.max_controls);
        let mut picked: Vec<&PatientRecord> = rand::seq::index::sample(&mut rng, eligible.len(), take)
            .into_iter()
            .map(|i| eligible[i])
            .collect();
        picked.sort_by(|a, b| a.patient_id.cmp(&b.patient_id));
        for c in picked {
            used.insert(&c.patient_id);
            controls.push(CohortLabel {
                patient_id: c.patient_id.clone(),
                status: CohortStatus::Control,
                index_date: hfdx,
                matched_case_id: Some(case.patient_id.clone()),
            });
        }
    }
    Ok(controls)
}

pub fn summarize(cases: &[CohortLabel], controls: &[CohortLabel]) -> MatchSummary {
    let matched: HashSet<&str> = controls
        .iter()
        .filter_map(|c| c.matched_case_id.as_deref())
        .collect();
    MatchSummary {
        cases: cases.len(),
        controls: controls.len(),
        cases_without_controls: cases
            .iter()
            .filter(|c| !matched.contains(c.patient_id.as_str()))
            .count(),
    }
}

/// Identifies cases, matches controls, and returns cases followed by
/// controls.
pub fn build_cohort(
    events: &[EventRecord],
    patients: &[PatientRecord],
    criteria: &CaseCriteria,
    rules: &MatchCriteria,
    seed: u64,
) -> Result<(Vec<CohortLabel>, MatchSummary)> {
    let cases = identify_cases(events, patients, criteria)?;
    let controls = match_controls(&cases, patients, events, criteria, rules, seed)?;
    let summary = summarize(&cases, &controls);
    let mut labels = cases;
    labels.extend(controls);
    Ok((labels, summary))
}

pub fn write_cohort<W: Write>(mut w: W, labels: &[CohortLabel]) -> Result<()> {
    for l in labels {
        serde_json::to_writer(&mut w, l)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_cohort<R: BufRead>(reader: R) -> Result<Vec<CohortLabel>> {
    let mut labels = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let label: CohortLabel = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        match (label.status, &label.matched_case_id) {
            (CohortStatus::Control, None) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "control without matched_case_id".into(),
                })
            }
            (CohortStatus::Case, Some(_)) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "case with matched_case_id".into(),
                })
            }
            _ => {}
        }
        labels.push(label);
    }
    Ok(labels)
}

/// Clinic, sex and age band on `on`: the key a control shares with its case.
pub fn matching_key(
    p: &PatientRecord,
    on: NaiveDate,
    criteria: &CaseCriteria,
    rules: &MatchCriteria,
) -> Option<(String, Sex, u32)> {
    let band = age_in_years(p.birth_date, on).and_then(|a| age_band(a, criteria, rules))?;
    Some((p.clinic_id.clone(), p.sex, band))
}
