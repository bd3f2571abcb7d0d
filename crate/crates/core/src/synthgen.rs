//! Synthetic populations with planted concept clusters and an incident
//! heart-failure process.
//!
//! Every patient carries one to three latent clusters and draws visit codes
//! from them. Carriers of the precursor cluster may become cases: their
//! record gains a burst of precursor-cluster visits in the 18 months before
//! the diagnosis date, followed by three qualifying encounters within a
//! year. Everyone is followed from 2008 to the end of 2013, so controls
//! satisfy the follow-up clauses of the matching rules.

use std::collections::BTreeMap;

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohort::{CohortStatus, HF_QUALIFYING_CODES};
use crate::error::{Error, Result};
use crate::ingest::{ConceptCode, Domain, EventRecord, EventSource, PatientRecord, Sex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainCounts {
    pub diagnosis: usize,
    pub medication: usize,
    pub procedure: usize,
}

impl DomainCounts {
    pub fn total(&self) -> usize {
        self.diagnosis + self.medication + self.procedure
    }
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub min: usize,
    pub max: usize,
}

impl Span {
    pub fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        rng.gen_range(self.min..=self.max)
    }

    fn check(&self, what: &str) -> Result<()> {
        if self.min > self.max {
            return Err(Error::Config(format!("{what}: empty range {}..={}", self.min, self.max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_patients: usize,
    pub n_clusters: usize,
    pub codes_per_cluster: DomainCounts,
    pub visits_per_patient: Span,
    pub codes_per_visit: Span,
    /// Probability that a code is drawn uniformly from all cluster codes.
    pub noise_rate: f64,
    pub hf_precursor_cluster: usize,
    /// Probability that a precursor-cluster carrier becomes a case.
    pub hf_rate: f64,
    pub seed: u64,
    pub n_clinics: usize,
    /// Extra precursor-rich visits placed in the 18 months before a case's
    /// diagnosis date.
    pub precursor_visits: Span,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_patients: 2000,
            n_clusters: 10,
            codes_per_cluster: DomainCounts {
                diagnosis: 10,
                medication: 10,
                procedure: 10,
            },
            visits_per_patient: Span::new(6, 12),
            codes_per_visit: Span::new(2, 5),
            noise_rate: 0.1,
            hf_precursor_cluster: 0,
            hf_rate: 0.4,
            seed: 0,
            n_clinics: 3,
            precursor_visits: Span::new(3, 6),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n_patients == 0 || self.n_clusters == 0 || self.n_clinics == 0 {
            return bad("patients, clusters and clinics must be positive");
        }
        if self.codes_per_cluster.diagnosis == 0 {
            return bad("every cluster needs at least one diagnosis code");
        }
        self.visits_per_patient.check("visits_per_patient")?;
        self.codes_per_visit.check("codes_per_visit")?;
        self.precursor_visits.check("precursor_visits")?;
        if self.visits_per_patient.min == 0 || self.codes_per_visit.min == 0 {
            return bad("visits and codes per visit must be at least 1");
        }
        if self.codes_per_visit.max > self.codes_per_cluster.total() {
            return Err(Error::Config(format!(
                "codes_per_visit up to {} exceeds the {} codes of a cluster",
                self.codes_per_visit.max,
                self.codes_per_cluster.total()
            )));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return bad("noise_rate must be in [0,1]");
        }
        if !(self.hf_rate > 0.0 && self.hf_rate < 1.0) {
            return bad("hf_rate must be in (0,1)");
        }
        if self.hf_precursor_cluster >= self.n_clusters {
            return bad("hf_precursor_cluster out of range");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// `"<domain>:<code>"` to cluster index; qualifying HF codes are absent.
    pub code_clusters: BTreeMap<String, usize>,
    pub patient_clusters: BTreeMap<String, Vec<usize>>,
    pub intended_status: BTreeMap<String, CohortStatus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub patients: Vec<PatientRecord>,
    /// Ordered by patient, then date.
    pub events: Vec<EventRecord>,
    pub truth: GroundTruth,
}

fn source_for(domain: Domain) -> EventSource {
    match domain {
        Domain::Diagnosis => EventSource::Encounter,
        Domain::Medication => EventSource::MedicationOrder,
        Domain::Procedure => EventSource::ProcedureOrder,
    }
}

fn code_name(domain: Domain, cluster: usize, j: usize) -> String {
    match domain {
        Domain::Diagnosis => format!("S{cluster:02}.{j:02}"),
        Domain::Medication => format!("RX{cluster:02}-{j:03}"),
        Domain::Procedure => format!("PX{cluster:02}{j:03}"),
    }
}

struct Clusters {
    /// Per cluster: all codes, diagnosis codes first.
    codes: Vec<Vec<ConceptCode>>,
    n_diagnosis: usize,
    all: Vec<ConceptCode>,
    all_diagnosis: Vec<ConceptCode>,
}

impl Clusters {
    fn new(cfg: &SynthConfig) -> Self {
        let counts = cfg.codes_per_cluster;
        let codes: Vec<Vec<ConceptCode>> = (0..cfg.n_clusters)
            .map(|k| {
                let mut v = Vec::with_capacity(counts.total());
                for (domain, n) in [
                    (Domain::Diagnosis, counts.diagnosis),
                    (Domain::Medication, counts.medication),
                    (Domain::Procedure, counts.procedure),
                ] {
                    v.extend((0..n).map(|j| ConceptCode::new(domain, code_name(domain, k, j))));
                }
                v
            })
            .collect();
        let all = codes.iter().flatten().cloned().collect();
        let all_diagnosis = codes
            .iter()
            .flat_map(|c| c[..counts.diagnosis].iter().cloned())
            .collect();
        Self {
            codes,
            n_diagnosis: counts.diagnosis,
            all,
            all_diagnosis,
        }
    }

    /// One code from `clusters` (or uniform noise). `diagnosis_only` keeps
    /// the draw to diagnosis codes so the visit records an encounter.
    fn draw(&self, rng: &mut ChaCha8Rng, clusters: &[usize], noise: f64, diagnosis_only: bool) -> ConceptCode {
        if rng.gen::<f64>() < noise {
            let pool = if diagnosis_only { &self.all_diagnosis } else { &self.all };
            return pool.choose(rng).expect("non-empty pool").clone();
        }
        let k = *clusters.choose(rng).expect("patient has clusters");
        let pool = if diagnosis_only {
            &self.codes[k][..self.n_diagnosis]
        } else {
            &self.codes[k][..]
        };
        pool.choose(rng).expect("non-empty cluster").clone()
    }
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

/// A birth date making the patient exactly `age` completed years old on `on`.
fn birth_date_for(age: u32, on: NaiveDate, rng: &mut ChaCha8Rng) -> NaiveDate {
    let year = on.year() - age as i32;
    let anniversary = on
        .with_year(year)
        .unwrap_or_else(|| date(year, on.month(), 28));
    anniversary - Duration::days(rng.gen_range(1..=360))
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let clusters = Clusters::new(cfg);

    let mut truth = GroundTruth {
        code_clusters: BTreeMap::new(),
        patient_clusters: BTreeMap::new(),
        intended_status: BTreeMap::new(),
    };
    for (k, codes) in clusters.codes.iter().enumerate() {
        for c in codes {
            truth.code_clusters.insert(c.to_string(), k);
        }
    }

    let follow_start = date(2008, 1, 1);
    let follow_end = date(2013, 12, 31);
    let control_reference = date(2011, 6, 1);
    let latest_hfdx = date(2012, 12, 31);
    let width = (cfg.n_patients.max(1) as f64).log10().floor() as usize + 1;

    let mut patients = Vec::with_capacity(cfg.n_patients);
    let mut events = Vec::new();
    for p in 0..cfg.n_patients {
        let patient_id = format!("P{p:0width$}");
        let n_own = rng.gen_range(1..=3.min(cfg.n_clusters));
        let mut own: Vec<usize> = rand::seq::index::sample(&mut rng, cfg.n_clusters, n_own).into_vec();
        own.sort_unstable();
        let is_case = own.contains(&cfg.hf_precursor_cluster) && rng.gen::<f64>() < cfg.hf_rate;

        let sex = if rng.gen::<bool>() { Sex::F } else { Sex::M };
        let clinic_id = format!("clinic{}", rng.gen_range(0..cfg.n_clinics));
        let first = follow_start + Duration::days(rng.gen_range(0..365));
        let last = follow_end - Duration::days(rng.gen_range(0..60));

        let n_visits = cfg.visits_per_patient.sample(&mut rng);
        let span = (last - first).num_days();
        let mut visit_days: Vec<NaiveDate> = Vec::with_capacity(n_visits);
        visit_days.push(first);
        if n_visits > 1 {
            visit_days.push(last);
        }
        for _ in 2..n_visits {
            visit_days.push(first + Duration::days(rng.gen_range(1..span)));
        }

        let mut visits: Vec<(NaiveDate, Vec<ConceptCode>)> = visit_days
            .iter()
            .map(|&d| {
                let n_codes = cfg.codes_per_visit.sample(&mut rng);
                let codes = (0..n_codes)
                    .map(|j| clusters.draw(&mut rng, &own, cfg.noise_rate, j == 0))
                    .collect();
                (d, codes)
            })
            .collect();

        let birth_date;
        if is_case {
            let earliest = first + Duration::days(600);
            let hfdx = earliest + Duration::days(rng.gen_range(0..=(latest_hfdx - earliest).num_days()));
            let precursor = [cfg.hf_precursor_cluster];
            for _ in 0..cfg.precursor_visits.sample(&mut rng) {
                let d = hfdx - Duration::days(rng.gen_range(1..=540));
                let n_codes = cfg.codes_per_visit.sample(&mut rng);
                let codes = (0..n_codes)
                    .map(|j| clusters.draw(&mut rng, &precursor, cfg.noise_rate, j == 0))
                    .collect();
                visits.push((d, codes));
            }
            let offsets = [0, rng.gen_range(20..=120), rng.gen_range(150..=330)];
            for off in offsets {
                let code = ConceptCode::diagnosis(*HF_QUALIFYING_CODES.choose(&mut rng).expect("codes"));
                visits.push((hfdx + Duration::days(off), vec![code]));
            }
            birth_date = birth_date_for(rng.gen_range(50..=84), hfdx, &mut rng);
        } else {
            birth_date = birth_date_for(rng.gen_range(50..=84), control_reference, &mut rng);
        }

        visits.sort_by_key(|(d, _)| *d);
        for (d, codes) in visits {
            for concept in codes {
                events.push(EventRecord {
                    patient_id: patient_id.clone(),
                    date: d,
                    source: source_for(concept.domain),
                    concept,
                });
            }
        }

        truth.patient_clusters.insert(patient_id.clone(), own);
        truth.intended_status.insert(
            patient_id.clone(),
            if is_case {
                CohortStatus::Case
            } else {
                CohortStatus::Control
            },
        );
        patients.push(PatientRecord {
            patient_id,
            sex,
            birth_date,
            clinic_id,
        });
    }
    Ok(SynthOutput {
        patients,
        events,
        truth,
    })
}
