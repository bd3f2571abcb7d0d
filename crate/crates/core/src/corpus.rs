//! Timeline flattening and skip-gram context windows.
//!
//! Each patient contributes one sequence: visits in date order, codes inside
//! a visit permuted afresh every epoch. Windows run across visit boundaries
//! but never across patients.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ingest::PatientTimeline;

/// `(center, context)` vocabulary indices taken from two distinct
/// positions of one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrainingPair {
    pub center: usize,
    pub context: usize,
}

impl TrainingPair {
    pub fn new(center: usize, context: usize) -> Self {
        Self { center, context }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    /// Half-window; at least 1.
    pub w: usize,
    pub shuffle_seed: u64,
}

impl WindowConfig {
    pub fn new(w: usize, shuffle_seed: u64) -> Self {
        assert!(w >= 1, "window half-width must be at least 1");
        Self { w, shuffle_seed }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// RNG for one (seed, patient, epoch) triple. Stable across platforms and
/// toolchains, unlike `std`'s hasher.
pub(crate) fn visit_rng(seed: u64, patient_id: &str, epoch: u64) -> ChaCha8Rng {
    let mixed = splitmix64(seed ^ splitmix64(fnv1a(patient_id.as_bytes()) ^ splitmix64(epoch)));
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Concatenates visits in date order, permuting codes within each visit.
pub fn flatten_timeline(timeline: &PatientTimeline, epoch: u64, cfg: &WindowConfig) -> Vec<usize> {
    let mut rng = visit_rng(cfg.shuffle_seed, &timeline.patient_id, epoch);
    let mut seq = Vec::with_capacity(timeline.code_count());
    for visit in &timeline.visits {
        let start = seq.len();
        seq.extend_from_slice(&visit.codes);
        seq[start..].shuffle(&mut rng);
    }
    seq
}

/// Number of pairs `generate_pairs` emits for a sequence of length `len`.
pub fn pair_count(len: usize, w: usize) -> usize {
    (0..len).map(|t| window_range(t, len, w).len() - 1).sum()
}

/// Positions `[t-w, t+w]` clipped to the sequence; includes `t` itself.
#[inline]
pub(crate) fn window_range(t: usize, len: usize, w: usize) -> std::ops::Range<usize> {
    t.saturating_sub(w)..(t + w + 1).min(len)
}

/// Lazily yields pairs ordered by center position, then offset.
#[derive(Debug, Clone)]
pub struct PairIter<'a> {
    seq: &'a [usize],
    w: usize,
    t: usize,
    u: usize,
}

impl Iterator for PairIter<'_> {
    type Item = TrainingPair;

    fn next(&mut self) -> Option<TrainingPair> {
        while self.t < self.seq.len() {
            let range = window_range(self.t, self.seq.len(), self.w);
            if self.u < range.start {
                self.u = range.start;
            }
            while self.u < range.end {
                let u = self.u;
                self.u += 1;
                if u != self.t {
                    return Some(TrainingPair::new(self.seq[self.t], self.seq[u]));
                }
            }
            self.t += 1;
            self.u = 0;
        }
        None
    }
}

pub fn iter_pairs(seq: &[usize], w: usize) -> PairIter<'_> {
    assert!(w >= 1, "window half-width must be at least 1");
    PairIter { seq, w, t: 0, u: 0 }
}

pub fn generate_pairs(seq: &[usize], w: usize) -> Vec<TrainingPair> {
    iter_pairs(seq, w).collect()
}
