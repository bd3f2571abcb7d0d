//! Seven stratified chunks and the six (train, validation, test) rotations
//! over them.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const N_CHUNKS: usize = 7;
pub const N_FOLDS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train_chunks: Vec<usize>,
    pub validation_chunk: usize,
    pub test_chunk: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Folds {
    /// Row indices per chunk, ascending.
    pub chunks: Vec<Vec<usize>>,
    pub folds: Vec<Fold>,
}

impl Folds {
    pub fn train_rows(&self, fold: &Fold) -> Vec<usize> {
        let mut rows: Vec<usize> = fold
            .train_chunks
            .iter()
            .flat_map(|&c| self.chunks[c].iter().copied())
            .collect();
        rows.sort_unstable();
        rows
    }

    pub fn validation_rows(&self, fold: &Fold) -> &[usize] {
        &self.chunks[fold.validation_chunk]
    }

    pub fn test_rows(&self, fold: &Fold) -> &[usize] {
        &self.chunks[fold.test_chunk]
    }
}

/// Shuffles positives and negatives separately and deals them round-robin
/// into seven chunks; negatives continue the deal where positives stopped.
/// Fold `i` validates on chunk `i` and tests on chunk `i + 1`.
pub fn make_folds(labels: &[u8], seed: u64) -> Result<Folds> {
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] != 1).collect();
    if pos.len() < N_CHUNKS || neg.len() < N_CHUNKS {
        return Err(Error::Config(format!(
            "cross validation needs at least {N_CHUNKS} patients per class, got {} positive and {} negative",
            pos.len(),
            neg.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let mut chunks = vec![Vec::new(); N_CHUNKS];
    for (k, &i) in pos.iter().chain(neg.iter()).enumerate() {
        chunks[k % N_CHUNKS].push(i);
    }
    for c in &mut chunks {
        c.sort_unstable();
    }
    let folds = (0..N_FOLDS)
        .map(|i| Fold {
            train_chunks: (0..N_CHUNKS).filter(|&c| c != i && c != i + 1).collect(),
            validation_chunk: i,
            test_chunk: i + 1,
        })
        .collect();
    Ok(Folds { chunks, folds })
}
