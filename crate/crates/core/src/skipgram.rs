//! Skip-gram with a single, tied vector per concept and an exact softmax
//! over the whole vocabulary.
//!
//! For center `i` and context `o` the model is
//!
//! ```text
//! p(o | i) = exp(v(o)·v(i)) / Σ_c exp(v(c)·v(i))
//! ```
//!
//! and training maximizes the average of `log p(o | i)` over all window
//! pairs. Because the center and context roles share `v`, the gradient of one
//! pair touches every row: row `c` receives `([c = o] − p_c)·v(i)` and the
//! center row additionally receives `v(o) − Σ_c p_c·v(c)`.
//!
//! All arithmetic is `f64`. Gradients are log-likelihood gradients and the
//! optimizer ascends them.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{self, TrainingPair, WindowConfig};
use crate::error::{Error, Result};
use crate::ingest::PatientTimeline;
use crate::optim::{Adadelta, AdadeltaConfig};

/// Row-major `n × d` matrix of concept vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(n: usize, d: usize) -> Self {
        assert!(n >= 1 && d >= 1, "embedding shape must be at least 1x1");
        Self {
            n,
            d,
            values: vec![0.0; n * d],
        }
    }

    pub fn from_values(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 || values.len() != n * d {
            return Err(Error::Shape(format!(
                "{} values for a {n}x{d} embedding",
                values.len()
            )));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("ragged embedding rows".into()));
        }
        Self::from_values(n, d, rows.concat())
    }

    /// Entries uniform in `[-0.5/d, 0.5/d)`.
    pub fn random_uniform(n: usize, d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = 0.5 / d as f64;
        let mut m = Self::zeros(n, d);
        for x in &mut m.values {
            *x = rng.gen_range(-half..half);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.d)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    fn check(&self, indices: &[usize]) -> Result<()> {
        for &i in indices {
            if i >= self.n {
                return Err(Error::IndexOutOfRange { index: i, len: self.n });
            }
        }
        if !self.is_finite() {
            return Err(Error::NonFinite("embedding"));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let j = 4 * k;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for j in 4 * chunks..a.len() {
        s += a[j] * b[j];
    }
    s
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Fills `probs` with the softmax of the logits of `center` and returns the
/// log-sum-exp of those logits.
fn softmax_into(emb: &EmbeddingMatrix, center: usize, logits: &mut [f64], probs: &mut [f64]) -> f64 {
    let vi = emb.row(center);
    let mut max = f64::NEG_INFINITY;
    for (c, z) in logits.iter_mut().enumerate() {
        *z = dot(emb.row(c), vi);
        max = max.max(*z);
    }
    let mut sum = 0.0;
    for (p, z) in probs.iter_mut().zip(logits.iter()) {
        *p = (z - max).exp();
        sum += *p;
    }
    for p in probs.iter_mut() {
        *p /= sum;
    }
    max + sum.ln()
}

/// `p(c | center)` for every concept `c`.
pub fn softmax_probs(emb: &EmbeddingMatrix, center: usize) -> Result<Vec<f64>> {
    emb.check(&[center])?;
    let mut logits = vec![0.0; emb.n];
    let mut probs = vec![0.0; emb.n];
    softmax_into(emb, center, &mut logits, &mut probs);
    Ok(probs)
}

/// `log p(context | center)`, computed as logit minus log-sum-exp.
pub fn pair_log_prob(emb: &EmbeddingMatrix, pair: TrainingPair) -> Result<f64> {
    emb.check(&[pair.center, pair.context])?;
    let vi = emb.row(pair.center);
    let mut max = f64::NEG_INFINITY;
    let logits: Vec<f64> = emb
        .rows()
        .map(|vc| {
            let z = dot(vc, vi);
            max = max.max(z);
            z
        })
        .collect();
    let sum: f64 = logits.iter().map(|z| (z - max).exp()).sum();
    Ok((logits[pair.context] - (max + sum.ln())).min(0.0))
}

/// `(1/positions) Σ_pairs log p(context | center)`.
pub fn corpus_objective(emb: &EmbeddingMatrix, pairs: &[TrainingPair], positions: usize) -> Result<f64> {
    if positions == 0 {
        return Err(Error::Config("objective normalizer must be positive".into()));
    }
    let mut total = 0.0;
    for &p in pairs {
        total += pair_log_prob(emb, p)?;
    }
    Ok(total / positions as f64)
}

/// Gradient of one pair's log-probability in factored form: row `c` of the
/// full gradient is `row_coeffs[c]·v(center)`, plus `center_term` on the
/// center row.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub center: usize,
    pub row_coeffs: Vec<f64>,
    pub center_term: Vec<f64>,
}

impl PairGradient {
    /// Expands to a dense row-major `n × d` buffer.
    pub fn to_dense(&self, emb: &EmbeddingMatrix) -> Vec<f64> {
        let mut out = vec![0.0; emb.n * emb.d];
        self.add_to(emb, &mut out);
        out
    }

    pub fn add_to(&self, emb: &EmbeddingMatrix, out: &mut [f64]) {
        let d = emb.d;
        let vi = emb.row(self.center);
        for (c, &coef) in self.row_coeffs.iter().enumerate() {
            axpy(coef, vi, &mut out[c * d..(c + 1) * d]);
        }
        axpy(1.0, &self.center_term, &mut out[self.center * d..(self.center + 1) * d]);
    }
}

pub fn pair_gradient(emb: &EmbeddingMatrix, pair: TrainingPair) -> Result<PairGradient> {
    let probs = softmax_probs(emb, pair.center)?;
    let (i, o) = (pair.center, pair.context);
    let mut center_term = emb.row(o).to_vec();
    for (c, &p) in probs.iter().enumerate() {
        axpy(-p, emb.row(c), &mut center_term);
    }
    let row_coeffs = probs
        .iter()
        .enumerate()
        .map(|(c, &p)| if c == o { 1.0 - p } else { -p })
        .collect();
    Ok(PairGradient {
        center: i,
        row_coeffs,
        center_term,
    })
}

/// Scratch space for summed batch gradients.
#[derive(Debug, Clone)]
pub struct BatchWorkspace {
    grad: Vec<f64>,
    logits: Vec<f64>,
    probs: Vec<f64>,
    coeffs: Vec<f64>,
    center_acc: Vec<f64>,
}

impl BatchWorkspace {
    pub fn new(n: usize, d: usize) -> Self {
        Self {
            grad: vec![0.0; n * d],
            logits: vec![0.0; n],
            probs: vec![0.0; n],
            coeffs: vec![0.0; n],
            center_acc: vec![0.0; d],
        }
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }
}

/// Sums pair gradients over `pairs` into the workspace and returns the
/// summed log-likelihood. Consecutive pairs sharing a center index share one
/// softmax evaluation; the result equals the pairwise sum.
pub fn batch_gradient(emb: &EmbeddingMatrix, pairs: &[TrainingPair], ws: &mut BatchWorkspace) -> f64 {
    let d = emb.d;
    ws.grad.iter_mut().for_each(|g| *g = 0.0);
    let mut loglik = 0.0;
    let mut start = 0;
    while start < pairs.len() {
        let i = pairs[start].center;
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].center == i {
            end += 1;
        }
        let run = &pairs[start..end];
        let k = run.len() as f64;
        let lse = softmax_into(emb, i, &mut ws.logits, &mut ws.probs);

        for (coef, p) in ws.coeffs.iter_mut().zip(&ws.probs) {
            *coef = -k * p;
        }
        ws.center_acc.iter_mut().for_each(|x| *x = 0.0);
        for pair in run {
            loglik += ws.logits[pair.context] - lse;
            ws.coeffs[pair.context] += 1.0;
            axpy(1.0, emb.row(pair.context), &mut ws.center_acc);
        }
        let vi = emb.row(i);
        for c in 0..emb.n {
            let vc = emb.row(c);
            axpy(ws.coeffs[c], vi, &mut ws.grad[c * d..(c + 1) * d]);
            axpy(-k * ws.probs[c], vc, &mut ws.center_acc);
        }
        axpy(1.0, &ws.center_acc, &mut ws.grad[i * d..(i + 1) * d]);
        start = end;
    }
    loglik
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub d: usize,
    pub w: usize,
    pub epochs: usize,
    /// Training pairs per optimizer step.
    pub batch_size: usize,
    pub seed: u64,
    pub adadelta: AdadeltaConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            d: 100,
            w: 5,
            epochs: 10,
            batch_size: 100,
            seed: 0,
            adadelta: AdadeltaConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.w == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "dimension, window and batch size must be positive".into(),
            ));
        }
        self.adadelta.validate()
    }

    pub fn window(&self) -> WindowConfig {
        WindowConfig::new(self.w, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean pair log-likelihood after the epoch's updates, over the corpus
    /// flattened with the epoch-0 visit order.
    pub mean_ll: f64,
    pub pairs: usize,
}

impl EpochStats {
    /// The machine-readable progress line, `epoch=<k> mean_ll=<float>`.
    pub fn log_line(&self) -> String {
        format!("epoch={} mean_ll={:.9}", self.epoch, self.mean_ll)
    }
}

/// Trains concept vectors for a vocabulary of `n` concepts.
pub fn train(timelines: &[PatientTimeline], n: usize, cfg: &TrainConfig) -> Result<EmbeddingMatrix> {
    train_with_progress(timelines, n, cfg, |_| {})
}

/// Like [`train`], reporting statistics after each epoch.
pub fn train_with_progress<F>(
    timelines: &[PatientTimeline],
    n: usize,
    cfg: &TrainConfig,
    mut on_epoch: F,
) -> Result<EmbeddingMatrix>
where
    F: FnMut(&EpochStats),
{
    cfg.validate()?;
    if timelines.is_empty() {
        return Err(Error::EmptyInput("timelines"));
    }
    if n == 0 {
        return Err(Error::EmptyInput("vocabulary"));
    }
    for t in timelines {
        for v in &t.visits {
            if let Some(&bad) = v.codes.iter().find(|&&c| c >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
        }
    }

    let mut emb = EmbeddingMatrix::random_uniform(n, cfg.d, cfg.seed);
    let mut opt = Adadelta::new(n * cfg.d, cfg.d, cfg.adadelta)?;
    let mut ws = BatchWorkspace::new(n, cfg.d);
    let window = cfg.window();
    let mut batch = Vec::with_capacity(cfg.batch_size);

    for epoch in 0..cfg.epochs {
        let mut total_pairs = 0usize;
        for t in timelines {
            let seq = corpus::flatten_timeline(t, epoch as u64, &window);
            for pair in corpus::iter_pairs(&seq, cfg.w) {
                batch.push(pair);
                if batch.len() == cfg.batch_size {
                    batch_gradient(&emb, &batch, &mut ws);
                    total_pairs += batch.len();
                    opt.ascend(emb.values_mut(), ws.gradient())?;
                    batch.clear();
                }
            }
        }
        if !batch.is_empty() {
            batch_gradient(&emb, &batch, &mut ws);
            total_pairs += batch.len();
            opt.ascend(emb.values_mut(), ws.gradient())?;
            batch.clear();
        }
        if !emb.is_finite() {
            return Err(Error::NonFinite("embedding after update"));
        }
        on_epoch(&EpochStats {
            epoch,
            mean_ll: mean_pair_log_likelihood(&emb, timelines, &window, 0),
            pairs: total_pairs,
        });
    }
    Ok(emb)
}

/// Writes one progress line per epoch to `sink`.
pub fn train_logged<W: Write>(
    timelines: &[PatientTimeline],
    n: usize,
    cfg: &TrainConfig,
    sink: &mut W,
) -> Result<EmbeddingMatrix> {
    let mut io_err = None;
    let emb = train_with_progress(timelines, n, cfg, |s| {
        if io_err.is_none() {
            if let Err(e) = writeln!(sink, "{}", s.log_line()) {
                io_err = Some(e);
            }
        }
    })?;
    match io_err {
        Some(e) => Err(e.into()),
        None => Ok(emb),
    }
}

/// Mean pair log-likelihood of the corpus as flattened for `epoch`, under
/// fixed parameters. One softmax per sequence position.
pub fn mean_pair_log_likelihood(
    emb: &EmbeddingMatrix,
    timelines: &[PatientTimeline],
    window: &WindowConfig,
    epoch: u64,
) -> f64 {
    let mut logits = vec![0.0; emb.n];
    let mut probs = vec![0.0; emb.n];
    let mut total = 0.0;
    let mut count = 0usize;
    for t in timelines {
        let seq = corpus::flatten_timeline(t, epoch, window);
        for (pos, &center) in seq.iter().enumerate() {
            let range = corpus::window_range(pos, seq.len(), window.w);
            if range.len() < 2 {
                continue;
            }
            let lse = softmax_into(emb, center, &mut logits, &mut probs);
            for u in range.filter(|&u| u != pos) {
                total += logits[seq[u]] - lse;
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}
