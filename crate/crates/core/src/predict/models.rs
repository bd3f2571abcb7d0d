//! Logistic regression, linear SVM (squared hinge, primal), a one-hidden-
//! layer MLP and KNN.
//!
//! The three gradient-trained models minimize their mean loss plus
//! `(l2/2)·‖weights‖²` (biases unpenalized) with full-batch Adadelta, one
//! step per epoch. When a validation set is supplied the parameters from the
//! epoch with the best validation AUC are kept.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::auc::auc;
use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::optim::{Adadelta, AdadeltaConfig};
use crate::skipgram::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    LogisticRegression,
    LinearSvm,
    Mlp,
    Knn,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::LogisticRegression,
        ClassifierKind::LinearSvm,
        ClassifierKind::Mlp,
        ClassifierKind::Knn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::LogisticRegression => "logistic_regression",
            ClassifierKind::LinearSvm => "linear_svm",
            ClassifierKind::Mlp => "mlp",
            ClassifierKind::Knn => "knn",
        }
    }

    pub fn is_gradient_trained(self) -> bool {
        self != ClassifierKind::Knn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub l2: f64,
    pub hidden_size: usize,
    pub k_neighbors: usize,
    pub max_epoch: usize,
}

impl ClassifierSpec {
    pub fn logistic_regression(l2: f64, max_epoch: usize) -> Self {
        Self {
            kind: ClassifierKind::LogisticRegression,
            l2,
            hidden_size: 0,
            k_neighbors: 0,
            max_epoch,
        }
    }

    pub fn linear_svm(l2: f64, max_epoch: usize) -> Self {
        Self {
            kind: ClassifierKind::LinearSvm,
            ..Self::logistic_regression(l2, max_epoch)
        }
    }

    pub fn mlp(l2: f64, hidden_size: usize, max_epoch: usize) -> Self {
        Self {
            kind: ClassifierKind::Mlp,
            hidden_size,
            ..Self::logistic_regression(l2, max_epoch)
        }
    }

    pub fn knn(k_neighbors: usize) -> Self {
        Self {
            kind: ClassifierKind::Knn,
            l2: 0.0,
            hidden_size: 0,
            k_neighbors,
            max_epoch: 0,
        }
    }

    /// The tuned hyper-parameters for each model and input representation.
    pub fn tuned(kind: ClassifierKind, features: FeatureKind) -> Self {
        let one_hot = features == FeatureKind::OneHotCounts;
        match kind {
            ClassifierKind::LogisticRegression => {
                Self::logistic_regression(if one_hot { 0.1 } else { 0.01 }, 100)
            }
            ClassifierKind::LinearSvm => Self::linear_svm(if one_hot { 1e-6 } else { 1e-3 }, 100),
            ClassifierKind::Mlp => {
                if one_hot {
                    Self::mlp(0.01, 15, 100)
                } else {
                    Self::mlp(0.001, 100, 100)
                }
            }
            ClassifierKind::Knn => Self::knn(if one_hot { 15 } else { 100 }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::Config(format!("l2 must be non-negative, got {}", self.l2)));
        }
        match self.kind {
            ClassifierKind::Knn if self.k_neighbors == 0 => {
                Err(Error::Config("knn needs k_neighbors >= 1".into()))
            }
            ClassifierKind::Mlp if self.hidden_size == 0 => {
                Err(Error::Config("mlp needs hidden_size >= 1".into()))
            }
            k if k.is_gradient_trained() && self.max_epoch == 0 => {
                Err(Error::Config("max_epoch must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Borrowed row-major rows with their labels.
#[derive(Debug, Clone, Copy)]
pub struct Dataset<'a> {
    pub x: &'a [f64],
    pub y: &'a [u8],
    pub f: usize,
}

impl<'a> Dataset<'a> {
    pub fn new(x: &'a [f64], y: &'a [u8], f: usize) -> Result<Self> {
        if f == 0 || x.len() != y.len() * f {
            return Err(Error::Shape(format!(
                "{} values for {} rows of width {f}",
                x.len(),
                y.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training rows"));
        }
        if y.iter().any(|&v| v > 1) {
            return Err(Error::Config("labels must be 0 or 1".into()));
        }
        Ok(Self { x, y, f })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.x[i * self.f..(i + 1) * self.f]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'a, f64> {
        self.x.chunks_exact(self.f)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Cross-entropy of label `y` against `sigmoid(z)`.
fn logistic_loss(z: f64, y: u8) -> f64 {
    softplus(z) - f64::from(y) * z
}

fn l2_penalty(weights: &[f64], l2: f64, grad: &mut [f64]) -> f64 {
    for (g, w) in grad.iter_mut().zip(weights) {
        *g += l2 * w;
    }
    0.5 * l2 * dot(weights, weights)
}

/// Mean cross-entropy plus penalty for parameters `[w; b]`; writes the
/// gradient into `grad`.
pub fn logreg_loss_grad(params: &[f64], data: &Dataset<'_>, l2: f64, grad: &mut [f64]) -> f64 {
    let f = data.f;
    let (w, b) = (&params[..f], params[f]);
    grad.iter_mut().for_each(|g| *g = 0.0);
    let inv = 1.0 / data.len() as f64;
    let mut loss = 0.0;
    for (x, &y) in data.rows().zip(data.y) {
        let z = dot(w, x) + b;
        loss += logistic_loss(z, y);
        let r = (sigmoid(z) - f64::from(y)) * inv;
        for (g, xi) in grad[..f].iter_mut().zip(x) {
            *g += r * xi;
        }
        grad[f] += r;
    }
    loss * inv + l2_penalty(w, l2, &mut grad[..f])
}

/// Mean squared hinge loss plus penalty for parameters `[w; b]`, labels
/// mapped to ±1.
pub fn svm_loss_grad(params: &[f64], data: &Dataset<'_>, l2: f64, grad: &mut [f64]) -> f64 {
    let f = data.f;
    let (w, b) = (&params[..f], params[f]);
    grad.iter_mut().for_each(|g| *g = 0.0);
    let inv = 1.0 / data.len() as f64;
    let mut loss = 0.0;
    for (x, &y) in data.rows().zip(data.y) {
        let s = if y == 1 { 1.0 } else { -1.0 };
        let margin = 1.0 - s * (dot(w, x) + b);
        if margin > 0.0 {
            loss += margin * margin;
            let r = -2.0 * margin * s * inv;
            for (g, xi) in grad[..f].iter_mut().zip(x) {
                *g += r * xi;
            }
            grad[f] += r;
        }
    }
    loss * inv + l2_penalty(w, l2, &mut grad[..f])
}

/// Offsets of the MLP blocks in the flat parameter vector:
/// `[W1 (hidden × f), b1 (hidden), w2 (hidden), b2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlpLayout {
    pub f: usize,
    pub hidden: usize,
}

impl MlpLayout {
    pub fn len(&self) -> usize {
        self.hidden * self.f + 2 * self.hidden + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn b1(&self) -> usize {
        self.hidden * self.f
    }

    fn w2(&self) -> usize {
        self.b1() + self.hidden
    }

    fn b2(&self) -> usize {
        self.w2() + self.hidden
    }

    fn forward(&self, params: &[f64], x: &[f64], hidden: &mut [f64]) -> f64 {
        let f = self.f;
        for (k, h) in hidden.iter_mut().enumerate() {
            *h = (dot(&params[k * f..(k + 1) * f], x) + params[self.b1() + k]).tanh();
        }
        dot(&params[self.w2()..self.b2()], hidden) + params[self.b2()]
    }
}

/// Mean cross-entropy of the tanh/sigmoid network plus penalty on `W1` and
/// `w2`.
pub fn mlp_loss_grad(params: &[f64], data: &Dataset<'_>, layout: MlpLayout, l2: f64, grad: &mut [f64]) -> f64 {
    let (f, hn) = (layout.f, layout.hidden);
    let (b1, w2, b2) = (layout.b1(), layout.w2(), layout.b2());
    grad.iter_mut().for_each(|g| *g = 0.0);
    let inv = 1.0 / data.len() as f64;
    let mut h = vec![0.0; hn];
    let mut loss = 0.0;
    for (x, &y) in data.rows().zip(data.y) {
        let z = layout.forward(params, x, &mut h);
        loss += logistic_loss(z, y);
        let dz = (sigmoid(z) - f64::from(y)) * inv;
        grad[b2] += dz;
        for k in 0..hn {
            grad[w2 + k] += dz * h[k];
            let da = dz * params[w2 + k] * (1.0 - h[k] * h[k]);
            grad[b1 + k] += da;
            for (g, xi) in grad[k * f..(k + 1) * f].iter_mut().zip(x) {
                *g += da * xi;
            }
        }
    }
    let mut penalty = l2_penalty(&params[..b1], l2, &mut grad[..b1]);
    penalty += l2_penalty(&params[w2..b2], l2, &mut grad[w2..b2]);
    loss * inv + penalty
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Logistic output for probabilities; raw decision value otherwise.
    pub logistic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layout: MlpLayout,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub x: Vec<f64>,
    pub y: Vec<u8>,
    pub f: usize,
    pub k: usize,
}

impl KnnModel {
    pub fn new(data: &Dataset<'_>, k: usize) -> Result<Self> {
        if k == 0 || k > data.len() {
            return Err(Error::Config(format!(
                "k = {k} neighbors with {} training rows",
                data.len()
            )));
        }
        Ok(Self {
            x: data.x.to_vec(),
            y: data.y.to_vec(),
            f: data.f,
            k,
        })
    }
}

/// Fraction of positives among the `k` nearest training rows (Euclidean,
/// distance ties to the lower row index).
pub fn knn_score(train: &Dataset<'_>, query: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > train.len() {
        return Err(Error::Config(format!(
            "k = {k} neighbors with {} training rows",
            train.len()
        )));
    }
    if query.len() != train.f {
        return Err(Error::Shape(format!("query of width {} for {}", query.len(), train.f)));
    }
    let mut dist: Vec<(f64, usize)> = train
        .rows()
        .enumerate()
        .map(|(i, r)| {
            let d2: f64 = r.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, i)
        })
        .collect();
    let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, by_distance);
    }
    let positives = dist[..k].iter().filter(|(_, i)| train.y[*i] == 1).count();
    Ok(positives as f64 / k as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Linear(LinearModel),
    Mlp(MlpModel),
    Knn(KnnModel),
}

impl Model {
    /// Ranking score: probability for LR/MLP, decision value for SVM,
    /// positive-neighbor fraction for KNN.
    pub fn score(&self, x: &[f64]) -> f64 {
        match self {
            Model::Linear(m) => {
                let z = dot(&m.weights, x) + m.bias;
                if m.logistic {
                    sigmoid(z)
                } else {
                    z
                }
            }
            Model::Mlp(m) => {
                let mut h = vec![0.0; m.layout.hidden];
                sigmoid(m.layout.forward(&m.params, x, &mut h))
            }
            Model::Knn(m) => {
                let train = Dataset {
                    x: &m.x,
                    y: &m.y,
                    f: m.f,
                };
                knn_score(&train, x, m.k).expect("k validated at construction")
            }
        }
    }

    pub fn score_rows(&self, x: &[f64], f: usize) -> Vec<f64> {
        x.chunks_exact(f).map(|r| self.score(r)).collect()
    }
}

/// Per-epoch record of a gradient-trained fit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitTrace {
    /// Training objective evaluated before each epoch's step.
    pub losses: Vec<f64>,
    pub validation_auc: Vec<f64>,
    /// 1-based epoch whose parameters were kept.
    pub selected_epoch: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub model: Model,
    pub trace: FitTrace,
}

fn fit_full_batch<L, M>(
    mut params: Vec<f64>,
    max_epoch: usize,
    validation: Option<&Dataset<'_>>,
    mut loss_grad: L,
    to_model: M,
) -> Result<Trained>
where
    L: FnMut(&[f64], &mut [f64]) -> f64,
    M: Fn(&[f64]) -> Model,
{
    let mut opt = Adadelta::new(params.len(), 1, AdadeltaConfig::default())?;
    let mut grad = vec![0.0; params.len()];
    let mut trace = FitTrace::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for epoch in 1..=max_epoch {
        let loss = loss_grad(&params, &mut grad);
        if !loss.is_finite() {
            return Err(Error::NonFinite("training loss"));
        }
        trace.losses.push(loss);
        opt.descend(&mut params, &grad)?;
        if let Some(val) = validation {
            let scores = to_model(&params).score_rows(val.x, val.f);
            let a = auc(&scores, val.y)?;
            trace.validation_auc.push(a);
            if best.as_ref().map_or(true, |(b, _)| a > *b) {
                best = Some((a, params.clone()));
                trace.selected_epoch = epoch;
            }
        }
    }
    let params = match best {
        Some((_, p)) => p,
        None => {
            trace.selected_epoch = max_epoch;
            params
        }
    };
    Ok(Trained {
        model: to_model(&params),
        trace,
    })
}

fn check_validation(data: &Dataset<'_>, validation: Option<&Dataset<'_>>) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyInput("training rows"));
    }
    match validation {
        Some(v) if v.f != data.f => Err(Error::Shape("validation width differs".into())),
        _ => Ok(()),
    }
}

fn linear_model(params: &[f64], f: usize, logistic: bool) -> Model {
    Model::Linear(LinearModel {
        weights: params[..f].to_vec(),
        bias: params[f],
        logistic,
    })
}

pub fn train_logreg(data: &Dataset<'_>, spec: &ClassifierSpec, validation: Option<&Dataset<'_>>) -> Result<Trained> {
    spec.validate()?;
    check_validation(data, validation)?;
    let f = data.f;
    fit_full_batch(
        vec![0.0; f + 1],
        spec.max_epoch,
        validation,
        |p, g| logreg_loss_grad(p, data, spec.l2, g),
        |p| linear_model(p, f, true),
    )
}

pub fn train_svm(data: &Dataset<'_>, spec: &ClassifierSpec, validation: Option<&Dataset<'_>>) -> Result<Trained> {
    spec.validate()?;
    check_validation(data, validation)?;
    let f = data.f;
    fit_full_batch(
        vec![0.0; f + 1],
        spec.max_epoch,
        validation,
        |p, g| svm_loss_grad(p, data, spec.l2, g),
        |p| linear_model(p, f, false),
    )
}

/// Weights and biases start uniform in `[-0.05, 0.05]`.
pub fn train_mlp(
    data: &Dataset<'_>,
    spec: &ClassifierSpec,
    validation: Option<&Dataset<'_>>,
    seed: u64,
) -> Result<Trained> {
    spec.validate()?;
    check_validation(data, validation)?;
    let layout = MlpLayout {
        f: data.f,
        hidden: spec.hidden_size,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = (0..layout.len()).map(|_| rng.gen_range(-0.05..=0.05)).collect();
    fit_full_batch(
        init,
        spec.max_epoch,
        validation,
        |p, g| mlp_loss_grad(p, data, layout, spec.l2, g),
        |p| {
            Model::Mlp(MlpModel {
                layout,
                params: p.to_vec(),
            })
        },
    )
}

/// Trains any kind; KNN just stores the rows.
pub fn train(
    data: &Dataset<'_>,
    spec: &ClassifierSpec,
    validation: Option<&Dataset<'_>>,
    seed: u64,
) -> Result<Trained> {
    match spec.kind {
        ClassifierKind::LogisticRegression => train_logreg(data, spec, validation),
        ClassifierKind::LinearSvm => train_svm(data, spec, validation),
        ClassifierKind::Mlp => train_mlp(data, spec, validation, seed),
        ClassifierKind::Knn => {
            spec.validate()?;
            Ok(Trained {
                model: Model::Knn(KnnModel::new(data, spec.k_neighbors)?),
                trace: FitTrace::default(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> (Vec<f64>, Vec<u8>) {
        let x = vec![
            2.0, 1.0, 1.5, 2.0, 3.0, 0.5, 1.0, 1.0, //
            -2.0, -1.0, -1.0, -2.5, -3.0, 0.0, -0.5, -1.5,
        ];
        let y = vec![1, 1, 1, 1, 0, 0, 0, 0];
        (x, y)
    }

    fn accuracy(model: &Model, data: &Dataset<'_>, threshold: f64) -> f64 {
        let hits = data
            .rows()
            .zip(data.y)
            .filter(|(x, &y)| (model.score(x) > threshold) == (y == 1))
            .count();
        hits as f64 / data.len() as f64
    }

    #[test]
    fn logreg_separates_toy_data() {
        let (x, y) = separable();
        let data = Dataset::new(&x, &y, 2).unwrap();
        let t = train_logreg(&data, &ClassifierSpec::logistic_regression(0.0, 200), None).unwrap();
        assert_eq!(accuracy(&t.model, &data, 0.5), 1.0);
        let scores = t.model.score_rows(&x, 2);
        assert_eq!(auc(&scores, &y).unwrap(), 1.0);
        assert!(scores.iter().all(|s| (0.0..=1.0).contains(s)));
    }

    #[test]
    fn heavy_l2_shrinks_weights() {
        let (x, y) = separable();
        let data = Dataset::new(&x, &y, 2).unwrap();
        let t = train_logreg(&data, &ClassifierSpec::logistic_regression(1e6, 100), None).unwrap();
        let Model::Linear(m) = t.model else { unreachable!() };
        assert!(dot(&m.weights, &m.weights).sqrt() < 1e-2, "{:?}", m.weights);
    }

    #[test]
    fn flipped_labels_flip_scores() {
        let x = vec![1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0, 2.0, 1.0, -2.0, -1.0];
        let y = vec![1, 0, 1, 0, 1, 0];
        let flipped: Vec<u8> = y.iter().map(|v| 1 - v).collect();
        let spec = ClassifierSpec::logistic_regression(0.01, 50);
        let a = train_logreg(&Dataset::new(&x, &y, 2).unwrap(), &spec, None).unwrap();
        let b = train_logreg(&Dataset::new(&x, &flipped, 2).unwrap(), &spec, None).unwrap();
        for row in x.chunks(2) {
            let (sa, sb) = (a.model.score(row), b.model.score(row));
            assert!((sa + sb - 1.0).abs() < 1e-12, "{sa} {sb}");
        }
    }

    #[test]
    fn svm_separates_and_returns_decision_values() {
        let (x, y) = separable();
        let data = Dataset::new(&x, &y, 2).unwrap();
        let t = train_svm(&data, &ClassifierSpec::linear_svm(1e-6, 200), None).unwrap();
        let scores = t.model.score_rows(&x, 2);
        assert_eq!(auc(&scores, &y).unwrap(), 1.0);
        assert!(scores.iter().any(|s| *s < 0.0 || *s > 1.0));
        let rescaled: Vec<f64> = scores.iter().map(|s| 3.0 * s + 7.0).collect();
        assert_eq!(auc(&rescaled, &y).unwrap(), auc(&scores, &y).unwrap());
    }

    fn xor_loss(hidden: usize) -> f64 {
        let x = vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0];
        let y = vec![0, 1, 1, 0];
        let data = Dataset::new(&x, &y, 2).unwrap();
        let t = train_mlp(&data, &ClassifierSpec::mlp(0.0, hidden, 5000), None, 3).unwrap();
        let Model::Mlp(m) = &t.model else { unreachable!() };
        let mut g = vec![0.0; m.params.len()];
        mlp_loss_grad(&m.params, &data, m.layout, 0.0, &mut g)
    }

    #[test]
    fn mlp_learns_xor() {
        let loss = xor_loss(4);
        assert!(loss < 0.1, "loss {loss}");
    }

    #[test]
    fn single_hidden_unit_cannot_fit_xor() {
        let loss = xor_loss(1);
        assert!(loss > 0.3, "loss {loss}");
    }

    #[test]
    fn knn_scores() {
        let x = vec![0.0, 0.0, 1.0, 0.0, 5.0, 5.0, 6.0, 5.0];
        let y = vec![1, 0, 0, 1];
        let data = Dataset::new(&x, &y, 2).unwrap();
        assert_eq!(knn_score(&data, &[6.0, 5.0], 1).unwrap(), 1.0);
        assert_eq!(knn_score(&data, &[100.0, -3.0], 4).unwrap(), 0.5);
        assert!(knn_score(&data, &[0.0, 0.0], 5).is_err());
        // equidistant from rows 0 and 1: the lower index wins
        assert_eq!(knn_score(&data, &[0.5, 0.0], 1).unwrap(), 1.0);
    }

    #[test]
    fn validation_selects_best_epoch() {
        let (x, y) = separable();
        let data = Dataset::new(&x, &y, 2).unwrap();
        let t = train_logreg(&data, &ClassifierSpec::logistic_regression(0.0, 20), Some(&data)).unwrap();
        assert_eq!(t.trace.validation_auc.len(), 20);
        let best = t.trace.validation_auc.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(t.trace.validation_auc[t.trace.selected_epoch - 1], best);
    }

    #[test]
    fn rejects_non_finite_rows_and_bad_specs() {
        assert!(Dataset::new(&[f64::NAN, 1.0], &[1], 2).is_err());
        assert!(ClassifierSpec::knn(0).validate().is_err());
        assert!(ClassifierSpec::mlp(0.1, 0, 10).validate().is_err());
        assert!(ClassifierSpec::logistic_regression(-1.0, 10).validate().is_err());
        assert!(ClassifierSpec::logistic_regression(0.1, 0).validate().is_err());
    }

    #[test]
    fn tuned_settings() {
        let s = ClassifierSpec::tuned(ClassifierKind::Mlp, FeatureKind::ConceptVector);
        assert_eq!((s.l2, s.hidden_size, s.max_epoch), (0.001, 100, 100));
        let s = ClassifierSpec::tuned(ClassifierKind::Knn, FeatureKind::OneHotCounts);
        assert_eq!(s.k_neighbors, 15);
        let s = ClassifierSpec::tuned(ClassifierKind::LinearSvm, FeatureKind::OneHotCounts);
        assert_eq!(s.l2, 1e-6);
    }
}
