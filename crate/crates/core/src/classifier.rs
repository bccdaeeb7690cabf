//! Linear softmax classifier over frozen embeddings.
//!
//! Parameters are kept in f64; inputs are the dataset's f32 vectors. Batch
//! gradients are accumulated sequentially in row order, so a trained model is a
//! pure function of `(data, config)`.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::imbalance::ImbalanceSpec;
use crate::rng::{stream_rng, Stream};

pub const LMD1_MAGIC: &[u8; 4] = b"LMD1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
    /// Standard deviation of the initial weights; 0 means zero initialization.
    pub init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            batch_size: 64,
            epochs: 30,
            l2: 1e-4,
            seed: 0,
            init_scale: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Validation(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Validation("batch_size must be > 0".into()));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::Validation(format!(
                "l2 must be >= 0, got {}",
                self.l2
            )));
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return Err(Error::Validation(format!(
                "init_scale must be >= 0, got {}",
                self.init_scale
            )));
        }
        Ok(())
    }
}

/// `k x d` weights (row per class) and a `k` bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub k: usize,
    pub d: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(k: usize, d: usize) -> Self {
        Self {
            k,
            d,
            weights: vec![0.0; k * d],
            bias: vec![0.0; k],
        }
    }

    /// Initial model for `cfg`: zeros, or N(0, init_scale) weights drawn from
    /// the config's seed.
    pub fn init(k: usize, d: usize, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let mut m = Self::zeros(k, d);
        if cfg.init_scale > 0.0 {
            let normal = Normal::new(0.0, cfg.init_scale).expect("validated scale");
            let mut rng = stream_rng(cfg.seed, Stream::Train, 1);
            m.weights
                .iter_mut()
                .for_each(|w| *w = normal.sample(&mut rng));
        }
        Ok(m)
    }

    pub fn weight_row(&self, class: usize) -> &[f64] {
        &self.weights[class * self.d..(class + 1) * self.d]
    }

    fn logits_unchecked(&self, x: &[f32], out: &mut [f64]) {
        for (c, z) in out.iter_mut().enumerate() {
            let w = self.weight_row(c);
            *z = self.bias[c] + w.iter().zip(x).map(|(&w, &x)| w * x as f64).sum::<f64>();
        }
    }

    /// Index of the largest logit; ties go to the lowest index.
    pub fn predict(&self, x: &[f32]) -> Result<usize> {
        Ok(argmax(&forward_logits(self, x)?))
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(12 + 4 * (self.weights.len() + self.bias.len()));
        buf.extend_from_slice(LMD1_MAGIC);
        buf.extend_from_slice(&(self.k as u32).to_le_bytes());
        buf.extend_from_slice(&(self.d as u32).to_le_bytes());
        for &v in self.weights.iter().chain(&self.bias) {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != LMD1_MAGIC {
            return Err(Error::Format("missing LMD1 magic".into()));
        }
        if bytes.len() < 12 {
            return Err(Error::Corruption("LMD1 header truncated".into()));
        }
        let k = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let d = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        if k == 0 || d == 0 {
            return Err(Error::Validation(format!("LMD1 declares k={k}, d={d}")));
        }
        let expected = 12 + 4 * (k as u64 * d as u64 + k as u64);
        if bytes.len() as u64 != expected {
            return Err(Error::Corruption(format!(
                "LMD1 payload is {} bytes, expected {expected}",
                bytes.len()
            )));
        }
        let mut vals = bytes[12..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64);
        let weights: Vec<f64> = vals.by_ref().take(k * d).collect();
        let bias: Vec<f64> = vals.collect();
        let m = Self {
            k,
            d,
            weights,
            bias,
        };
        if !m.is_finite() {
            return Err(Error::Validation("LMD1 holds non-finite parameters".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Lowest index among the maxima.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax (max-subtracted).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `W x + b`.
pub fn forward_logits(model: &LinearModel, x: &[f32]) -> Result<Vec<f64>> {
    if x.len() != model.d {
        return Err(Error::Shape(format!(
            "input has d={}, model expects {}",
            x.len(),
            model.d
        )));
    }
    let mut out = vec![0.0; model.k];
    model.logits_unchecked(x, &mut out);
    Ok(out)
}

fn check_data(model: &LinearModel, ds: &EmbeddingDataset) -> Result<()> {
    if ds.dim() != model.d {
        return Err(Error::Shape(format!(
            "data has d={}, model expects {}",
            ds.dim(),
            model.d
        )));
    }
    if ds.num_classes() > model.k {
        return Err(Error::Shape(format!(
            "data has k={} classes, model only {}",
            ds.num_classes(),
            model.k
        )));
    }
    Ok(())
}

/// Mean cross-entropy over `rows` plus `(l2 / 2) * ||W||^2`, and its gradient.
fn loss_and_grad_rows(
    model: &LinearModel,
    ds: &EmbeddingDataset,
    rows: &[usize],
    l2: f64,
) -> (f64, Gradient) {
    let (k, d) = (model.k, model.d);
    let mut gw = vec![0.0; k * d];
    let mut gb = vec![0.0; k];
    let mut logits = vec![0.0; k];
    let mut loss = 0.0;
    for &i in rows {
        let x = ds.row(i);
        let y = ds.label(i) as usize;
        model.logits_unchecked(x, &mut logits);
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logits.iter().map(|&z| (z - max).exp()).sum();
        let lse = max + sum.ln();
        loss += lse - logits[y];
        for c in 0..k {
            let p = (logits[c] - lse).exp();
            let g = if c == y { p - 1.0 } else { p };
            gb[c] += g;
            for (acc, &xv) in gw[c * d..(c + 1) * d].iter_mut().zip(x) {
                *acc += g * xv as f64;
            }
        }
    }
    let scale = 1.0 / rows.len() as f64;
    loss *= scale;
    let mut sq = 0.0;
    for (g, &w) in gw.iter_mut().zip(&model.weights) {
        *g = *g * scale + l2 * w;
        sq += w * w;
    }
    gb.iter_mut().for_each(|g| *g *= scale);
    loss += 0.5 * l2 * sq;
    (
        loss,
        Gradient {
            weights: gw,
            bias: gb,
        },
    )
}

/// Loss and exact gradient over a whole batch.
pub fn loss_and_grad(
    model: &LinearModel,
    batch: &EmbeddingDataset,
    l2: f64,
) -> Result<(f64, Gradient)> {
    check_data(model, batch)?;
    if batch.is_empty() {
        return Err(Error::Shape("empty batch".into()));
    }
    let rows: Vec<usize> = (0..batch.len()).collect();
    Ok(loss_and_grad_rows(model, batch, &rows, l2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub model: LinearModel,
    /// Mean minibatch loss of each epoch.
    pub epoch_losses: Vec<f64>,
}

/// Minibatch SGD with a seeded reshuffle every epoch.
pub fn train(init: LinearModel, ds: &EmbeddingDataset, cfg: &TrainConfig) -> Result<Trained> {
    cfg.validate()?;
    check_data(&init, ds)?;
    if ds.num_classes() != init.k {
        return Err(Error::Shape(format!(
            "data has k={}, model has k={}",
            ds.num_classes(),
            init.k
        )));
    }
    ds.require_complete()?;
    let mut model = init;
    let mut rng = stream_rng(cfg.seed, Stream::Train, 0);
    let mut order: Vec<usize> = (0..ds.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut step = 0usize;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let (loss, grad) = loss_and_grad_rows(&model, ds, batch, cfg.l2);
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "non-finite loss at epoch {epoch}, step {step}"
                )));
            }
            for (w, g) in model.weights.iter_mut().zip(&grad.weights) {
                *w -= cfg.learning_rate * g;
            }
            for (b, g) in model.bias.iter_mut().zip(&grad.bias) {
                *b -= cfg.learning_rate * g;
            }
            if !model.is_finite() {
                return Err(Error::Training(format!(
                    "non-finite parameters at epoch {epoch}, step {step}"
                )));
            }
            total += loss * batch.len() as f64;
            step += 1;
        }
        epoch_losses.push(total / ds.len() as f64);
    }
    Ok(Trained {
        model,
        epoch_losses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Percent correct.
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// Percent correct per class; `None` for classes absent from the eval set.
    pub per_class: Vec<Option<f64>>,
    pub acc_restricted: Option<f64>,
    pub acc_unrestricted: Option<f64>,
}

fn percent(correct: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * correct as f64 / total as f64)
}

/// Accuracy overall, per class and, given an imbalance spec, over the
/// restricted and unrestricted class groups.
pub fn evaluate(
    model: &LinearModel,
    ds: &EmbeddingDataset,
    imbalance: Option<&ImbalanceSpec>,
) -> Result<Evaluation> {
    check_data(model, ds)?;
    if ds.is_empty() {
        return Err(Error::Validation("evaluation set is empty".into()));
    }
    let mut hits = vec![0usize; model.k];
    let mut seen = vec![0usize; model.k];
    let mut logits = vec![0.0; model.k];
    for (x, y) in ds.rows() {
        model.logits_unchecked(x, &mut logits);
        let y = y as usize;
        seen[y] += 1;
        if argmax(&logits) == y {
            hits[y] += 1;
        }
    }
    let correct: usize = hits.iter().sum();
    let per_class = hits
        .iter()
        .zip(&seen)
        .map(|(&h, &s)| percent(h, s))
        .collect();
    let (acc_restricted, acc_unrestricted) = match imbalance {
        Some(spec) => {
            let group = |restricted: bool| {
                let (h, s) = (0..model.k)
                    .filter(|&c| spec.is_restricted(c) == restricted)
                    .fold((0, 0), |(h, s), c| (h + hits[c], s + seen[c]));
                percent(h, s)
            };
            (group(true), group(false))
        }
        None => (None, None),
    };
    Ok(Evaluation {
        accuracy: 100.0 * correct as f64 / ds.len() as f64,
        correct,
        total: ds.len(),
        per_class,
        acc_restricted,
        acc_unrestricted,
    })
}
