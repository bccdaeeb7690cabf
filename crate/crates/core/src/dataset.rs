//! Labeled embedding datasets.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// `n` labeled vectors of dimension `d` over `k` dense, zero-based classes.
///
/// Vectors are stored row-major in a single `f32` buffer. A dataset may be
/// empty in memory (augmentation intermediates), but the file loaders reject
/// `n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDataset {
    dim: usize,
    num_classes: usize,
    labels: Vec<u32>,
    vectors: Vec<f32>,
    class_names: Vec<String>,
}

pub fn default_class_names(k: usize) -> Vec<String> {
    (0..k).map(|c| format!("class_{c}")).collect()
}

impl EmbeddingDataset {
    pub fn new(
        dim: usize,
        num_classes: usize,
        labels: Vec<u32>,
        vectors: Vec<f32>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("dimensionality must be positive".into()));
        }
        if num_classes == 0 {
            return Err(Error::Validation("class count must be positive".into()));
        }
        if vectors.len() != labels.len() * dim {
            return Err(Error::Validation(format!(
                "expected {}x{} = {} vector entries, got {}",
                labels.len(),
                dim,
                labels.len() * dim,
                vectors.len()
            )));
        }
        if let Some((i, &l)) = labels
            .iter()
            .enumerate()
            .find(|(_, &l)| l as usize >= num_classes)
        {
            return Err(Error::Validation(format!(
                "label {l} at row {i} is out of range for k={num_classes}"
            )));
        }
        if let Some(pos) = vectors.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self {
            dim,
            num_classes,
            labels,
            vectors,
            class_names: default_class_names(num_classes),
        })
    }

    pub fn empty(dim: usize, num_classes: usize) -> Result<Self> {
        Self::new(dim, num_classes, Vec::new(), Vec::new())
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.num_classes {
            return Err(Error::Validation(format!(
                "{} class names supplied for k={}",
                names.len(),
                self.num_classes
            )));
        }
        self.class_names = names;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn vectors(&self) -> &[f32] {
        &self.vectors
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f32], u32)> + '_ {
        self.vectors
            .chunks_exact(self.dim)
            .zip(self.labels.iter().copied())
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Row indices of each class, in dataset order.
    pub fn class_rows(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.num_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            rows[l as usize].push(i);
        }
        rows
    }

    pub fn empty_classes(&self) -> Vec<usize> {
        self.class_counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(c, _)| c)
            .collect()
    }

    /// Checks that every class has at least one example (required for training).
    pub fn require_complete(&self) -> Result<()> {
        let empty = self.empty_classes();
        if empty.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "classes without examples: {empty:?}"
            )))
        }
    }

    /// New dataset made of the given rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut labels = Vec::with_capacity(indices.len());
        let mut vectors = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            labels.push(self.labels[i]);
            vectors.extend_from_slice(self.row(i));
        }
        Self {
            dim: self.dim,
            num_classes: self.num_classes,
            labels,
            vectors,
            class_names: self.class_names.clone(),
        }
    }

    /// Appends validated rows. Used to form the union of original and augmented data.
    pub fn extend_rows(&mut self, labels: &[u32], vectors: &[f32]) -> Result<()> {
        if vectors.len() != labels.len() * self.dim {
            return Err(Error::Shape(format!(
                "appending {} labels with {} entries at d={}",
                labels.len(),
                vectors.len(),
                self.dim
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= self.num_classes) {
            return Err(Error::Bounds(format!(
                "label {l} out of range for k={}",
                self.num_classes
            )));
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "non-finite value in appended rows".into(),
            ));
        }
        self.labels.extend_from_slice(labels);
        self.vectors.extend_from_slice(vectors);
        Ok(())
    }
}

/// Draws `per_class_train` training and `per_class_eval` evaluation rows from every
/// class without overlap. Selected rows keep their original relative order.
pub fn stratified_split(
    ds: &EmbeddingDataset,
    per_class_train: usize,
    per_class_eval: usize,
    seed: u64,
) -> Result<(EmbeddingDataset, EmbeddingDataset)> {
    let need = per_class_train + per_class_eval;
    let class_rows = ds.class_rows();
    if let Some((c, rows)) = class_rows.iter().enumerate().find(|(_, r)| r.len() < need) {
        return Err(Error::Capacity(format!(
            "class {c} has {} examples, split needs {need}",
            rows.len()
        )));
    }
    let mut train_idx = Vec::with_capacity(per_class_train * ds.num_classes());
    let mut eval_idx = Vec::with_capacity(per_class_eval * ds.num_classes());
    for (c, rows) in class_rows.into_iter().enumerate() {
        let mut rng = stream_rng(seed, Stream::Split, c as u64);
        let mut shuffled = rows;
        shuffled.shuffle(&mut rng);
        train_idx.extend_from_slice(&shuffled[..per_class_train]);
        eval_idx.extend_from_slice(&shuffled[per_class_train..need]);
    }
    train_idx.sort_unstable();
    eval_idx.sort_unstable();
    Ok((ds.subset(&train_idx), ds.subset(&eval_idx)))
}
