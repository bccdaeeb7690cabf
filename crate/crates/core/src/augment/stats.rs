use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

/// Per-class example counts and mean vectors, accumulated in f64.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub k: usize,
    pub d: usize,
    pub counts: Vec<usize>,
    means: Vec<f64>,
}

impl ClassStats {
    pub fn mean(&self, class: usize) -> &[f64] {
        &self.means[class * self.d..(class + 1) * self.d]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Mean embedding of every class.
pub fn class_means(ds: &EmbeddingDataset) -> Result<ClassStats> {
    let (k, d) = (ds.num_classes(), ds.dim());
    let mut sums = vec![0.0f64; k * d];
    let mut counts = vec![0usize; k];
    for (row, label) in ds.rows() {
        let c = label as usize;
        counts[c] += 1;
        for (s, &x) in sums[c * d..(c + 1) * d].iter_mut().zip(row) {
            *s += x as f64;
        }
    }
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        let name = &ds.class_names()[c];
        return Err(Error::Stats(format!("class {c} ({name}) has no examples")));
    }
    for (c, &n) in counts.iter().enumerate() {
        for s in &mut sums[c * d..(c + 1) * d] {
            *s /= n as f64;
        }
    }
    Ok(ClassStats {
        k,
        d,
        counts,
        means: sums,
    })
}
