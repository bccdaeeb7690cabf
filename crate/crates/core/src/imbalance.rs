//! Artificial class imbalance and the upsampling baseline.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Which classes were cut down to `n_few` examples, and from what.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImbalanceSpec {
    pub n_few: usize,
    /// Sorted class indices; `floor(k / 2)` of them.
    pub restricted_classes: Vec<usize>,
    /// Per-class counts before restriction.
    pub n_many_per_class: Vec<usize>,
    pub seed: u64,
}

impl ImbalanceSpec {
    pub fn is_restricted(&self, class: usize) -> bool {
        self.restricted_classes.binary_search(&class).is_ok()
    }

    /// Largest original class size.
    pub fn n_many(&self) -> usize {
        self.n_many_per_class.iter().copied().max().unwrap_or(0)
    }
}

/// Restricts `floor(k / 2)` uniformly chosen classes to a uniform random subset
/// of `n_few` examples each. Unrestricted classes keep all their rows. The
/// output preserves the input's row order.
pub fn make_imbalanced(
    ds: &EmbeddingDataset,
    n_few: usize,
    seed: u64,
) -> Result<(EmbeddingDataset, ImbalanceSpec)> {
    let counts = ds.class_counts();
    if let Some((c, &n)) = counts.iter().enumerate().find(|(_, &n)| n < n_few) {
        return Err(Error::Capacity(format!(
            "class {c} has {n} examples, fewer than n_few={n_few}"
        )));
    }
    let k = ds.num_classes();
    let mut rng = stream_rng(seed, Stream::Imbalance, 0);
    let mut restricted: Vec<usize> = index::sample(&mut rng, k, k / 2).into_vec();
    restricted.sort_unstable();

    let class_rows = ds.class_rows();
    let mut keep = Vec::with_capacity(ds.len());
    for (c, rows) in class_rows.iter().enumerate() {
        if restricted.binary_search(&c).is_ok() {
            let mut rng = stream_rng(seed, Stream::Imbalance, 1 + c as u64);
            keep.extend(
                index::sample(&mut rng, rows.len(), n_few)
                    .into_iter()
                    .map(|i| rows[i]),
            );
        } else {
            keep.extend_from_slice(rows);
        }
    }
    keep.sort_unstable();

    let spec = ImbalanceSpec {
        n_few,
        restricted_classes: restricted,
        n_many_per_class: counts,
        seed,
    };
    Ok((ds.subset(&keep), spec))
}

/// Duplicates uniformly sampled rows of each smaller class until every class
/// matches the largest one. Duplicates are appended after the original rows.
pub fn upsample_balance(ds: &EmbeddingDataset, seed: u64) -> Result<EmbeddingDataset> {
    let class_rows = ds.class_rows();
    if let Some(c) = class_rows.iter().position(Vec::is_empty) {
        return Err(Error::Stats(format!(
            "cannot upsample class {c}: it has no examples"
        )));
    }
    let max = class_rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut extra = Vec::new();
    for (c, rows) in class_rows.iter().enumerate() {
        let mut rng = stream_rng(seed, Stream::Upsample, c as u64);
        extra.extend((rows.len()..max).map(|_| rows[rng.random_range(0..rows.len())]));
    }
    let dup = ds.subset(&extra);
    let mut out = ds.clone();
    out.extend_rows(dup.labels(), dup.vectors())?;
    Ok(out)
}
