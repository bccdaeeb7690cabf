use rand::seq::index;
use rayon::prelude::*;

use super::{AugmentPlan, AugmentedBatch, ClassStats, Method, NAug, Provenance};
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Re-anchors `x` from the mean of `source` to the mean of `target`:
/// `x - mean(source) + mean(target)`.
pub fn ge3_extrapolate(
    x: &[f32],
    stats: &ClassStats,
    source: usize,
    target: usize,
) -> Result<Vec<f32>> {
    for c in [source, target] {
        if c >= stats.k {
            return Err(Error::Bounds(format!(
                "class {c} out of range for k={}",
                stats.k
            )));
        }
    }
    if x.len() != stats.d {
        return Err(Error::Shape(format!(
            "vector has d={}, stats have d={}",
            x.len(),
            stats.d
        )));
    }
    let (mu_s, mu_t) = (stats.mean(source), stats.mean(target));
    Ok(x.iter()
        .zip(mu_s)
        .zip(mu_t)
        .map(|((&v, &s), &t)| (v as f64 - s + t) as f32)
        .collect())
}

/// Donor classes for `target`, in ascending order.
///
/// `NAug::All` gives every other class; `NAug::Count(n)` samples `n` of them
/// uniformly without replacement from a stream keyed by `(seed, target)`.
pub fn choose_donors(k: usize, target: usize, n_aug: NAug, seed: u64) -> Result<Vec<usize>> {
    let others = k.saturating_sub(1);
    match n_aug {
        NAug::All => Ok((0..k).filter(|&c| c != target).collect()),
        NAug::Count(0) => Err(Error::Plan("n_aug must be positive".into())),
        NAug::Count(n) if n as usize > others => Err(Error::Plan(format!(
            "n_aug={n} exceeds the {others} other classes available"
        ))),
        NAug::Count(n) => {
            let mut rng = stream_rng(seed, Stream::Donors, target as u64);
            let mut donors: Vec<usize> = index::sample(&mut rng, others, n as usize)
                .into_iter()
                .map(|i| if i >= target { i + 1 } else { i })
                .collect();
            donors.sort_unstable();
            Ok(donors)
        }
    }
}

/// Extrapolates every example of every chosen donor class onto each target class.
///
/// With all donors the batch holds `(k - 1) * n` rows and every class ends up
/// with exactly `n` rows once unioned with the original data.
pub fn ge3_augment_all(
    ds: &EmbeddingDataset,
    stats: &ClassStats,
    plan: &AugmentPlan,
) -> Result<AugmentedBatch> {
    if plan.method != Method::Ge3 {
        return Err(Error::Plan(format!(
            "ge3_augment_all called with method {}",
            plan.method
        )));
    }
    plan.validate(ds.num_classes())?;
    if stats.k != ds.num_classes() || stats.d != ds.dim() {
        return Err(Error::Shape(format!(
            "stats (k={}, d={}) do not match dataset (k={}, d={})",
            stats.k,
            stats.d,
            ds.num_classes(),
            ds.dim()
        )));
    }
    let class_rows = ds.class_rows();
    let k = ds.num_classes();
    let per_target: Vec<AugmentedBatch> = (0..k)
        .into_par_iter()
        .map(|target| {
            let mut batch = AugmentedBatch::empty(Method::Ge3, plan.seed, ds.dim());
            for source in choose_donors(k, target, plan.n_aug, plan.seed)? {
                for &i in &class_rows[source] {
                    let v = ge3_extrapolate(ds.row(i), stats, source, target)?;
                    batch.push(
                        target as u32,
                        v,
                        Provenance {
                            source_class: source as u32,
                            source_rows: vec![i],
                        },
                    );
                }
            }
            Ok(batch)
        })
        .collect::<Result<_>>()?;
    let mut out = AugmentedBatch::empty(Method::Ge3, plan.seed, ds.dim());
    for b in per_target {
        out.append(b);
    }
    Ok(out)
}
