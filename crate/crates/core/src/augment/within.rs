use rand::Rng;
use rayon::prelude::*;

use super::ops::{interpolate_pair, linear_delta, noise_augment, within_extrapolate_pair};
use super::{AugmentPlan, AugmentedBatch, ClassStats, Method, Provenance};
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Index pair `(i, j)` with `i != j`, drawn uniformly from `0..m` (`m >= 2`).
fn distinct_pair<R: Rng>(rng: &mut R, m: usize) -> (usize, usize) {
    let i = rng.random_range(0..m);
    let j = rng.random_range(0..m - 1);
    (i, if j >= i { j + 1 } else { j })
}

/// Generates within-class rows until every class holds `target_per_class` rows.
///
/// Sources are drawn uniformly with replacement from a per-class stream keyed by
/// `(plan.seed, class)`. Pair methods never pair a row with itself; for linear
/// delta the third row is drawn independently of the pair.
pub fn augment_to_count(
    ds: &EmbeddingDataset,
    stats: &ClassStats,
    plan: &AugmentPlan,
    target_per_class: usize,
) -> Result<AugmentedBatch> {
    if !plan.method.is_within_class() {
        return Err(Error::Plan(format!(
            "{} is not a within-class method",
            plan.method
        )));
    }
    plan.validate(ds.num_classes())?;
    if stats.counts != ds.class_counts() {
        return Err(Error::Shape(
            "class stats do not describe this dataset".into(),
        ));
    }
    if let Some((c, &n)) = stats
        .counts
        .iter()
        .enumerate()
        .find(|(_, &n)| n > target_per_class)
    {
        return Err(Error::Plan(format!(
            "class {c} already has {n} rows, above the target of {target_per_class}"
        )));
    }
    let arity = plan.method.arity();
    let class_rows = ds.class_rows();
    for (c, rows) in class_rows.iter().enumerate() {
        let need = target_per_class - rows.len();
        let min_rows = if arity >= 2 { 2 } else { 1 };
        if need > 0 && rows.len() < min_rows {
            return Err(Error::Capacity(format!(
                "class {c} has {} example(s); {} needs at least {min_rows} distinct rows",
                rows.len(),
                plan.method
            )));
        }
    }

    let per_class: Vec<AugmentedBatch> = class_rows
        .par_iter()
        .enumerate()
        .map(|(c, rows)| {
            let mut rng = stream_rng(plan.seed, Stream::Augment, c as u64);
            let mut batch = AugmentedBatch::empty(plan.method, plan.seed, ds.dim());
            let m = rows.len();
            for _ in rows.len()..target_per_class {
                let (v, sources) = match plan.method {
                    Method::Interpolate => {
                        let (i, j) = distinct_pair(&mut rng, m);
                        let (i, j) = (rows[i], rows[j]);
                        (interpolate_pair(ds.row(i), ds.row(j))?, vec![i, j])
                    }
                    Method::WithinExtrapolate => {
                        let (i, j) = distinct_pair(&mut rng, m);
                        let (i, j) = (rows[i], rows[j]);
                        let v = within_extrapolate_pair(
                            ds.row(i),
                            ds.row(j),
                            plan.lambda,
                            plan.literal_within_form,
                        )?;
                        (v, vec![i, j])
                    }
                    Method::LinearDelta => {
                        let (i, j) = distinct_pair(&mut rng, m);
                        let (i, j, k) = (rows[i], rows[j], rows[rng.random_range(0..m)]);
                        (
                            linear_delta(ds.row(i), ds.row(j), ds.row(k))?,
                            vec![i, j, k],
                        )
                    }
                    Method::UniformNoise | Method::GaussianNoise => {
                        let i = rows[rng.random_range(0..m)];
                        (noise_augment(ds.row(i), plan, &mut rng)?, vec![i])
                    }
                    Method::Ge3 | Method::None => unreachable!("rejected above"),
                };
                batch.push(
                    c as u32,
                    v,
                    Provenance {
                        source_class: c as u32,
                        source_rows: sources,
                    },
                );
            }
            Ok(batch)
        })
        .collect::<Result<_>>()?;

    let mut out = AugmentedBatch::empty(plan.method, plan.seed, ds.dim());
    for b in per_class {
        out.append(b);
    }
    Ok(out)
}
