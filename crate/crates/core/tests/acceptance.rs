//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any fail.

use std::time::{Duration, Instant};

use hexaug::augment::{
    augment_to_count, class_means, ge3_augment_all, ge3_extrapolate, interpolate_pair,
    linear_delta, noise_augment, within_extrapolate_pair, AugmentPlan, Method,
};
use hexaug::classifier::{evaluate, loss_and_grad, train, LinearModel, TrainConfig};
use hexaug::experiment::{
    ablate_naug, ablate_nfew, paired_improvement, run_conditions, with_jobs, ExperimentSpec,
};
use hexaug::synth::{generate, geometry, CovarianceMode, SynthSpec};
use hexaug::EmbeddingDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(elapsed: Duration, budget_secs: u64) -> Result<(), String> {
    check(elapsed < Duration::from_secs(budget_secs), || {
        format!("runtime {elapsed:.2?} exceeds {budget_secs} s budget")
    })
}

/// Random class-complete dataset: k <= 10, d <= 64, n <= 500.
fn random_dataset(rng: &mut ChaCha8Rng) -> EmbeddingDataset {
    let k = rng.random_range(1..=10);
    let d = rng.random_range(1..=64);
    let n = rng.random_range(k..=500);
    let offsets: Vec<f32> = (0..k * d).map(|_| rng.random_range(-3.0..3.0)).collect();
    let mut labels = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * d);
    for i in 0..n {
        let c = if i < k { i } else { rng.random_range(0..k) };
        labels.push(c as u32);
        for j in 0..d {
            vectors.push(offsets[c * d + j] + rng.random_range(-2.0f32..2.0));
        }
    }
    EmbeddingDataset::new(d, k, labels, vectors).unwrap()
}

/// Independent per-class means: straight sums in f64.
fn brute_means(ds: &EmbeddingDataset) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0f64; ds.dim()]; ds.num_classes()];
    let mut counts = vec![0usize; ds.num_classes()];
    for i in 0..ds.len() {
        let c = ds.label(i) as usize;
        counts[c] += 1;
        for j in 0..ds.dim() {
            sums[c][j] += ds.row(i)[j] as f64;
        }
    }
    for c in 0..sums.len() {
        for v in &mut sums[c] {
            *v /= counts[c] as f64;
        }
    }
    sums
}

fn ge3_algebra() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_dev = 0.0f64;
    let mut worst_mean = 0.0f64;
    for trial in 0..100 {
        let ds = random_dataset(&mut rng);
        let (k, d, n) = (ds.num_classes(), ds.dim(), ds.len());
        let mu = brute_means(&ds);
        let stats = class_means(&ds).unwrap();

        for i in 0..n {
            let s = ds.label(i) as usize;
            let x = ds.row(i);
            check(ge3_extrapolate(x, &stats, s, s).unwrap() == x, || {
                format!("trial {trial}: self-extrapolation changed row {i}")
            })?;
            let t = rng.random_range(0..k);
            let xh = ge3_extrapolate(x, &stats, s, t).unwrap();
            for j in 0..d {
                let err = ((xh[j] as f64 - mu[t][j]) - (x[j] as f64 - mu[s][j])).abs();
                worst_dev = worst_dev.max(err);
            }
        }

        let batch = ge3_augment_all(&ds, &stats, &AugmentPlan::new(Method::Ge3)).unwrap();
        check(batch.len() == (k - 1) * n, || {
            format!(
                "trial {trial}: batch has {} rows, expected {}",
                batch.len(),
                (k - 1) * n
            )
        })?;
        let union = batch.union_with(&ds).unwrap();
        check(union.len() == k * n, || {
            format!("trial {trial}: union has {} rows", union.len())
        })?;

        // Mean of each (source -> target) block equals the target mean.
        let mut block_sums = std::collections::BTreeMap::<(u32, u32), (Vec<f64>, usize)>::new();
        for (r, p) in batch.provenance().iter().enumerate() {
            let e = block_sums
                .entry((p.source_class, batch.labels()[r]))
                .or_insert_with(|| (vec![0.0; d], 0));
            for j in 0..d {
                e.0[j] += batch.row(r)[j] as f64;
            }
            e.1 += 1;
        }
        for ((_, t), (sum, cnt)) in block_sums {
            for j in 0..d {
                worst_mean = worst_mean.max((sum[j] / cnt as f64 - mu[t as usize][j]).abs());
            }
        }
    }
    check(worst_dev <= 1e-6, || {
        format!("deviation preservation error {worst_dev:e} > 1e-6")
    })?;
    check(worst_mean <= 1e-5, || {
        format!("batch mean error {worst_mean:e} > 1e-5")
    })?;
    within_budget(start.elapsed(), 10)?;
    Ok(format!(
        "100 datasets; max deviation err {worst_dev:.2e}, max mean err {worst_mean:.2e}; {:.2?}",
        start.elapsed()
    ))
}

fn operator_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut track = |got: &[f32], want: &[f64]| {
        for (g, w) in got.iter().zip(want) {
            worst = worst.max((*g as f64 - w).abs());
        }
    };
    for _ in 0..2000 {
        let d = rng.random_range(1..=64);
        let mut v = || -> Vec<f32> { (0..d).map(|_| rng.random_range(-5.0f32..5.0)).collect() };
        let (xi, xj, xk) = (v(), v(), v());
        let f = |x: &[f32], j: usize| x[j] as f64;
        let mid: Vec<f64> = (0..d).map(|j| 0.5 * (f(&xi, j) + f(&xj, j))).collect();
        track(&interpolate_pair(&xi, &xj).unwrap(), &mid);
        let ext: Vec<f64> = (0..d)
            .map(|j| 0.5 * (f(&xi, j) - f(&xj, j)) + f(&xi, j))
            .collect();
        track(
            &within_extrapolate_pair(&xi, &xj, 0.5, false).unwrap(),
            &ext,
        );
        let lit: Vec<f64> = (0..d)
            .map(|j| 0.5 * (f(&xi, j) + f(&xj, j)) - f(&xi, j))
            .collect();
        track(&within_extrapolate_pair(&xi, &xj, 0.5, true).unwrap(), &lit);
        let del: Vec<f64> = (0..d).map(|j| f(&xi, j) - f(&xj, j) + f(&xk, j)).collect();
        track(&linear_delta(&xi, &xj, &xk).unwrap(), &del);
    }
    check(worst <= 1e-6, || {
        format!("pair/triple operators deviate by {worst:e}")
    })?;

    // Batch-level: every generated row must equal its formula on its provenance.
    let mut ds_rng = ChaCha8Rng::seed_from_u64(8);
    let ds = loop {
        let ds = random_dataset(&mut ds_rng);
        if ds.class_counts().iter().all(|&c| c >= 2) && ds.num_classes() >= 2 {
            break ds;
        }
    };
    let stats = class_means(&ds).unwrap();
    let target = ds.class_counts().into_iter().max().unwrap() * 2;
    for method in [
        Method::Interpolate,
        Method::WithinExtrapolate,
        Method::LinearDelta,
    ] {
        let batch =
            augment_to_count(&ds, &stats, &AugmentPlan::new(method).with_seed(3), target).unwrap();
        for (r, p) in batch.provenance().iter().enumerate() {
            let rows: Vec<&[f32]> = p.source_rows.iter().map(|&i| ds.row(i)).collect();
            let want: Vec<f64> = (0..ds.dim())
                .map(|j| {
                    let a = rows[0][j] as f64;
                    let b = rows[1][j] as f64;
                    match method {
                        Method::Interpolate => 0.5 * (a + b),
                        Method::WithinExtrapolate => 0.5 * (a - b) + a,
                        _ => a - b + rows[2][j] as f64,
                    }
                })
                .collect();
            let err = batch
                .row(r)
                .iter()
                .zip(&want)
                .map(|(g, w)| (*g as f64 - w).abs())
                .fold(0.0, f64::max);
            check(err <= 1e-6, || {
                format!("{method} row {r} deviates by {err:e}")
            })?;
        }
    }

    // Uniform noise stays inside +-0.1.
    let plan = AugmentPlan::new(Method::UniformNoise);
    let mut nrng = ChaCha8Rng::seed_from_u64(9);
    let zero = vec![0.0f32; 16];
    let mut max_abs = 0.0f32;
    for _ in 0..10_000 {
        for v in noise_augment(&zero, &plan, &mut nrng).unwrap() {
            max_abs = max_abs.max(v.abs());
        }
    }
    check(max_abs <= 0.1, || {
        format!("uniform noise reached {max_abs}")
    })?;

    // Gaussian noise statistics over 1e5 draws, per element.
    let plan = AugmentPlan::new(Method::GaussianNoise);
    let draws = 100_000;
    let d = 8;
    let zero = vec![0.0f32; d];
    let mut sum = vec![0.0f64; d];
    let mut sq = vec![0.0f64; d];
    for _ in 0..draws {
        for (j, v) in noise_augment(&zero, &plan, &mut nrng)
            .unwrap()
            .into_iter()
            .enumerate()
        {
            sum[j] += v as f64;
            sq[j] += (v as f64).powi(2);
        }
    }
    let mean_tol = 3.0 * 0.1 / (draws as f64).sqrt();
    for j in 0..d {
        let mean = sum[j] / draws as f64;
        let sd = (sq[j] / draws as f64 - mean * mean).sqrt();
        check(mean.abs() <= mean_tol, || {
            format!("gaussian element {j} mean {mean:e} beyond {mean_tol:e}")
        })?;
        check((sd - 0.1).abs() <= 0.002, || {
            format!("gaussian element {j} sd {sd}")
        })?;
    }
    within_budget(start.elapsed(), 10)?;
    Ok(format!(
        "max operator err {worst:.2e}; uniform max |n| {max_abs}; gaussian ok over {draws} draws; {:.2?}",
        start.elapsed()
    ))
}

/// Reference loss for the finite-difference oracle, written independently of the crate.
fn reference_loss(
    w: &[f64],
    b: &[f64],
    k: usize,
    d: usize,
    xs: &[Vec<f32>],
    ys: &[usize],
    l2: f64,
) -> f64 {
    let mut total = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z: Vec<f64> = (0..k)
            .map(|c| b[c] + (0..d).map(|j| w[c * d + j] * x[j] as f64).sum::<f64>())
            .collect();
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        total += lse - z[y];
    }
    total / xs.len() as f64 + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

fn trainer_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-4;
    let mut worst_rel = 0.0f64;
    for _ in 0..100 {
        let (n, d) = (5, 4);
        let k = rng.random_range(2..=5);
        let xs: Vec<Vec<f32>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0f32..2.0)).collect())
            .collect();
        let ys: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let l2 = rng.random_range(0.0..0.1);
        let ds = EmbeddingDataset::new(d, k, ys.iter().map(|&y| y as u32).collect(), xs.concat())
            .unwrap();
        let mut model = LinearModel::zeros(k, d);
        model
            .weights
            .iter_mut()
            .for_each(|w| *w = rng.random_range(-1.0..1.0));
        model
            .bias
            .iter_mut()
            .for_each(|b| *b = rng.random_range(-1.0..1.0));
        let (_, grad) = loss_and_grad(&model, &ds, l2).unwrap();

        let mut analytic = Vec::new();
        let mut numeric = Vec::new();
        for p in 0..k * d {
            let mut wp = model.weights.clone();
            let mut wm = model.weights.clone();
            wp[p] += h;
            wm[p] -= h;
            let fd = (reference_loss(&wp, &model.bias, k, d, &xs, &ys, l2)
                - reference_loss(&wm, &model.bias, k, d, &xs, &ys, l2))
                / (2.0 * h);
            analytic.push(grad.weights[p]);
            numeric.push(fd);
        }
        for c in 0..k {
            let mut bp = model.bias.clone();
            let mut bm = model.bias.clone();
            bp[c] += h;
            bm[c] -= h;
            let fd = (reference_loss(&model.weights, &bp, k, d, &xs, &ys, l2)
                - reference_loss(&model.weights, &bm, k, d, &xs, &ys, l2))
                / (2.0 * h);
            analytic.push(grad.bias[c]);
            numeric.push(fd);
        }
        let diff = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale = analytic
            .iter()
            .map(|a| a * a)
            .sum::<f64>()
            .sqrt()
            .max(numeric.iter().map(|a| a * a).sum::<f64>().sqrt());
        worst_rel = worst_rel.max(diff / scale);
    }
    check(worst_rel <= 1e-5, || {
        format!("gradient relative error {worst_rel:e}")
    })?;

    for k in 2..=10 {
        let ds = EmbeddingDataset::new(3, k, (0..k as u32).collect(), vec![0.7; 3 * k]).unwrap();
        let (loss, _) = loss_and_grad(&LinearModel::zeros(k, 3), &ds, 0.5).unwrap();
        check((loss - (k as f64).ln()).abs() <= 1e-9, || {
            format!("zero-model loss {loss} for k={k}")
        })?;
    }

    // Two well-separated clusters along the first axis.
    let mut labels = Vec::new();
    let mut vectors = Vec::new();
    for i in 0..100 {
        let y = i % 2;
        let sign = if y == 0 { -1.0 } else { 1.0 };
        labels.push(y as u32);
        vectors.push(sign * rng.random_range(0.5f32..2.0));
        vectors.push(rng.random_range(-1.0f32..1.0));
    }
    let toy = EmbeddingDataset::new(2, 2, labels, vectors).unwrap();
    let trained = train(LinearModel::zeros(2, 2), &toy, &TrainConfig::default()).unwrap();
    let acc = evaluate(&trained.model, &toy, None).unwrap().accuracy;
    check(acc == 100.0, || {
        format!("separable toy reached only {acc}%")
    })?;
    let again = train(LinearModel::zeros(2, 2), &toy, &TrainConfig::default()).unwrap();
    check(again == trained, || "retraining changed the model".into())?;

    let (tr, ev) = generate(&SynthSpec {
        k: 4,
        d: 8,
        per_class: 60,
        within_scale: 2.0,
        seed: 4,
        ..Default::default()
    })
    .unwrap();
    let mut spec = ExperimentSpec::new(8, AugmentPlan::new(Method::Ge3));
    spec.train.epochs = 10;
    let specs = vec![
        spec.with_method(Method::None),
        spec.clone(),
        spec.with_method(Method::GaussianNoise),
    ];
    let one = with_jobs(1, || run_conditions(&tr, &ev, &specs))
        .unwrap()
        .unwrap();
    let four = with_jobs(4, || run_conditions(&tr, &ev, &specs))
        .unwrap()
        .unwrap();
    check(one == four, || {
        "results differ between 1 and 4 workers".into()
    })?;
    let bits = |rs: &[hexaug::RunResult]| -> Vec<u64> {
        rs.iter()
            .flat_map(|r| r.seeds.iter().map(|s| s.accuracy.to_bits()))
            .collect()
    };
    check(bits(&one) == bits(&four), || {
        "accuracy bits differ across workers".into()
    })?;

    within_budget(start.elapsed(), 30)?;
    Ok(format!(
        "max gradient rel err {worst_rel:.2e}; toy acc {acc}%; deterministic across reruns and jobs 1/4; {:.2?}",
        start.elapsed()
    ))
}

/// Desk-scale benchmark shared by the directional criteria.
fn bench_data() -> (EmbeddingDataset, EmbeddingDataset) {
    generate(&SynthSpec {
        k: 8,
        d: 32,
        per_class: 200,
        mean_scale: 1.0,
        covariance_mode: CovarianceMode::Shared,
        within_scale: 3.0,
        seed: 0,
    })
    .unwrap()
}

fn bench_spec(n_few: usize) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(n_few, AugmentPlan::new(Method::Ge3));
    spec.seeds = (0..10).collect();
    spec
}

fn end_to_end_direction() -> Outcome {
    let start = Instant::now();
    let (tr, ev) = bench_data();
    let spec = bench_spec(10);
    let specs = vec![
        spec.with_method(Method::None),
        spec.clone(),
        spec.with_method(Method::GaussianNoise),
    ];
    let rs = run_conditions(&tr, &ev, &specs).map_err(|e| e.to_string())?;
    let (base, ge3, gauss) = (&rs[0], &rs[1], &rs[2]);
    check((60.0..=85.0).contains(&base.mean), || {
        format!(
            "baseline {:.2}% outside the 60-85% calibration band",
            base.mean
        )
    })?;
    let gain = ge3.mean - base.mean;
    check(gain >= 3.0, || format!("GE3 gain {gain:.2} < 3 points"))?;
    let between = gauss.mean >= base.mean.min(ge3.mean) && gauss.mean <= base.mean.max(ge3.mean);
    let near_base = (gauss.mean - base.mean).abs() <= base.std.max(gauss.std);
    let near_ge3 = (gauss.mean - ge3.mean).abs() <= ge3.std.max(gauss.std);
    check(between || near_base || near_ge3, || {
        format!(
            "gaussian {:.2}±{:.2} not between baseline {:.2}±{:.2} and GE3 {:.2}±{:.2}",
            gauss.mean, gauss.std, base.mean, base.std, ge3.mean, ge3.std
        )
    })?;
    within_budget(start.elapsed(), 120)?;
    Ok(format!(
        "baseline {:.2}±{:.2}, GE3 {:.2}±{:.2} (+{gain:.2}), gaussian {:.2}±{:.2}; {:.2?}",
        base.mean,
        base.std,
        ge3.mean,
        ge3.std,
        gauss.mean,
        gauss.std,
        start.elapsed()
    ))
}

fn naug_trend() -> Outcome {
    let start = Instant::now();
    let (tr, ev) = bench_data();
    let ab = ablate_naug(&tr, &ev, &bench_spec(10), &[2, 7]).map_err(|e| e.to_string())?;
    let (two, all) = (&ab.points[0], &ab.points[1]);
    let tol = two.improvement_std.max(all.improvement_std);
    check(all.improvement >= two.improvement - tol, || {
        format!(
            "improvement at n_aug=7 ({:.2}) below n_aug=2 ({:.2}) by more than {tol:.2}",
            all.improvement, two.improvement
        )
    })?;
    within_budget(start.elapsed(), 180)?;
    Ok(format!(
        "improvement n_aug=2: {:.2}±{:.2}, n_aug=7: {:.2}±{:.2}; {:.2?}",
        two.improvement,
        two.improvement_std,
        all.improvement,
        all.improvement_std,
        start.elapsed()
    ))
}

fn nfew_trend() -> Outcome {
    let start = Instant::now();
    let (tr, ev) = bench_data();
    let values = [5, 10, 20, 40];
    let rs = ablate_nfew(&tr, &ev, &bench_spec(10), &values, &[Method::Ge3])
        .map_err(|e| e.to_string())?;
    // Results alternate baseline, GE3 for each n_few.
    let base: Vec<_> = rs.iter().step_by(2).collect();
    let ge3: Vec<_> = rs.iter().skip(1).step_by(2).collect();
    for series in [&base, &ge3] {
        for w in series.windows(2) {
            let tol = w[0].std.max(w[1].std);
            check(w[1].mean >= w[0].mean - tol, || {
                format!(
                    "{} accuracy drops from n_few={} ({:.2}) to n_few={} ({:.2})",
                    w[0].method, w[0].n_few, w[0].mean, w[1].n_few, w[1].mean
                )
            })?;
        }
    }
    let (gap_lo, sd_lo) = paired_improvement(base[0], ge3[0]).map_err(|e| e.to_string())?;
    let (gap_hi, sd_hi) = paired_improvement(base[3], ge3[3]).map_err(|e| e.to_string())?;
    check(gap_lo >= gap_hi - sd_lo.max(sd_hi), || {
        format!("gap at n_few=5 ({gap_lo:.2}) below gap at n_few=40 ({gap_hi:.2})")
    })?;
    within_budget(start.elapsed(), 180)?;
    let fmt = |s: &[&hexaug::RunResult]| {
        s.iter()
            .map(|r| format!("{:.1}", r.mean))
            .collect::<Vec<_>>()
            .join("/")
    };
    Ok(format!(
        "baseline {} GE3 {} over n_few 5/10/20/40; gap {gap_lo:.2} -> {gap_hi:.2}; {:.2?}",
        fmt(&base),
        fmt(&ge3),
        start.elapsed()
    ))
}

fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let mut c = vec![vec![0.0; d]; d];
    for r in rows {
        for a in 0..d {
            for b in 0..d {
                c[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]);
            }
        }
    }
    c.iter_mut().flatten().for_each(|v| *v /= n);
    c
}

fn frobenius(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn diag(v: &[f64]) -> Vec<Vec<f64>> {
    (0..v.len())
        .map(|i| {
            (0..v.len())
                .map(|j| if i == j { v[i] * v[i] } else { 0.0 })
                .collect()
        })
        .collect()
}

fn inductive_bias_falsification() -> Outcome {
    let start = Instant::now();
    let spec = SynthSpec {
        k: 4,
        d: 8,
        per_class: 4000,
        covariance_mode: CovarianceMode::PerClass,
        within_scale: 1.0,
        seed: 21,
        ..Default::default()
    };
    let geo = geometry(&spec).unwrap();
    let (tr, _) = generate(&spec).unwrap();
    let true_cov: Vec<_> = geo.stds.iter().map(|s| diag(s)).collect();

    // Most mismatched (donor, target) pair.
    let (mut donor, mut target, mut gap) = (0, 1, 0.0);
    for s in 0..spec.k {
        for t in 0..spec.k {
            let g = frobenius(&true_cov[s], &true_cov[t]);
            if s != t && g > gap {
                (donor, target, gap) = (s, t, g);
            }
        }
    }
    let stats = class_means(&tr).unwrap();
    let batch = ge3_augment_all(&tr, &stats, &AugmentPlan::new(Method::Ge3)).unwrap();
    let rows: Vec<Vec<f64>> = (0..batch.len())
        .filter(|&r| {
            batch.labels()[r] as usize == target
                && batch.provenance()[r].source_class as usize == donor
        })
        .map(|r| batch.row(r).iter().map(|&v| v as f64).collect())
        .collect();
    let n = rows.len() as f64;
    let cov = covariance(&rows);
    let to_donor = frobenius(&cov, &true_cov[donor]);
    let to_target = frobenius(&cov, &true_cov[target]);
    // Sampling std of a Gaussian covariance estimate: Var(C_ab) = (S_aa S_bb + S_ab^2) / n.
    let s = &true_cov[donor];
    let sampling: f64 = (0..spec.d)
        .flat_map(|a| (0..spec.d).map(move |b| (a, b)))
        .map(|(a, b)| (s[a][a] * s[b][b] + s[a][b].powi(2)) / n)
        .sum::<f64>()
        .sqrt();
    let tol = 4.0 * sampling;
    check(to_donor <= tol, || {
        format!("batch covariance {to_donor:.3} from donor, tolerance {tol:.3}")
    })?;
    check(to_target > 5.0 * tol, || {
        format!("batch covariance only {to_target:.3} from target (tolerance {tol:.3})")
    })?;
    Ok(format!(
        "class {donor} -> {target}: distance to donor cov {to_donor:.3} (tol {tol:.3}), to target cov {to_target:.3}; {:.2?}",
        start.elapsed()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("ge3-algebra", ge3_algebra),
        ("operator-oracles", operator_oracles),
        ("trainer-correctness", trainer_correctness),
        ("end-to-end-direction", end_to_end_direction),
        ("n_aug-trend", naug_trend),
        ("n_few-trend", nfew_trend),
        ("inductive-bias-falsification", inductive_bias_falsification),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
