//! Multi-seed experiment protocol, ablations and reports.
//!
//! For every seed the pipeline is: restrict half the classes to `n_few`
//! examples, augment according to the plan (class statistics come from the
//! restricted set), upsample any residual imbalance, train the softmax layer,
//! and evaluate on the fixed eval set. The seed drives every random choice,
//! including which classes get restricted.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{apply_plan, AugmentPlan, Method, NAug};
use crate::classifier::{evaluate, train, LinearModel, TrainConfig};
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result, StageExt};
use crate::imbalance::{make_imbalanced, upsample_balance, ImbalanceSpec};

/// Ordered pipeline stages, recorded in every report.
pub const PIPELINE: [&str; 6] = [
    "restrict floor(k/2) classes to n_few (re-drawn per seed)",
    "class statistics on the restricted set",
    "augment per plan",
    "upsample residual imbalance to the largest class",
    "train softmax layer (frozen embeddings)",
    "evaluate on the fixed eval set",
];

pub const REPORT_NOTES: [&str; 4] = [
    "std is the population standard deviation over seeds",
    "improvement_std is the population std of per-seed paired differences",
    "odd k restricts floor(k/2) classes",
    "within-extrapolation default form is lambda*(xi-xj)+xi",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub n_few: usize,
    pub plan: AugmentPlan,
    pub train: TrainConfig,
    pub seeds: Vec<u64>,
}

impl ExperimentSpec {
    /// Five seeds `0..5` and default training settings.
    pub fn new(n_few: usize, plan: AugmentPlan) -> Self {
        Self {
            n_few,
            plan,
            train: TrainConfig::default(),
            seeds: (0..5).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Validation("at least one seed is required".into()));
        }
        let distinct: HashSet<u64> = self.seeds.iter().copied().collect();
        if distinct.len() != self.seeds.len() {
            return Err(Error::Validation(format!(
                "seeds must be distinct: {:?}",
                self.seeds
            )));
        }
        self.train.validate()
    }

    /// Same settings under a different method. Shared numeric parameters carry
    /// over; `n_aug` falls back to the method's default unless the method is
    /// unchanged.
    pub fn with_method(&self, method: Method) -> Self {
        let mut out = self.clone();
        if method != self.plan.method {
            out.plan = AugmentPlan {
                method,
                n_aug: AugmentPlan::new(method).n_aug,
                ..self.plan.clone()
            };
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub accuracy: f64,
    pub acc_restricted: Option<f64>,
    pub acc_unrestricted: Option<f64>,
    pub per_class: Vec<Option<f64>>,
    /// Rows after restriction, augmentation and upsampling.
    pub train_rows: usize,
    pub augmented_rows: usize,
    pub final_loss: Option<f64>,
    pub imbalance: ImbalanceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub method: Method,
    pub n_few: usize,
    /// `None` for the plain upsampling baseline.
    pub n_aug: Option<NAug>,
    pub spec: ExperimentSpec,
    pub seeds: Vec<SeedResult>,
    pub mean: f64,
    pub std: f64,
    pub mean_restricted: Option<f64>,
    pub mean_unrestricted: Option<f64>,
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Option<Vec<f64>> = values.collect();
    v.map(|v| mean_std(&v).0)
}

impl RunResult {
    fn from_seeds(spec: &ExperimentSpec, seeds: Vec<SeedResult>) -> Self {
        let acc: Vec<f64> = seeds.iter().map(|s| s.accuracy).collect();
        let (mean, std) = mean_std(&acc);
        Self {
            method: spec.plan.method,
            n_few: spec.n_few,
            n_aug: (spec.plan.method != Method::None).then_some(spec.plan.n_aug),
            spec: spec.clone(),
            mean,
            std,
            mean_restricted: mean_of(seeds.iter().map(|s| s.acc_restricted)),
            mean_unrestricted: mean_of(seeds.iter().map(|s| s.acc_unrestricted)),
            seeds,
        }
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.seeds.iter().map(|s| s.accuracy).collect()
    }

    pub fn n_aug_label(&self) -> String {
        self.n_aug.map(|n| n.to_string()).unwrap_or_default()
    }
}

fn check_pair(train: &EmbeddingDataset, eval: &EmbeddingDataset) -> Result<()> {
    if train.dim() != eval.dim() || train.num_classes() != eval.num_classes() {
        return Err(Error::Validation(format!(
            "train (d={}, k={}) and eval (d={}, k={}) disagree",
            train.dim(),
            train.num_classes(),
            eval.dim(),
            eval.num_classes()
        )));
    }
    if eval.is_empty() {
        return Err(Error::Validation("eval set is empty".into()));
    }
    Ok(())
}

fn run_seed(
    train_ds: &EmbeddingDataset,
    eval_ds: &EmbeddingDataset,
    spec: &ExperimentSpec,
    seed: u64,
) -> Result<SeedResult> {
    let (restricted, imbalance) =
        make_imbalanced(train_ds, spec.n_few, seed).stage(seed, "imbalance")?;
    let plan = spec.plan.clone().with_seed(seed);
    let batch = apply_plan(&restricted, &plan).stage(seed, "augment")?;
    let augmented = batch.union_with(&restricted).stage(seed, "augment")?;
    let balanced = upsample_balance(&augmented, seed).stage(seed, "upsample")?;
    let cfg = TrainConfig {
        seed,
        ..spec.train.clone()
    };
    let init =
        LinearModel::init(balanced.num_classes(), balanced.dim(), &cfg).stage(seed, "train")?;
    let trained = train(init, &balanced, &cfg).stage(seed, "train")?;
    let eval = evaluate(&trained.model, eval_ds, Some(&imbalance)).stage(seed, "evaluate")?;
    Ok(SeedResult {
        seed,
        accuracy: eval.accuracy,
        acc_restricted: eval.acc_restricted,
        acc_unrestricted: eval.acc_unrestricted,
        per_class: eval.per_class,
        train_rows: balanced.len(),
        augmented_rows: batch.len(),
        final_loss: trained.epoch_losses.last().copied(),
        imbalance,
    })
}

/// Runs several conditions, fanning every `(condition, seed)` job out to the
/// current rayon pool. Results come back in input order.
pub fn run_conditions(
    train_ds: &EmbeddingDataset,
    eval_ds: &EmbeddingDataset,
    specs: &[ExperimentSpec],
) -> Result<Vec<RunResult>> {
    check_pair(train_ds, eval_ds)?;
    for spec in specs {
        spec.validate()?;
        spec.plan.validate(train_ds.num_classes())?;
    }
    let jobs: Vec<(usize, u64)> = specs
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.seeds.iter().map(move |&seed| (i, seed)))
        .collect();
    let outcomes: Vec<SeedResult> = jobs
        .par_iter()
        .map(|&(i, seed)| run_seed(train_ds, eval_ds, &specs[i], seed))
        .collect::<Result<_>>()?;
    let mut outcomes = outcomes.into_iter();
    Ok(specs
        .iter()
        .map(|spec| RunResult::from_seeds(spec, outcomes.by_ref().take(spec.seeds.len()).collect()))
        .collect())
}

pub fn run_condition(
    train_ds: &EmbeddingDataset,
    eval_ds: &EmbeddingDataset,
    spec: &ExperimentSpec,
) -> Result<RunResult> {
    Ok(run_conditions(train_ds, eval_ds, std::slice::from_ref(spec))?.remove(0))
}

/// The upsampling baseline followed by the requested condition (unless the
/// request is the baseline itself).
pub fn run_with_baseline(
    train_ds: &EmbeddingDataset,
    eval_ds: &EmbeddingDataset,
    spec: &ExperimentSpec,
) -> Result<Vec<RunResult>> {
    let mut specs = vec![spec.with_method(Method::None)];
    if spec.plan.method != Method::None {
        specs.push(spec.clone());
    }
    run_conditions(train_ds, eval_ds, &specs)
}

/// Runs `f` on a dedicated pool of `jobs` worker threads.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Mean and population std of per-seed paired differences `aug - base`.
pub fn paired_improvement(base: &RunResult, aug: &RunResult) -> Result<(f64, f64)> {
    if base.spec.seeds != aug.spec.seeds {
        return Err(Error::Validation(
            "improvement needs identical seed lists".into(),
        ));
    }
    let diffs: Vec<f64> = aug
        .seeds
        .iter()
        .zip(&base.seeds)
        .map(|(a, b)| a.accuracy - b.accuracy)
        .collect();
    Ok(mean_std(&diffs))
}

/// One result per `(n_few, method)`; the baseline is always included.
pub fn ablate_nfew(
    train_ds: &EmbeddingDataset,
    eval_ds: &EmbeddingDataset,
    base: &ExperimentSpec,
    values: &[usize],
    methods: &[Method],
) -> Result<Vec<RunResult>> {
    let mut all_methods = vec![Method::None];
    all_methods.extend(methods.iter().copied().filter(|&m| m != Method::None));
    all_methods.dedup();
    let mut specs = Vec::with_capacity(values.len() * all_methods.len());
    for &n_few in values {
        let counts = train_ds.class_counts();
        if let Some(min) = counts.iter().min().filter(|&&m| m < n_few) {
            return Err(Error::Capacity(format!(
                "n_few={n_few} exceeds the smallest class ({min})"
            )));
        }
        for &m in &all_methods {
            let mut s = base.with_method(m);
            s.n_few = n_few;
            specs.push(s);
        }
    }
    run_conditions(train_ds, eval_ds, &specs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NAugPoint {
    pub n_aug: u32,
    pub result: RunResult,
    pub improvement: f64,
    pub improvement_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NAugAblation {
    pub method: Method,
    pub baseline: RunResult,
    pub points: Vec<NAugPoint>,
}

/// Sweeps `n_aug` for the base spec's method: donor-class count for GE3,
/// multiplier on the largest class for the within-class methods.
pub fn ablate_naug(
    train_ds: &EmbeddingDataset,
    eval_ds: &EmbeddingDataset,
    base: &ExperimentSpec,
    values: &[u32],
) -> Result<NAugAblation> {
    let method = base.plan.method;
    if method == Method::None {
        return Err(Error::Plan(
            "n_aug ablation needs an augmentation method".into(),
        ));
    }
    let mut specs = vec![base.with_method(Method::None)];
    for &v in values {
        let mut s = base.clone();
        s.plan.n_aug = NAug::Count(v);
        s.plan.validate(train_ds.num_classes())?;
        specs.push(s);
    }
    let mut results = run_conditions(train_ds, eval_ds, &specs)?.into_iter();
    let baseline = results.next().expect("baseline present");
    let points = values
        .iter()
        .zip(results)
        .map(|(&n_aug, result)| {
            let (improvement, improvement_std) = paired_improvement(&baseline, &result)?;
            Ok(NAugPoint {
                n_aug,
                result,
                improvement,
                improvement_std,
            })
        })
        .collect::<Result<_>>()?;
    Ok(NAugAblation {
        method,
        baseline,
        points,
    })
}

/// One line of the per-seed report CSV. Aggregate rows use `seed = "agg"`,
/// carry the seed mean in the accuracy columns and fill `mean` / `std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub n_few: usize,
    pub n_aug: String,
    pub seed: String,
    pub accuracy: f64,
    pub acc_restricted: Option<f64>,
    pub acc_unrestricted: Option<f64>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

pub fn report_rows(results: &[RunResult]) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for r in results {
        for s in &r.seeds {
            rows.push(ReportRow {
                method: r.method.to_string(),
                n_few: r.n_few,
                n_aug: r.n_aug_label(),
                seed: s.seed.to_string(),
                accuracy: s.accuracy,
                acc_restricted: s.acc_restricted,
                acc_unrestricted: s.acc_unrestricted,
                mean: None,
                std: None,
            });
        }
        rows.push(ReportRow {
            method: r.method.to_string(),
            n_few: r.n_few,
            n_aug: r.n_aug_label(),
            seed: "agg".into(),
            accuracy: r.mean,
            acc_restricted: r.mean_restricted,
            acc_unrestricted: r.mean_unrestricted,
            mean: Some(r.mean),
            std: Some(r.std),
        });
    }
    rows
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    for row in rows {
        wtr.serialize(row)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

pub fn read_report_csv(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::Format(format!("{}: {e}", path.display()))))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub pipeline: &'static [&'static str],
    pub notes: &'static [&'static str],
    pub config: &'a serde_json::Value,
    pub results: &'a [RunResult],
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Writes `<prefix>.csv` (per-seed and aggregate rows) and `<prefix>.json`
/// (full provenance including the resolved `config`).
pub fn emit_report(
    results: &[RunResult],
    prefix: impl AsRef<Path>,
    config: &serde_json::Value,
) -> Result<(PathBuf, PathBuf)> {
    if results.is_empty() {
        return Err(Error::Validation("no results to report".into()));
    }
    let prefix = prefix.as_ref();
    let csv_path = with_extension(prefix, "csv");
    let json_path = with_extension(prefix, "json");
    write_csv(&csv_path, &report_rows(results))?;
    write_json(
        &json_path,
        &Provenance {
            tool: "hexaug",
            version: env!("CARGO_PKG_VERSION"),
            pipeline: &PIPELINE,
            notes: &REPORT_NOTES,
            config,
            results,
        },
    )?;
    Ok((csv_path, json_path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NFewRow {
    pub method: String,
    pub n_few: usize,
    pub mean: f64,
    pub std: f64,
}

/// `method,n_few,mean,std`, one row per result.
pub fn write_nfew_csv(path: impl AsRef<Path>, results: &[RunResult]) -> Result<()> {
    let rows: Vec<NFewRow> = results
        .iter()
        .map(|r| NFewRow {
            method: r.method.to_string(),
            n_few: r.n_few,
            mean: r.mean,
            std: r.std,
        })
        .collect();
    write_csv(path.as_ref(), &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NAugRow {
    pub method: String,
    pub n_aug: u32,
    pub mean: f64,
    pub std: f64,
    pub improvement: f64,
    pub improvement_std: f64,
}

/// `method,n_aug,mean,std,improvement,improvement_std`.
pub fn write_naug_csv(path: impl AsRef<Path>, ablation: &NAugAblation) -> Result<()> {
    let rows: Vec<NAugRow> = ablation
        .points
        .iter()
        .map(|p| NAugRow {
            method: ablation.method.to_string(),
            n_aug: p.n_aug,
            mean: p.result.mean,
            std: p.result.std,
            improvement: p.improvement,
            improvement_std: p.improvement_std,
        })
        .collect();
    write_csv(path.as_ref(), &rows)
}
