mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use hexaug::classifier::{evaluate, train, Evaluation};
use hexaug::dataset::stratified_split;
use hexaug::experiment::{
    ablate_naug, ablate_nfew, emit_report, run_with_baseline, with_jobs, write_naug_csv,
    write_nfew_csv,
};
use hexaug::imbalance::{make_imbalanced, upsample_balance};
use hexaug::io::{
    import_csv, load_embeddings, save_embeddings_with_manifest, DatasetManifest, SplitRole,
};
use hexaug::synth::generate;
use hexaug::{
    AugmentPlan, CovarianceMode, EmbeddingDataset, ExperimentSpec, ImbalanceSpec, LinearModel,
    Method, NAug, SynthSpec, TrainConfig,
};

use config::{Resolver, UsageError};

#[derive(Parser)]
#[command(
    name = "hexaug",
    version,
    about = "Embedding-space augmentation and class-imbalance experiments"
)]
struct Cli {
    /// JSON object of option values keyed like the flags (snake_case); explicit flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print how every option was resolved
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic Gaussian class clusters as train and eval EMB1 files
    Synth(SynthArgs),
    /// Convert a `label,f0,...,f{d-1}` CSV into an EMB1 file
    Import(ImportArgs),
    /// Stratified, non-overlapping train/eval split of an EMB1 file
    Split(SplitArgs),
    /// Restrict floor(k/2) random classes to n_few examples
    Imbalance(ImbalanceArgs),
    /// Generate augmented rows for a dataset
    Augment(AugmentCmd),
    /// Train the softmax classifier and write an LMD1 checkpoint
    Train(TrainCmd),
    /// Evaluate an LMD1 checkpoint on an EMB1 file
    Eval(EvalArgs),
    /// Multi-seed run of one augmentation method against the upsampling baseline
    Experiment(ExperimentArgs),
    /// Sweep n_few or n_aug
    Ablate(AblateArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of classes [default: 8]
    #[arg(long)]
    k: Option<usize>,
    /// Embedding dimension [default: 32]
    #[arg(long)]
    d: Option<usize>,
    /// Rows per class in each of the train and eval sets [default: 200]
    #[arg(long)]
    per_class: Option<usize>,
    /// Standard deviation of the class-mean coordinates [default: 1.0]
    #[arg(long)]
    mean_scale: Option<f64>,
    /// Covariance mode: shared or per_class [default: shared]
    #[arg(long)]
    cov: Option<CovarianceMode>,
    /// Scale of the within-class standard deviations [default: 1.0]
    #[arg(long)]
    within_scale: Option<f64>,
    /// Random seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output EMB1 path for the training set (required)
    #[arg(long)]
    train_out: Option<PathBuf>,
    /// Output EMB1 path for the eval set (required)
    #[arg(long)]
    eval_out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportArgs {
    /// Input CSV with rows `label,f0,...,f{d-1}` and a header line (required)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Embedding dimension d (required)
    #[arg(long)]
    dim: Option<usize>,
    /// Output EMB1 path (required)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Free-form source description for the sidecar [default: the CSV path]
    #[arg(long)]
    source: Option<String>,
}

#[derive(Args)]
struct SplitArgs {
    /// Input EMB1 path (required)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Training rows per class (required)
    #[arg(long)]
    per_class_train: Option<usize>,
    /// Eval rows per class (required)
    #[arg(long)]
    per_class_eval: Option<usize>,
    /// Random seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output EMB1 path for the training split (required)
    #[arg(long)]
    train_out: Option<PathBuf>,
    /// Output EMB1 path for the eval split (required)
    #[arg(long)]
    eval_out: Option<PathBuf>,
}

#[derive(Args)]
struct ImbalanceArgs {
    /// Input EMB1 path (required)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Examples kept per restricted class [default: 20]
    #[arg(long)]
    n_few: Option<usize>,
    /// Random seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Also duplicate rows until every class matches the largest [default: false]
    #[arg(long)]
    upsample: bool,
    /// Output EMB1 path (required); the restriction is written to `<out>.imbalance.json`
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    /// Augmentation method: none, ge3, interpolate, within_extrapolate, linear_delta, uniform_noise, gaussian_noise [default: ge3]
    #[arg(long)]
    method: Option<Method>,
    /// Donor classes for ge3 (a count or "all"), or the multiplier on the largest class for the
    /// within-class methods [default: all for ge3, 5 otherwise]
    #[arg(long)]
    n_aug: Option<NAug>,
    /// Within-extrapolation strength [default: 0.5]
    #[arg(long)]
    lambda: Option<f64>,
    /// Use lambda*(xi+xj)-xi instead of lambda*(xi-xj)+xi [default: false]
    #[arg(long)]
    literal_within_form: bool,
    /// Lower bound of the uniform noise [default: -0.1]
    #[arg(long, allow_negative_numbers = true)]
    uniform_low: Option<f64>,
    /// Upper bound of the uniform noise [default: 0.1]
    #[arg(long, allow_negative_numbers = true)]
    uniform_high: Option<f64>,
    /// Mean of the Gaussian noise [default: 0.0]
    #[arg(long, allow_negative_numbers = true)]
    gaussian_mean: Option<f64>,
    /// Standard deviation of the Gaussian noise [default: 0.1]
    #[arg(long)]
    gaussian_sigma: Option<f64>,
}

#[derive(Args)]
struct TrainArgs {
    /// SGD learning rate [default: 0.05]
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Minibatch size [default: 64]
    #[arg(long)]
    batch_size: Option<usize>,
    /// Passes over the training set [default: 30]
    #[arg(long)]
    epochs: Option<usize>,
    /// L2 penalty on the weights [default: 0.0001]
    #[arg(long)]
    l2: Option<f64>,
    /// Std of the initial weights; 0 means zero initialization [default: 0.0]
    #[arg(long)]
    init_scale: Option<f64>,
}

#[derive(Args)]
struct AugmentCmd {
    /// Input EMB1 path (required)
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    plan: PlanArgs,
    /// Random seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output EMB1 path for the generated rows (required); provenance goes to `<out>.provenance.json`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional EMB1 path for the original rows followed by the generated ones
    #[arg(long)]
    union_out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainCmd {
    /// Training EMB1 path (required)
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    train: TrainArgs,
    /// Random seed for initialization and shuffling [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output LMD1 checkpoint path (required)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// LMD1 checkpoint path (required)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Eval EMB1 path (required)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Restriction written by `imbalance`, to report restricted and unrestricted accuracy
    #[arg(long)]
    imbalance: Option<PathBuf>,
    /// Optional path for the full evaluation as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Training EMB1 path (required)
    #[arg(long)]
    train: Option<PathBuf>,
    /// Eval EMB1 path (required)
    #[arg(long)]
    eval: Option<PathBuf>,
    /// Examples kept per restricted class [default: 20]
    #[arg(long)]
    n_few: Option<usize>,
    /// Number of seeds; runs seeds 0..N [default: 5]
    #[arg(long)]
    seeds: Option<u64>,
    /// Worker threads; results do not depend on it [default: available cores]
    #[arg(long, env = "HEXAUG_JOBS")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    plan: PlanArgs,
    #[command(flatten)]
    train: TrainArgs,
    /// Report prefix; writes `<report>.csv` and `<report>.json` [default: report]
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum Sweep {
    NFew,
    NAug,
}

#[derive(Args)]
struct AblateArgs {
    /// Parameter to sweep (required)
    #[arg(long, value_enum)]
    param: Option<Sweep>,
    /// Comma-separated values of the swept parameter (required)
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<u32>>,
    /// Comma-separated methods compared against the baseline in an n-few sweep [default: ge3]
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    plan: PlanArgs,
    #[command(flatten)]
    train: TrainArgs,
    /// Output prefix; writes `<out>.csv`, `<out>.json` and the summary `<out>.summary.csv` [default: ablation]
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Import(_) => "import",
            Command::Split(_) => "split",
            Command::Imbalance(_) => "imbalance",
            Command::Augment(_) => "augment",
            Command::Train(_) => "train",
            Command::Eval(_) => "eval",
            Command::Experiment(_) => "experiment",
            Command::Ablate(_) => "ablate",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            let msg = match e.downcast_ref::<hexaug::Error>() {
                Some(inner) => inner.to_string(),
                None => format!("{e:#}"),
            };
            eprintln!("error: {name}: {}", msg.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut r = Resolver::load(cli.config.as_deref())?;
    let v = cli.verbose;
    match cli.command {
        Command::Synth(a) => synth(a, r, v),
        Command::Import(a) => import(a, r, v),
        Command::Split(a) => split(a, r, v),
        Command::Imbalance(a) => imbalance(a, r, v),
        Command::Augment(a) => augment(a, r, v),
        Command::Train(a) => train_cmd(a, r, v),
        Command::Eval(a) => eval(a, r, v),
        Command::Experiment(a) => {
            let out = experiment(a, &mut r)?;
            finish_run(r, "experiment", v, out)
        }
        Command::Ablate(a) => {
            let out = ablate(a, &mut r)?;
            finish_run(r, "ablate", v, out)
        }
    }
}

fn save(
    ds: &EmbeddingDataset,
    path: &Path,
    source: &str,
    split: Option<SplitRole>,
    notes: Option<Value>,
) -> Result<()> {
    let manifest = DatasetManifest {
        source: source.to_string(),
        split,
        notes,
        ..DatasetManifest::for_dataset(ds)
    };
    Ok(save_embeddings_with_manifest(ds, path, &manifest)?)
}

fn synth(a: SynthArgs, mut r: Resolver, verbose: bool) -> Result<()> {
    let d = SynthSpec::default();
    let spec = SynthSpec {
        k: r.get("k", a.k, d.k)?,
        d: r.get("d", a.d, d.d)?,
        per_class: r.get("per_class", a.per_class, d.per_class)?,
        mean_scale: r.get("mean_scale", a.mean_scale, d.mean_scale)?,
        covariance_mode: r.get("cov", a.cov, d.covariance_mode)?,
        within_scale: r.get("within_scale", a.within_scale, d.within_scale)?,
        seed: r.get("seed", a.seed, d.seed)?,
    };
    let train_out: PathBuf = r.required("train_out", a.train_out)?;
    let eval_out: PathBuf = r.required("eval_out", a.eval_out)?;
    r.finish("synth", verbose)?;
    let (train, eval) = generate(&spec)?;
    let notes = serde_json::to_value(&spec)?;
    save(
        &train,
        &train_out,
        "synth",
        Some(SplitRole::Train),
        Some(notes.clone()),
    )?;
    save(
        &eval,
        &eval_out,
        "synth",
        Some(SplitRole::Eval),
        Some(notes),
    )?;
    println!(
        "wrote {} ({} rows) and {} ({} rows)",
        train_out.display(),
        train.len(),
        eval_out.display(),
        eval.len()
    );
    Ok(())
}

fn import(a: ImportArgs, mut r: Resolver, verbose: bool) -> Result<()> {
    let csv: PathBuf = r.required("csv", a.csv)?;
    let dim: usize = r.required("dim", a.dim)?;
    let out: PathBuf = r.required("out", a.out)?;
    let source = r.get("source", a.source, csv.display().to_string())?;
    r.finish("import", verbose)?;
    let ds = import_csv(&csv, dim)?;
    save(&ds, &out, &source, None, None)?;
    println!(
        "wrote {} ({} rows, k={}, d={})",
        out.display(),
        ds.len(),
        ds.num_classes(),
        ds.dim()
    );
    Ok(())
}

fn split(a: SplitArgs, mut r: Resolver, verbose: bool) -> Result<()> {
    let input: PathBuf = r.required("input", a.input)?;
    let per_train: usize = r.required("per_class_train", a.per_class_train)?;
    let per_eval: usize = r.required("per_class_eval", a.per_class_eval)?;
    let seed = r.get("seed", a.seed, 0u64)?;
    let train_out: PathBuf = r.required("train_out", a.train_out)?;
    let eval_out: PathBuf = r.required("eval_out", a.eval_out)?;
    r.finish("split", verbose)?;
    let ds = load_embeddings(&input)?;
    let (train, eval) = stratified_split(&ds, per_train, per_eval, seed)?;
    let source = input.display().to_string();
    save(&train, &train_out, &source, Some(SplitRole::Train), None)?;
    save(&eval, &eval_out, &source, Some(SplitRole::Eval), None)?;
    println!(
        "wrote {} ({} rows) and {} ({} rows)",
        train_out.display(),
        train.len(),
        eval_out.display(),
        eval.len()
    );
    Ok(())
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn imbalance(a: ImbalanceArgs, mut r: Resolver, verbose: bool) -> Result<()> {
    let input: PathBuf = r.required("input", a.input)?;
    let n_few = r.get("n_few", a.n_few, 20usize)?;
    let seed = r.get("seed", a.seed, 0u64)?;
    let upsample = r.get("upsample", a.upsample.then_some(true), false)?;
    let out: PathBuf = r.required("out", a.out)?;
    r.finish("imbalance", verbose)?;
    let ds = load_embeddings(&input)?;
    let (mut restricted, spec) = make_imbalanced(&ds, n_few, seed)?;
    if upsample {
        restricted = upsample_balance(&restricted, seed)?;
    }
    let notes = serde_json::to_value(&spec)?;
    save(
        &restricted,
        &out,
        &input.display().to_string(),
        Some(SplitRole::Train),
        Some(notes),
    )?;
    let spec_path = sidecar(&out, ".imbalance.json");
    std::fs::write(&spec_path, serde_json::to_string_pretty(&spec)? + "\n")
        .with_context(|| format!("writing {}", spec_path.display()))?;
    println!(
        "wrote {} ({} rows; restricted classes {:?})",
        out.display(),
        restricted.len(),
        spec.restricted_classes
    );
    Ok(())
}

fn resolve_plan(p: PlanArgs, r: &mut Resolver) -> Result<AugmentPlan> {
    let method = r.get("method", p.method, Method::Ge3)?;
    let d = AugmentPlan::new(method);
    Ok(AugmentPlan {
        method,
        n_aug: r.get("n_aug", p.n_aug, d.n_aug)?,
        lambda: r.get("lambda", p.lambda, d.lambda)?,
        literal_within_form: r.get(
            "literal_within_form",
            p.literal_within_form.then_some(true),
            false,
        )?,
        uniform_bounds: (
            r.get("uniform_low", p.uniform_low, d.uniform_bounds.0)?,
            r.get("uniform_high", p.uniform_high, d.uniform_bounds.1)?,
        ),
        gaussian_params: (
            r.get("gaussian_mean", p.gaussian_mean, d.gaussian_params.0)?,
            r.get("gaussian_sigma", p.gaussian_sigma, d.gaussian_params.1)?,
        ),
        seed: 0,
    })
}

fn resolve_train(t: TrainArgs, r: &mut Resolver) -> Result<TrainConfig> {
    let d = TrainConfig::default();
    Ok(TrainConfig {
        learning_rate: r.get("learning_rate", t.learning_rate, d.learning_rate)?,
        batch_size: r.get("batch_size", t.batch_size, d.batch_size)?,
        epochs: r.get("epochs", t.epochs, d.epochs)?,
        l2: r.get("l2", t.l2, d.l2)?,
        init_scale: r.get("init_scale", t.init_scale, d.init_scale)?,
        seed: 0,
    })
}

fn augment(a: AugmentCmd, mut r: Resolver, verbose: bool) -> Result<()> {
    let input: PathBuf = r.required("input", a.input)?;
    let mut plan = resolve_plan(a.plan, &mut r)?;
    plan.seed = r.get("seed", a.seed, 0u64)?;
    let out: PathBuf = r.required("out", a.out)?;
    let union_out: Option<PathBuf> = r.optional("union_out", a.union_out)?;
    r.finish("augment", verbose)?;
    let ds = load_embeddings(&input)?;
    let batch = hexaug::augment::apply_plan(&ds, &plan)?;
    batch.save(&out, ds.num_classes())?;
    if let Some(path) = union_out {
        let union = batch.union_with(&ds)?;
        save(
            &union,
            &path,
            &input.display().to_string(),
            Some(SplitRole::Train),
            None,
        )?;
    }
    println!(
        "wrote {} ({} generated rows, method {})",
        out.display(),
        batch.len(),
        plan.method
    );
    Ok(())
}

fn train_cmd(a: TrainCmd, mut r: Resolver, verbose: bool) -> Result<()> {
    let input: PathBuf = r.required("input", a.input)?;
    let mut cfg = resolve_train(a.train, &mut r)?;
    cfg.seed = r.get("seed", a.seed, 0u64)?;
    let out: PathBuf = r.required("out", a.out)?;
    r.finish("train", verbose)?;
    let ds = load_embeddings(&input)?;
    let init = LinearModel::init(ds.num_classes(), ds.dim(), &cfg)?;
    let trained = train(init, &ds, &cfg)?;
    trained.model.save(&out)?;
    let acc = evaluate(&trained.model, &ds, None)?;
    println!(
        "wrote {}; final loss {:.6}, train accuracy {:.2}%",
        out.display(),
        trained.epoch_losses.last().copied().unwrap_or(f64::NAN),
        acc.accuracy
    );
    Ok(())
}

fn eval(a: EvalArgs, mut r: Resolver, verbose: bool) -> Result<()> {
    let model_path: PathBuf = r.required("model", a.model)?;
    let input: PathBuf = r.required("input", a.input)?;
    let imbalance_path: Option<PathBuf> = r.optional("imbalance", a.imbalance)?;
    let json_out: Option<PathBuf> = r.optional("json", a.json)?;
    r.finish("eval", verbose)?;
    let model = LinearModel::load(&model_path)?;
    let ds = load_embeddings(&input)?;
    let spec: Option<ImbalanceSpec> = match &imbalance_path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?)
        }
        None => None,
    };
    let e = evaluate(&model, &ds, spec.as_ref())?;
    print_evaluation(&e, ds.class_names());
    if let Some(p) = json_out {
        std::fs::write(&p, serde_json::to_string_pretty(&e)? + "\n")
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn print_evaluation(e: &Evaluation, names: &[String]) {
    println!("accuracy {:.2}% ({}/{})", e.accuracy, e.correct, e.total);
    if let (Some(a), Some(b)) = (e.acc_restricted, e.acc_unrestricted) {
        println!("restricted {a:.2}%, unrestricted {b:.2}%");
    }
    for (name, acc) in names.iter().zip(&e.per_class) {
        match acc {
            Some(acc) => println!("  {name}: {acc:.2}%"),
            None => println!("  {name}: n/a"),
        }
    }
}

struct Loaded {
    train: EmbeddingDataset,
    eval: EmbeddingDataset,
    base: ExperimentSpec,
    jobs: usize,
}

fn resolve_run(
    run: RunArgs,
    plan: PlanArgs,
    train_args: TrainArgs,
    r: &mut Resolver,
) -> Result<Loaded> {
    let train_path: PathBuf = r.required("train", run.train)?;
    let eval_path: PathBuf = r.required("eval", run.eval)?;
    let n_few = r.get("n_few", run.n_few, 20usize)?;
    let seeds = r.get("seeds", run.seeds, 5u64)?;
    let default_jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let jobs = r.get("jobs", run.jobs, default_jobs)?;
    let mut base = ExperimentSpec::new(n_few, resolve_plan(plan, r)?);
    base.train = resolve_train(train_args, r)?;
    base.seeds = (0..seeds).collect();
    Ok(Loaded {
        train: load_embeddings(&train_path)?,
        eval: load_embeddings(&eval_path)?,
        base,
        jobs,
    })
}

type Outputs = Box<dyn FnOnce(&Value) -> Result<()>>;

/// Resolves the options, then hands back the writer so the resolved config can
/// be echoed into the report.
fn finish_run(r: Resolver, command: &str, verbose: bool, write: Outputs) -> Result<()> {
    let mut config = r.finish(command, verbose)?;
    // The worker count never changes results, so it stays out of the report.
    config.as_object_mut().expect("object").remove("jobs");
    write(&config)
}

fn experiment(a: ExperimentArgs, r: &mut Resolver) -> Result<Outputs> {
    let l = resolve_run(a.run, a.plan, a.train, r)?;
    let prefix = r.get("report", a.report, PathBuf::from("report"))?;
    Ok(Box::new(move |config| {
        let results = with_jobs(l.jobs, || run_with_baseline(&l.train, &l.eval, &l.base))??;
        let (csv, json) = emit_report(&results, &prefix, config)?;
        for res in &results {
            println!(
                "{:<20} {:>6.2} ± {:.2}",
                res.method.as_str(),
                res.mean,
                res.std
            );
        }
        println!("wrote {} and {}", csv.display(), json.display());
        Ok(())
    }))
}

fn ablate(a: AblateArgs, r: &mut Resolver) -> Result<Outputs> {
    let param: Sweep = r.required("param", a.param)?;
    let values: Vec<u32> = r.required("values", a.values)?;
    if values.is_empty() {
        return Err(UsageError("--values needs at least one value".into()).into());
    }
    let methods = match param {
        Sweep::NFew => r.get("methods", a.methods, vec![Method::Ge3])?,
        Sweep::NAug => Vec::new(),
    };
    let l = resolve_run(a.run, a.plan, a.train, r)?;
    let prefix = r.get("out", a.out, PathBuf::from("ablation"))?;
    Ok(Box::new(move |config| {
        let summary = sidecar(&prefix, ".summary.csv");
        let results = match param {
            Sweep::NFew => {
                let n_few: Vec<usize> = values.iter().map(|&v| v as usize).collect();
                let results = with_jobs(l.jobs, || {
                    ablate_nfew(&l.train, &l.eval, &l.base, &n_few, &methods)
                })??;
                write_nfew_csv(&summary, &results)?;
                for res in &results {
                    println!(
                        "n_few={:<4} {:<20} {:>6.2} ± {:.2}",
                        res.n_few,
                        res.method.as_str(),
                        res.mean,
                        res.std
                    );
                }
                results
            }
            Sweep::NAug => {
                let ab = with_jobs(l.jobs, || ablate_naug(&l.train, &l.eval, &l.base, &values))??;
                write_naug_csv(&summary, &ab)?;
                println!(
                    "baseline {:>6.2} ± {:.2}",
                    ab.baseline.mean, ab.baseline.std
                );
                for p in &ab.points {
                    println!(
                        "n_aug={:<3} {:>6.2} ± {:.2} (improvement {:+.2} ± {:.2})",
                        p.n_aug, p.result.mean, p.result.std, p.improvement, p.improvement_std
                    );
                }
                std::iter::once(ab.baseline)
                    .chain(ab.points.into_iter().map(|p| p.result))
                    .collect()
            }
        };
        let (csv, json) = emit_report(&results, &prefix, config)?;
        println!(
            "wrote {}, {} and {}",
            csv.display(),
            json.display(),
            summary.display()
        );
        Ok(())
    }))
}
