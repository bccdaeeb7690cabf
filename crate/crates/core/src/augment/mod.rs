//! Hidden-space augmentation operators.
//!
//! [`ge3_augment_all`] shifts every example of a donor class by the difference of
//! class means, re-anchoring the donor's within-class spread at the target class.
//! The within-class baselines ([`augment_to_count`]) draw pairs, triples or single
//! examples from one class and emit new rows until a per-class count is reached.

mod ge3;
mod ops;
mod stats;
mod within;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

pub use ge3::{choose_donors, ge3_augment_all, ge3_extrapolate};
pub use ops::{interpolate_pair, linear_delta, noise_augment, within_extrapolate_pair};
pub use stats::{class_means, ClassStats};
pub use within::augment_to_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    None,
    Ge3,
    Interpolate,
    WithinExtrapolate,
    LinearDelta,
    UniformNoise,
    GaussianNoise,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::None,
        Method::Ge3,
        Method::Interpolate,
        Method::WithinExtrapolate,
        Method::LinearDelta,
        Method::UniformNoise,
        Method::GaussianNoise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::Ge3 => "ge3",
            Method::Interpolate => "interpolate",
            Method::WithinExtrapolate => "within_extrapolate",
            Method::LinearDelta => "linear_delta",
            Method::UniformNoise => "uniform_noise",
            Method::GaussianNoise => "gaussian_noise",
        }
    }

    /// Methods that only combine examples of a single class.
    pub fn is_within_class(self) -> bool {
        matches!(
            self,
            Method::Interpolate
                | Method::WithinExtrapolate
                | Method::LinearDelta
                | Method::UniformNoise
                | Method::GaussianNoise
        )
    }

    /// Number of source rows consumed per generated row.
    pub fn arity(self) -> usize {
        match self {
            Method::Interpolate | Method::WithinExtrapolate => 2,
            Method::LinearDelta => 3,
            Method::Ge3 | Method::UniformNoise | Method::GaussianNoise => 1,
            Method::None => 0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| Error::Plan(format!("unknown augmentation method {s:?}")))
    }
}

/// Augmentation volume: the donor-class count for GE3, or the multiplier on
/// the largest class size for the within-class methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NAugRepr", into = "NAugRepr")]
pub enum NAug {
    All,
    Count(u32),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NAugRepr {
    Count(u32),
    Word(String),
}

impl From<NAug> for NAugRepr {
    fn from(n: NAug) -> Self {
        match n {
            NAug::All => NAugRepr::Word("all".into()),
            NAug::Count(c) => NAugRepr::Count(c),
        }
    }
}

impl TryFrom<NAugRepr> for NAug {
    type Error = Error;

    fn try_from(r: NAugRepr) -> Result<Self> {
        match r {
            NAugRepr::Count(c) => Ok(NAug::Count(c)),
            NAugRepr::Word(w) => w.parse(),
        }
    }
}

impl fmt::Display for NAug {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NAug::All => f.write_str("all"),
            NAug::Count(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for NAug {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(NAug::All);
        }
        s.parse::<u32>().map(NAug::Count).map_err(|_| {
            Error::Plan(format!(
                "n_aug must be a positive integer or \"all\", got {s:?}"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentPlan {
    pub method: Method,
    /// Within-extrapolation strength.
    pub lambda: f64,
    /// Use `lambda * (xi + xj) - xi` instead of `lambda * (xi - xj) + xi`.
    pub literal_within_form: bool,
    pub uniform_bounds: (f64, f64),
    /// `(mean, sigma)` of the Gaussian noise.
    pub gaussian_params: (f64, f64),
    pub n_aug: NAug,
    pub seed: u64,
}

impl AugmentPlan {
    /// Default parameters: lambda 0.5, uniform noise on [-0.1, 0.1], Gaussian
    /// noise N(0, 0.1), all donors for GE3 and n_aug = 5 otherwise.
    pub fn new(method: Method) -> Self {
        Self {
            method,
            lambda: 0.5,
            literal_within_form: false,
            uniform_bounds: (-0.1, 0.1),
            gaussian_params: (0.0, 0.1),
            n_aug: if method == Method::Ge3 {
                NAug::All
            } else {
                NAug::Count(5)
            },
            seed: 0,
        }
    }

    pub fn with_n_aug(mut self, n_aug: NAug) -> Self {
        self.n_aug = n_aug;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks parameter invariants; `k` is the class count of the data the plan
    /// will be applied to.
    pub fn validate(&self, k: usize) -> Result<()> {
        let (a, b) = self.uniform_bounds;
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(Error::Plan(format!(
                "uniform bounds need a <= b, got ({a}, {b})"
            )));
        }
        let (mu, sigma) = self.gaussian_params;
        if !mu.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Plan(format!(
                "gaussian needs finite mean and sigma > 0, got ({mu}, {sigma})"
            )));
        }
        if !self.lambda.is_finite() {
            return Err(Error::Plan("lambda must be finite".into()));
        }
        match (self.method, self.n_aug) {
            (_, NAug::Count(0)) => Err(Error::Plan("n_aug must be positive".into())),
            (Method::Ge3, NAug::Count(n)) if n as usize > k.saturating_sub(1) => {
                Err(Error::Plan(format!(
                    "n_aug={n} exceeds the {} other classes available",
                    k.saturating_sub(1)
                )))
            }
            (m, NAug::All) if m.is_within_class() => Err(Error::Plan(format!(
                "n_aug=all only applies to ge3, not {m}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source_class: u32,
    pub source_rows: Vec<usize>,
}

/// Generated rows plus, for each, the class and rows of the originating
/// dataset they were derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedBatch {
    pub method: Method,
    pub seed: u64,
    dim: usize,
    labels: Vec<u32>,
    vectors: Vec<f32>,
    provenance: Vec<Provenance>,
}

#[derive(Serialize, Deserialize)]
struct ProvenanceFile {
    method: Method,
    seed: u64,
    rows: Vec<Provenance>,
}

impl AugmentedBatch {
    pub(crate) fn empty(method: Method, seed: u64, dim: usize) -> Self {
        Self {
            method,
            seed,
            dim,
            labels: Vec::new(),
            vectors: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, label: u32, vector: Vec<f32>, provenance: Provenance) {
        debug_assert_eq!(vector.len(), self.dim);
        self.labels.push(label);
        self.vectors.extend(vector);
        self.provenance.push(provenance);
    }

    pub(crate) fn append(&mut self, other: AugmentedBatch) {
        self.labels.extend(other.labels);
        self.vectors.extend(other.vectors);
        self.provenance.extend(other.provenance);
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

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn vectors(&self) -> &[f32] {
        &self.vectors
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn to_dataset(&self, num_classes: usize) -> Result<EmbeddingDataset> {
        EmbeddingDataset::new(
            self.dim,
            num_classes,
            self.labels.clone(),
            self.vectors.clone(),
        )
    }

    /// Original rows followed by the generated rows.
    pub fn union_with(&self, ds: &EmbeddingDataset) -> Result<EmbeddingDataset> {
        if ds.dim() != self.dim {
            return Err(Error::Shape(format!(
                "batch d={} vs dataset d={}",
                self.dim,
                ds.dim()
            )));
        }
        let mut out = ds.clone();
        out.extend_rows(&self.labels, &self.vectors)?;
        Ok(out)
    }

    /// Writes the batch as `EMB1` plus `<path>.provenance.json`.
    pub fn save(&self, path: impl AsRef<Path>, num_classes: usize) -> Result<()> {
        let path = path.as_ref();
        crate::io::save_embeddings(&self.to_dataset(num_classes)?, path)?;
        let mut prov_path = path.as_os_str().to_owned();
        prov_path.push(".provenance.json");
        let file = ProvenanceFile {
            method: self.method,
            seed: self.seed,
            rows: self.provenance.clone(),
        };
        let text = serde_json::to_string(&file).expect("provenance serializes");
        std::fs::write(&prov_path, text).map_err(|e| Error::io(prov_path, e))
    }
}

/// Applies a plan to a (restricted) training set.
///
/// GE3 uses class means of `ds` itself; within-class methods fill every class up
/// to `n_aug` times the largest class. `Method::None` yields an empty batch.
pub fn apply_plan(ds: &EmbeddingDataset, plan: &AugmentPlan) -> Result<AugmentedBatch> {
    plan.validate(ds.num_classes())?;
    match plan.method {
        Method::None => Ok(AugmentedBatch::empty(Method::None, plan.seed, ds.dim())),
        Method::Ge3 => {
            let stats = class_means(ds)?;
            ge3_augment_all(ds, &stats, plan)
        }
        _ => {
            let stats = class_means(ds)?;
            let n_many = stats.counts.iter().copied().max().unwrap_or(0);
            let NAug::Count(mult) = plan.n_aug else {
                unreachable!("validated above")
            };
            augment_to_count(ds, &stats, plan, mult as usize * n_many)
        }
    }
}
