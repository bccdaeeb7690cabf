//! Synthetic Gaussian class clusters.
//!
//! Class means are drawn i.i.d. `N(0, mean_scale)` per coordinate. Within-class
//! noise is diagonal Gaussian whose per-coordinate standard deviations are
//! `within_scale` times a log-uniform factor in `[1/3, 3]`. In `Shared` mode one
//! set of deviations serves every class, so moving a class's spread onto another
//! class's mean yields genuine samples of that class; in `PerClass` mode each
//! class has its own.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

const SCALE_SPREAD: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceMode {
    Shared,
    PerClass,
}

impl fmt::Display for CovarianceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CovarianceMode::Shared => "shared",
            CovarianceMode::PerClass => "per_class",
        })
    }
}

impl FromStr for CovarianceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "shared" => Ok(CovarianceMode::Shared),
            "per_class" => Ok(CovarianceMode::PerClass),
            other => Err(Error::Validation(format!(
                "unknown covariance mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub k: usize,
    pub d: usize,
    pub per_class: usize,
    pub mean_scale: f64,
    pub covariance_mode: CovarianceMode,
    pub within_scale: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            k: 8,
            d: 32,
            per_class: 200,
            mean_scale: 1.0,
            covariance_mode: CovarianceMode::Shared,
            within_scale: 1.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.d == 0 || self.per_class == 0 {
            return Err(Error::Validation(format!(
                "k, d and per_class must be positive (k={}, d={}, per_class={})",
                self.k, self.d, self.per_class
            )));
        }
        if !(self.mean_scale.is_finite() && self.mean_scale > 0.0) {
            return Err(Error::Validation(format!(
                "mean_scale must be > 0, got {}",
                self.mean_scale
            )));
        }
        if !(self.within_scale.is_finite() && self.within_scale > 0.0) {
            return Err(Error::Validation(format!(
                "within_scale must be > 0, got {}",
                self.within_scale
            )));
        }
        Ok(())
    }
}

/// The ground-truth class geometry behind a [`SynthSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthGeometry {
    pub means: Vec<Vec<f64>>,
    /// Per-class, per-coordinate standard deviations.
    pub stds: Vec<Vec<f64>>,
}

pub fn geometry(spec: &SynthSpec) -> Result<SynthGeometry> {
    spec.validate()?;
    let normal = Normal::new(0.0, spec.mean_scale).expect("validated scale");
    let mut rng = stream_rng(spec.seed, Stream::SynthMeans, 0);
    let means = (0..spec.k)
        .map(|_| (0..spec.d).map(|_| normal.sample(&mut rng)).collect())
        .collect();
    let draw_stds = |index: u64| -> Vec<f64> {
        let mut rng = stream_rng(spec.seed, Stream::SynthScales, index);
        let ln = SCALE_SPREAD.ln();
        (0..spec.d)
            .map(|_| spec.within_scale * rng.random_range(-ln..=ln).exp())
            .collect()
    };
    let stds = match spec.covariance_mode {
        CovarianceMode::Shared => vec![draw_stds(0); spec.k],
        CovarianceMode::PerClass => (0..spec.k).map(|c| draw_stds(1 + c as u64)).collect(),
    };
    Ok(SynthGeometry { means, stds })
}

fn sample(spec: &SynthSpec, geo: &SynthGeometry, stream: Stream) -> Result<EmbeddingDataset> {
    let mut labels = Vec::with_capacity(spec.k * spec.per_class);
    let mut vectors = Vec::with_capacity(spec.k * spec.per_class * spec.d);
    for c in 0..spec.k {
        let mut rng = stream_rng(spec.seed, stream, c as u64);
        for _ in 0..spec.per_class {
            labels.push(c as u32);
            for (&mu, &sd) in geo.means[c].iter().zip(&geo.stds[c]) {
                let z: f64 = StandardNormal.sample(&mut rng);
                vectors.push((mu + sd * z) as f32);
            }
        }
    }
    EmbeddingDataset::new(spec.d, spec.k, labels, vectors)
}

/// Balanced train and eval sets with `per_class` rows per class each, class-major.
pub fn generate(spec: &SynthSpec) -> Result<(EmbeddingDataset, EmbeddingDataset)> {
    let geo = geometry(spec)?;
    Ok((
        sample(spec, &geo, Stream::SynthTrain)?,
        sample(spec, &geo, Stream::SynthEval)?,
    ))
}
