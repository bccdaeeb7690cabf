//! Hidden-space data augmentation for class-imbalanced classification.
//!
//! The crate works on fixed-dimension embedding vectors (the output of a frozen
//! encoder) and provides:
//!
//! - [`dataset`] / [`io`]: the labeled embedding dataset and its `EMB1` file format,
//! - [`augment`]: cross-class mean-shift extrapolation ([`augment::ge3_augment_all`])
//!   plus the within-class baselines (interpolation, within-extrapolation,
//!   linear delta, uniform and Gaussian noise),
//! - [`imbalance`]: artificial restriction of half the classes and upsampling,
//! - [`classifier`]: a linear softmax layer trained with minibatch SGD,
//! - [`experiment`]: the multi-seed protocol, ablations and CSV/JSON reports,
//! - [`synth`]: Gaussian class-cluster generators used as a desk-scale testbed.

pub mod augment;
pub mod classifier;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod imbalance;
pub mod io;
pub mod rng;
pub mod synth;

pub use augment::{AugmentPlan, AugmentedBatch, ClassStats, Method, NAug};
pub use classifier::{LinearModel, TrainConfig};
pub use dataset::EmbeddingDataset;
pub use error::{Error, Result};
pub use experiment::{ExperimentSpec, RunResult};
pub use imbalance::ImbalanceSpec;
pub use synth::{CovarianceMode, SynthSpec};
