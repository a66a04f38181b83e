//! Community-based outlier detection (COD).
//!
//! Samples are linked in a weighted mutual k-nearest-neighbor graph, grouped
//! into overlapping communities by clique percolation (then extended with
//! nearby isolated nodes), and mapped into a 2-D outlierness space built from
//! the label statistics of the communities each sample belongs to. A small
//! logistic model on that space yields the final outlier score.
//!
//! The crate also carries the outlier-injection and repeated-trial AUC
//! protocol used to benchmark the detector.

pub mod classifier;
pub mod community;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod graph;
pub mod outlierness;
pub mod pipeline;
pub mod simulate;

pub use classifier::{detect, score_outlierness, train_outlier_model, OutlierModel};
pub use community::{CommunitySet, ExtensionParams};
pub use dataset::{LabelColumn, LabeledDataset, MultiViewDataset};
pub use error::{CodError, Result};
pub use eval::{auc, ExperimentReport};
pub use graph::{DistanceMatrix, WeightedGraph};
pub use outlierness::{DiversityParams, OutliernessFeatures};
pub use pipeline::PipelineParams;
pub use simulate::{OutlierConfig, OutlierTag};
