//! Logistic model over the outlierness space, trained on a synthetic corpus.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CodError, Result};
use crate::outlierness::OutliernessFeatures;
use crate::pipeline::{single_view_features, PipelineParams};
use crate::simulate::{build_experiment_instance, gaussian_blobs, outlier_mask, OutlierConfig, CONFIG_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logistic,
}

/// `P(outlier | phi) = sigmoid(w1 * phi1 + w2 * phi2 + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierModel {
    pub kind: ModelKind,
    /// `[w1, w2, b]`.
    pub weights: [f64; 3],
    pub seed: u64,
    pub corpus: String,
    /// Mean log-loss on the training data at the last iteration.
    #[serde(default)]
    pub loss: f64,
}

impl OutlierModel {
    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(CodError::InvalidModel("non-finite weights".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()? + "\n").map_err(|e| CodError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| CodError::io(path, e))?;
        Self::from_json(&text)
    }

    #[inline]
    pub fn logit(&self, phi: [f64; 2]) -> f64 {
        linear(&self.weights, phi)
    }

    /// Outlier probability, kept strictly inside `(0, 1)`.
    #[inline]
    pub fn probability(&self, phi: [f64; 2]) -> f64 {
        sigmoid(self.logit(phi)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }
}

#[inline]
fn linear(w: &[f64; 3], x: [f64; 2]) -> f64 {
    w[0] * x[0] + w[1] * x[1] + w[2]
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean log-loss of `weights` on the labeled points.
pub fn log_loss(weights: &[f64; 3], features: &[[f64; 2]], truth: &[bool]) -> f64 {
    let total: f64 = features
        .iter()
        .zip(truth)
        .map(|(&x, &y)| {
            let z = linear(weights, x);
            softplus(z) - if y { z } else { 0.0 }
        })
        .sum();
    total / features.len() as f64
}

/// Analytic gradient of [`log_loss`].
pub fn log_loss_gradient(weights: &[f64; 3], features: &[[f64; 2]], truth: &[bool]) -> [f64; 3] {
    let mut g = [0.0; 3];
    for (&x, &y) in features.iter().zip(truth) {
        let r = sigmoid(linear(weights, x)) - f64::from(u8::from(y));
        g[0] += r * x[0];
        g[1] += r * x[1];
        g[2] += r;
    }
    let n = features.len() as f64;
    g.map(|v| v / n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for TrainingOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            grad_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainingTrace {
    pub weights: [f64; 3],
    /// Loss before the first step and after every step.
    pub losses: Vec<f64>,
    pub grad_norm: f64,
}

/// Full-batch gradient descent on the mean log-loss with the fixed step
/// `1 / L`, `L = sum ||x||^2 / (4 n)` bounding the loss curvature, so the
/// loss never increases. Initial weights are drawn from `seed`.
pub fn fit_logistic(
    features: &[[f64; 2]],
    truth: &[bool],
    seed: u64,
    options: &TrainingOptions,
) -> Result<TrainingTrace> {
    if features.len() != truth.len() {
        return Err(CodError::SizeMismatch(format!(
            "{} feature rows for {} labels",
            features.len(),
            truth.len()
        )));
    }
    let positives = truth.iter().filter(|&&t| t).count();
    if positives == 0 || positives == truth.len() {
        return Err(CodError::SingleClass);
    }
    if features.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CodError::param("non-finite training features"));
    }
    let curvature =
        features.iter().map(|x| x[0] * x[0] + x[1] * x[1] + 1.0).sum::<f64>() / (4.0 * features.len() as f64);
    let step = 1.0 / curvature;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.01..0.01));
    let mut losses = vec![log_loss(&w, features, truth)];
    let mut grad = log_loss_gradient(&w, features, truth);
    let norm = |g: &[f64; 3]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    for _ in 0..options.max_iter {
        if norm(&grad) < options.grad_tol {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(grad) {
            *wi -= step * gi;
        }
        losses.push(log_loss(&w, features, truth));
        grad = log_loss_gradient(&w, features, truth);
    }
    Ok(TrainingTrace {
        weights: w,
        losses,
        grad_norm: norm(&grad),
    })
}

pub fn train_outlier_model(features: &[[f64; 2]], truth: &[bool], seed: u64) -> Result<OutlierModel> {
    let trace = fit_logistic(features, truth, seed, &TrainingOptions::default())?;
    Ok(OutlierModel {
        kind: ModelKind::Logistic,
        weights: trace.weights,
        seed,
        corpus: format!("{} labeled points", features.len()),
        loss: *trace.losses.last().expect("at least the initial loss"),
    })
}

pub fn score_outlierness(model: &OutlierModel, features: &OutliernessFeatures) -> Result<Vec<f64>> {
    model.validate()?;
    Ok(features.phi.par_iter().map(|&p| model.probability(p)).collect())
}

/// Flags samples scoring at or above `threshold`; samples in no community
/// are always flagged.
pub fn detect(model: &OutlierModel, features: &OutliernessFeatures, threshold: f64) -> Result<Vec<bool>> {
    let scores = score_outlierness(model, features)?;
    Ok(scores
        .iter()
        .zip(&features.attribute_flag)
        .map(|(&s, &attr)| attr || s >= threshold)
        .collect())
}

/// Number of synthetic datasets in the default training corpus.
pub const CORPUS_DATASETS: usize = 20;

/// Labeled outlierness points gathered from synthetic datasets.
#[derive(Debug, Clone)]
pub struct TrainingCorpus {
    pub features: Vec<[f64; 2]>,
    pub truth: Vec<bool>,
    pub description: String,
}

/// Gaussian-blob datasets (2-5 classes, 2-10 features, 100-500 samples)
/// with outliers injected under the named configurations in turn, each run
/// through the pipeline with `params`.
pub fn synthetic_corpus(seed: u64, n_datasets: usize, params: &PipelineParams) -> Result<TrainingCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<(usize, usize, usize, f64, u64)> = (0..n_datasets)
        .map(|_| {
            (
                rng.random_range(2..=5),
                rng.random_range(2..=10),
                rng.random_range(100..=500),
                rng.random_range(1.0..4.0),
                rng.random(),
            )
        })
        .collect();
    let parts = specs
        .par_iter()
        .enumerate()
        .map(|(m, &(classes, dim, n, spread, sub_seed))| {
            let mut local = ChaCha8Rng::seed_from_u64(sub_seed);
            let centers: Vec<Vec<f64>> = (0..classes)
                .map(|_| (0..dim).map(|_| local.random_range(-spread..spread) * 2.0).collect())
                .collect();
            let clean = gaussian_blobs(&centers, 1.0, n, local.random())?;
            let config = OutlierConfig::named(CONFIG_NAMES[m % CONFIG_NAMES.len()], local.random())?;
            let corrupted = build_experiment_instance(&clean, &config)?;
            let phi = single_view_features(&corrupted.data, params)?;
            Ok((phi.phi, outlier_mask(&corrupted.truth)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut features, mut truth) = (Vec::new(), Vec::new());
    for (f, t) in parts {
        features.extend(f);
        truth.extend(t);
    }
    Ok(TrainingCorpus {
        description: format!(
            "synthetic gaussian blobs: {n_datasets} datasets, {} points, seed {seed}",
            features.len()
        ),
        features,
        truth,
    })
}

/// Builds the default corpus from `seed` and fits the model on it.
pub fn train_default_model(seed: u64, params: &PipelineParams) -> Result<(OutlierModel, TrainingCorpus)> {
    let corpus = synthetic_corpus(seed, CORPUS_DATASETS, params)?;
    let mut model = train_outlier_model(&corpus.features, &corpus.truth, seed)?;
    model.corpus = corpus.description.clone();
    Ok((model, corpus))
}
