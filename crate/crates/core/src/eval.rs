//! AUC and the repeated-trial benchmark protocol.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{score_outlierness, OutlierModel};
use crate::dataset::{view_layout, LabeledDataset};
use crate::error::{CodError, Result};
use crate::pipeline::{multiview_outlierness, single_view_features, PipelineParams};
use crate::simulate::{build_experiment_instance, build_multiview_instance, outlier_mask, OutlierConfig, ViewsMode};

/// Probability that a random outlier outscores a random inlier, ties
/// counting one half. Sort-based, `O(N log N)`.
pub fn auc(scores: &[f64], truth: &[bool]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(CodError::SizeMismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            truth.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(CodError::param("NaN score"));
    }
    let n_pos = truth.iter().filter(|&&t| t).count() as u64;
    let n_neg = truth.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(CodError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // twice the Mann-Whitney U, kept integral: every inlier strictly below
    // an outlier counts 2, every tie 1
    let mut doubled_u: u64 = 0;
    let mut negatives_below: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let pos_in_group = order[i..j].iter().filter(|&&k| truth[k]).count() as u64;
        let neg_in_group = (j - i) as u64 - pos_in_group;
        doubled_u += pos_in_group * (2 * negatives_below + neg_in_group);
        negatives_below += neg_in_group;
        i = j;
    }
    Ok(doubled_u as f64 / (2 * n_pos * n_neg) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub config: String,
    pub views: usize,
    pub n_repeats: usize,
    pub auc_mean: f64,
    /// Sample (n - 1) standard deviation; 0 for a single repeat.
    pub auc_std: f64,
    pub aucs: Vec<f64>,
    pub params: PipelineParams,
    pub seed_base: u64,
}

impl ExperimentReport {
    fn from_aucs(
        dataset: &str,
        config: &OutlierConfig,
        views: usize,
        params: &PipelineParams,
        aucs: Vec<f64>,
    ) -> Self {
        let (auc_mean, auc_std) = mean_std(&aucs);
        Self {
            dataset: dataset.to_string(),
            config: config.name(),
            views,
            n_repeats: aucs.len(),
            auc_mean,
            auc_std,
            aucs,
            params: *params,
            seed_base: config.seed,
        }
    }

    /// CSV rows `dataset,config,views,repeat,auc`, header included.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_reports_csv(w, std::slice::from_ref(self))
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{:<16} {:>5} {:>5} {:>7} {:.3} ± {:.3}",
            self.dataset, self.config, self.views, self.n_repeats, self.auc_mean, self.auc_std
        )
    }
}

pub fn write_reports_csv<W: Write>(w: W, reports: &[ExperimentReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["dataset", "config", "views", "repeat", "auc"])?;
    for r in reports {
        for (i, a) in r.aucs.iter().enumerate() {
            w.write_record([
                r.dataset.clone(),
                r.config.clone(),
                r.views.to_string(),
                i.to_string(),
                a.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| CodError::io("<csv output>", e))?;
    Ok(())
}

/// Aligned text table of the reports.
pub fn summary_table(reports: &[ExperimentReport]) -> String {
    let mut out = format!(
        "{:<16} {:>5} {:>5} {:>7} {}\n",
        "dataset", "config", "views", "repeats", "auc (mean ± std)"
    );
    for r in reports {
        out.push_str(&r.summary_line());
        out.push('\n');
    }
    out
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn repeat_seeds(base: u64, n_repeats: usize) -> Result<Vec<u64>> {
    if n_repeats == 0 {
        return Err(CodError::param("at least one repeat is required"));
    }
    Ok((0..n_repeats as u64).map(|r| base.wrapping_add(r)).collect())
}

/// Single-view protocol: for repeat `r`, inject with seed `config.seed + r`,
/// run the detector, score with `model` and compute the AUC.
pub fn run_experiment(
    dataset_name: &str,
    ds: &LabeledDataset,
    config: &OutlierConfig,
    params: &PipelineParams,
    model: &OutlierModel,
    n_repeats: usize,
) -> Result<ExperimentReport> {
    params.validate()?;
    let aucs = repeat_seeds(config.seed, n_repeats)?
        .into_par_iter()
        .map(|seed| {
            let instance = build_experiment_instance(ds, &config.with_seed(seed))?;
            let features = single_view_features(&instance.data, params)?;
            auc(&score_outlierness(model, &features)?, &outlier_mask(&instance.truth))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport::from_aucs(dataset_name, config, 1, params, aucs))
}

/// Keeps the view-split stream apart from the injection stream of a repeat.
const VIEW_SEED_SALT: u64 = 0x5bd1_e995_9e37_79b9;

/// Multi-view protocol with a fresh random feature split per repeat
/// (seeded by the repeat seed) and per-view class swaps.
pub fn run_multiview_experiment(
    dataset_name: &str,
    ds: &LabeledDataset,
    n_views: usize,
    config: &OutlierConfig,
    params: &PipelineParams,
    model: &OutlierModel,
    n_repeats: usize,
) -> Result<ExperimentReport> {
    view_layout(ds.n_features(), n_views, 0)?;
    let config = config.with_views_mode(ViewsMode::PerView);
    run_multiview_with_layout(dataset_name, ds, &config, params, model, n_repeats, |seed| {
        view_layout(ds.n_features(), n_views, seed ^ VIEW_SEED_SALT)
    })
}

/// Multi-view protocol with a caller-chosen feature layout per repeat seed.
pub fn run_multiview_with_layout<F>(
    dataset_name: &str,
    ds: &LabeledDataset,
    config: &OutlierConfig,
    params: &PipelineParams,
    model: &OutlierModel,
    n_repeats: usize,
    layout_for: F,
) -> Result<ExperimentReport>
where
    F: Fn(u64) -> Result<Vec<Vec<usize>>> + Sync,
{
    params.validate()?;
    let seeds = repeat_seeds(config.seed, n_repeats)?;
    let mut n_views = 0;
    let aucs = seeds
        .into_par_iter()
        .map(|seed| {
            let layout = layout_for(seed)?;
            let instance = build_multiview_instance(ds, &layout, &config.with_seed(seed))?;
            let features = multiview_outlierness(&instance.data, params)?;
            let a = auc(&score_outlierness(model, &features)?, &outlier_mask(&instance.truth))?;
            Ok((layout.len(), a))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|(v, a)| {
            n_views = v;
            a
        })
        .collect();
    Ok(ExperimentReport::from_aucs(dataset_name, config, n_views, params, aucs))
}
