//! End-to-end detector pipeline: normalize, mutual kNN graph, percolation,
//! extension, outlierness features.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::{extend_communities, percolation_communities, CommunitySet, ExtensionParams};
use crate::dataset::{normalize_features, LabeledDataset, MultiViewDataset};
use crate::error::{CodError, Result};
use crate::graph::{mutual_knn_graph, DistanceMatrix, WeightedGraph};
use crate::outlierness::{combine_views, outlierness_features, DiversityParams, OutliernessFeatures};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// Neighbor count of the mutual kNN graph.
    pub k: usize,
    /// Clique size for percolation.
    pub q: usize,
    /// Percentile of edge weights used as the extension tolerance.
    pub percentile: f64,
    /// Normalized-entropy tolerance for homogeneous communities.
    pub entropy_tol: f64,
    /// Z-score features before building the graph.
    pub normalize: bool,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            k: 40,
            q: 4,
            percentile: 75.0,
            entropy_tol: crate::outlierness::DEFAULT_ENTROPY_TOLERANCE,
            normalize: true,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(CodError::param("k must be >= 1"));
        }
        if self.q < 2 {
            return Err(CodError::param("q must be >= 2"));
        }
        if !(self.percentile > 0.0 && self.percentile <= 100.0) {
            return Err(CodError::param(format!(
                "percentile {} outside (0, 100]",
                self.percentile
            )));
        }
        DiversityParams::new(self.entropy_tol)?;
        Ok(())
    }

    pub fn diversity(&self) -> DiversityParams {
        DiversityParams {
            entropy_tol: self.entropy_tol,
        }
    }
}

/// Every intermediate product of one single-view run.
#[derive(Debug, Clone)]
pub struct ViewAnalysis {
    pub distances: DistanceMatrix,
    pub graph: WeightedGraph,
    pub initial: CommunitySet,
    pub communities: CommunitySet,
    /// Extension tolerance; `None` when there was nothing to extend.
    pub delta: Option<f64>,
    pub features: OutliernessFeatures,
}

pub fn analyze_view(ds: &LabeledDataset, params: &PipelineParams) -> Result<ViewAnalysis> {
    params.validate()?;
    let normalized;
    let input = if params.normalize {
        normalized = normalize_features(ds)?;
        &normalized
    } else {
        ds
    };
    let (distances, graph) = mutual_knn_graph(input, params.k)?;
    let initial = percolation_communities(&graph, params.q)?;
    let (communities, delta) = if initial.is_empty() {
        (initial.clone(), None)
    } else {
        let ext = ExtensionParams::from_graph(&graph, params.percentile, params.q)?;
        (
            extend_communities(&initial, &graph, &distances, &ext)?,
            Some(ext.delta),
        )
    };
    let features = outlierness_features(ds, &communities, &params.diversity())?;
    Ok(ViewAnalysis {
        distances,
        graph,
        initial,
        communities,
        delta,
        features,
    })
}

pub fn single_view_features(
    ds: &LabeledDataset,
    params: &PipelineParams,
) -> Result<OutliernessFeatures> {
    analyze_view(ds, params).map(|a| a.features)
}

/// Runs the pipeline independently on every view with the same parameters
/// and takes the coordinatewise minimum.
pub fn multiview_outlierness(
    mv: &MultiViewDataset,
    params: &PipelineParams,
) -> Result<OutliernessFeatures> {
    multiview_outlierness_with(mv, &vec![*params; mv.n_views()])
}

pub fn multiview_outlierness_with(
    mv: &MultiViewDataset,
    per_view: &[PipelineParams],
) -> Result<OutliernessFeatures> {
    if mv.n_views() < 2 {
        return Err(CodError::param("multi-view aggregation needs at least 2 views"));
    }
    if per_view.len() != mv.n_views() {
        return Err(CodError::SizeMismatch(format!(
            "{} parameter sets for {} views",
            per_view.len(),
            mv.n_views()
        )));
    }
    let features = mv
        .views()
        .par_iter()
        .zip(per_view)
        .map(|(view, params)| single_view_features(view, params))
        .collect::<Result<Vec<_>>>()?;
    combine_views(&features)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(PipelineParams::default().validate().is_ok());
        let bad = [
            PipelineParams { k: 0, ..Default::default() },
            PipelineParams { q: 1, ..Default::default() },
            PipelineParams { percentile: 0.0, ..Default::default() },
            PipelineParams { entropy_tol: 1.5, ..Default::default() },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn edgeless_graph_isolates_everything() {
        // k = 1 on evenly spaced points with a right-skewed gap: no triangles
        let ds = LabeledDataset::from_flat(vec![0.0, 1.0, 3.0, 7.0], 1, vec![1, 1, 2, 2]).unwrap();
        let params = PipelineParams { k: 1, normalize: false, ..Default::default() };
        let a = analyze_view(&ds, &params).unwrap();
        assert!(a.initial.is_empty());
        assert_eq!(a.delta, None);
        assert!(a.features.attribute_flag.iter().all(|&f| f));
    }
}
