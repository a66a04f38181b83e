//! Outlierness space: every sample is mapped to `(phi1, phi2)` in the unit
//! square from the label statistics of the communities it belongs to.
//!
//! * `phi1` is the fraction of the sample's communities whose normalized
//!   label entropy stays within the tolerance `T`.
//! * `phi2` is the mean, over the sample's communities, of the fraction of
//!   other members sharing the sample's label.
//!
//! Both are passed through `f(x) = 1 / (1 - ln x)`. Samples in no community
//! are attribute-outlier candidates and map to `(0, 0)`.

use std::io::Write;

use rayon::prelude::*;

use crate::community::CommunitySet;
use crate::dataset::LabeledDataset;
use crate::error::{CodError, Result};

/// Default tolerance on normalized community entropy.
pub const DEFAULT_ENTROPY_TOLERANCE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityParams {
    /// Maximum normalized entropy for a community to count as homogeneous.
    pub entropy_tol: f64,
}

impl DiversityParams {
    pub fn new(entropy_tol: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&entropy_tol) {
            return Err(CodError::param(format!(
                "entropy tolerance {entropy_tol} outside [0, 1]"
            )));
        }
        Ok(Self { entropy_tol })
    }
}

impl Default for DiversityParams {
    fn default() -> Self {
        Self {
            entropy_tol: DEFAULT_ENTROPY_TOLERANCE,
        }
    }
}

/// Per-sample coordinates in the outlierness space.
#[derive(Debug, Clone, PartialEq)]
pub struct OutliernessFeatures {
    /// Rescaled `(phi1, phi2)`.
    pub phi: Vec<[f64; 2]>,
    /// `(phi1, phi2)` before the logarithmic rescale.
    pub raw_phi: Vec<[f64; 2]>,
    /// Sample belongs to no community.
    pub attribute_flag: Vec<bool>,
}

impl OutliernessFeatures {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// CSV `sample_index,phi1,phi2,attribute_flag`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["sample_index", "phi1", "phi2", "attribute_flag"])?;
        for (i, (p, flag)) in self.phi.iter().zip(&self.attribute_flag).enumerate() {
            w.write_record([
                i.to_string(),
                p[0].to_string(),
                p[1].to_string(),
                flag.to_string(),
            ])?;
        }
        w.flush().map_err(|e| CodError::io("<csv output>", e))?;
        Ok(())
    }
}

/// Label distribution of a set of nodes over classes `1..=n_classes`.
pub fn label_probs(members: &[usize], labels: &[u32], n_classes: u32) -> Vec<f64> {
    let mut counts = vec![0usize; n_classes as usize];
    for &v in members {
        counts[(labels[v] - 1) as usize] += 1;
    }
    let total = members.len() as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

/// Shannon entropy (natural log, `0 ln 0 = 0`) divided by `ln(n_classes)`,
/// so uniform labels give 1. A single class gives 0.
pub fn normalized_entropy(probs: &[f64]) -> f64 {
    if probs.len() < 2 {
        return 0.0;
    }
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    (h / (probs.len() as f64).ln()).clamp(0.0, 1.0)
}

fn community_members(c: usize, cs: &CommunitySet) -> Result<&[usize]> {
    if c >= cs.len() {
        return Err(CodError::param(format!(
            "community {c} out of range ({} communities)",
            cs.len()
        )));
    }
    Ok(cs.members(c))
}

fn check_labels(cs: &CommunitySet, labels: &[u32]) -> Result<()> {
    if labels.len() != cs.n_nodes() {
        return Err(CodError::SizeMismatch(format!(
            "{} labels for {} community nodes",
            labels.len(),
            cs.n_nodes()
        )));
    }
    Ok(())
}

pub fn community_label_probs(
    c: usize,
    cs: &CommunitySet,
    labels: &[u32],
    n_classes: u32,
) -> Result<Vec<f64>> {
    check_labels(cs, labels)?;
    Ok(label_probs(community_members(c, cs)?, labels, n_classes))
}

pub fn community_entropy(
    c: usize,
    cs: &CommunitySet,
    labels: &[u32],
    n_classes: u32,
) -> Result<f64> {
    community_label_probs(c, cs, labels, n_classes).map(|p| normalized_entropy(&p))
}

/// Fraction of `v`'s communities whose normalized entropy is `<= T`.
pub fn phi1(
    v: usize,
    cs: &CommunitySet,
    labels: &[u32],
    n_classes: u32,
    params: &DiversityParams,
) -> Result<f64> {
    check_labels(cs, labels)?;
    let memberships = cs.memberships(v);
    if memberships.is_empty() {
        return Err(CodError::NoCommunity(v));
    }
    let homogeneous = memberships
        .iter()
        .map(|&c| community_entropy(c, cs, labels, n_classes))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&h| h <= params.entropy_tol)
        .count();
    Ok(homogeneous as f64 / memberships.len() as f64)
}

/// Mean over `v`'s communities of the fraction of other members sharing
/// `v`'s label.
pub fn phi2(v: usize, cs: &CommunitySet, labels: &[u32]) -> Result<f64> {
    check_labels(cs, labels)?;
    let memberships = cs.memberships(v);
    if memberships.is_empty() {
        return Err(CodError::NoCommunity(v));
    }
    let total: f64 = memberships
        .iter()
        .map(|&c| same_label_fraction(v, cs.members(c), labels))
        .sum();
    Ok(total / memberships.len() as f64)
}

fn same_label_fraction(v: usize, members: &[usize], labels: &[u32]) -> f64 {
    let others = members.len() - 1;
    if others == 0 {
        return 0.0;
    }
    let same = members
        .iter()
        .filter(|&&w| w != v && labels[w] == labels[v])
        .count();
    same as f64 / others as f64
}

/// `f(x) = 1 / (1 - ln x)` on `(0, 1]`, with `f(0) = 0`.
pub fn log_rescale(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(CodError::param(format!("{x} outside [0, 1]")));
    }
    Ok(rescale(x))
}

#[inline]
fn rescale(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.0 / (1.0 - x.ln())
    }
}

/// Maps every sample of `ds` into the outlierness space.
pub fn outlierness_features(
    ds: &LabeledDataset,
    cs: &CommunitySet,
    params: &DiversityParams,
) -> Result<OutliernessFeatures> {
    let labels = ds.labels();
    check_labels(cs, labels)?;
    let homogeneous: Vec<bool> = cs
        .communities()
        .iter()
        .map(|m| normalized_entropy(&label_probs(m, labels, ds.n_classes())) <= params.entropy_tol)
        .collect();
    let raw: Vec<Option<[f64; 2]>> = (0..ds.n_samples())
        .into_par_iter()
        .map(|v| {
            let memberships = cs.memberships(v);
            if memberships.is_empty() {
                return None;
            }
            let count = memberships.len() as f64;
            let p1 = memberships.iter().filter(|&&c| homogeneous[c]).count() as f64 / count;
            let p2 = memberships
                .iter()
                .map(|&c| same_label_fraction(v, cs.members(c), labels))
                .sum::<f64>()
                / count;
            Some([p1, p2])
        })
        .collect();
    Ok(OutliernessFeatures {
        phi: raw
            .iter()
            .map(|r| r.map_or([0.0, 0.0], |[a, b]| [rescale(a), rescale(b)]))
            .collect(),
        raw_phi: raw.iter().map(|r| r.unwrap_or([0.0, 0.0])).collect(),
        attribute_flag: raw.iter().map(Option::is_none).collect(),
    })
}

/// Coordinatewise minimum across per-view features (taken after rescaling);
/// a sample flagged in any view is flagged.
pub fn combine_views(per_view: &[OutliernessFeatures]) -> Result<OutliernessFeatures> {
    let first = per_view
        .first()
        .ok_or_else(|| CodError::param("no views to combine"))?;
    let n = first.len();
    if per_view.iter().any(|f| f.len() != n) {
        return Err(CodError::SizeMismatch("views differ in sample count".into()));
    }
    let min_of = |pick: fn(&OutliernessFeatures) -> &Vec<[f64; 2]>, i: usize| {
        per_view.iter().map(|f| pick(f)[i]).fold(
            [f64::INFINITY, f64::INFINITY],
            |acc, p| [acc[0].min(p[0]), acc[1].min(p[1])],
        )
    };
    Ok(OutliernessFeatures {
        phi: (0..n).map(|i| min_of(|f| &f.phi, i)).collect(),
        raw_phi: (0..n).map(|i| min_of(|f| &f.raw_phi, i)).collect(),
        attribute_flag: (0..n)
            .map(|i| per_view.iter().any(|f| f.attribute_flag[i]))
            .collect(),
    })
}
