//! Ground-truth outlier injection.
//!
//! Class outliers get their labels exchanged in pairs drawn from two distinct
//! classes; attribute outliers get every feature replaced by a value drawn
//! outside the clean per-feature range. Class selection happens first and
//! attribute outliers are drawn from the remaining samples.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledDataset, MultiViewDataset};
use crate::error::{CodError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutlierTag {
    None,
    Attribute,
    Class,
}

impl OutlierTag {
    pub fn is_outlier(self) -> bool {
        self != OutlierTag::None
    }
}

impl fmt::Display for OutlierTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutlierTag::None => "none",
            OutlierTag::Attribute => "attribute",
            OutlierTag::Class => "class",
        })
    }
}

impl FromStr for OutlierTag {
    type Err = CodError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(OutlierTag::None),
            "attribute" => Ok(OutlierTag::Attribute),
            "class" => Ok(OutlierTag::Class),
            other => Err(CodError::param(format!("unknown outlier tag {other:?}"))),
        }
    }
}

/// How class swaps are applied to multi-view data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ViewsMode {
    #[default]
    Single,
    /// Attribute corruption hits every view; each class swap hits a random
    /// non-empty subset of views.
    PerView,
}

/// Named configurations `class-attribute` in percent.
pub const CONFIG_NAMES: [&str; 6] = ["8-2", "5-5", "2-8", "0-8", "0-5", "0-2"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierConfig {
    pub class_pct: f64,
    pub attr_pct: f64,
    pub seed: u64,
    pub views_mode: ViewsMode,
}

impl OutlierConfig {
    pub fn new(class_pct: f64, attr_pct: f64, seed: u64) -> Result<Self> {
        if !(class_pct >= 0.0 && attr_pct >= 0.0 && class_pct + attr_pct < 1.0) {
            return Err(CodError::param(format!(
                "outlier fractions ({class_pct}, {attr_pct}) must be >= 0 and sum below 1"
            )));
        }
        Ok(Self {
            class_pct,
            attr_pct,
            seed,
            views_mode: ViewsMode::Single,
        })
    }

    /// One of `8-2, 5-5, 2-8, 0-8, 0-5, 0-2`.
    pub fn named(name: &str, seed: u64) -> Result<Self> {
        let (class, attr) = match name {
            "8-2" => (0.08, 0.02),
            "5-5" => (0.05, 0.05),
            "2-8" => (0.02, 0.08),
            "0-8" => (0.0, 0.08),
            "0-5" => (0.0, 0.05),
            "0-2" => (0.0, 0.02),
            other => return Err(CodError::UnknownConfig(other.to_string())),
        };
        Self::new(class, attr, seed)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_views_mode(self, views_mode: ViewsMode) -> Self {
        Self { views_mode, ..self }
    }

    /// `class-attribute` in whole percent, e.g. `8-2`.
    pub fn name(&self) -> String {
        format!(
            "{}-{}",
            (self.class_pct * 100.0).round(),
            (self.attr_pct * 100.0).round()
        )
    }
}

/// `floor(fraction * n)`, tolerant to representation error such as
/// `0.29 * 100 = 28.999...`.
pub fn outlier_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64 + 1e-9).floor() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorruptedDataset {
    pub data: LabeledDataset,
    pub truth: Vec<OutlierTag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorruptedMultiView {
    pub data: MultiViewDataset,
    pub truth: Vec<OutlierTag>,
}

pub fn outlier_mask(truth: &[OutlierTag]) -> Vec<bool> {
    truth.iter().map(|t| t.is_outlier()).collect()
}

/// Relabelings applied together: a swapped pair or a single reassignment.
type LabelChange = Vec<(usize, u32)>;

struct InjectionPlan {
    label_changes: Vec<LabelChange>,
    /// Corrupted samples and their new row-major feature values.
    attribute_rows: Vec<(usize, Vec<f64>)>,
    truth: Vec<OutlierTag>,
}

fn plan(ds: &LabeledDataset, config: &OutlierConfig, rng: &mut ChaCha8Rng) -> Result<InjectionPlan> {
    OutlierConfig::new(config.class_pct, config.attr_pct, config.seed)?;
    let n = ds.n_samples();
    let n_class = outlier_count(config.class_pct, n);
    let n_attr = outlier_count(config.attr_pct, n);
    if n_class > 0 && ds.n_classes() < 2 {
        return Err(CodError::param("class outliers need at least 2 classes"));
    }
    if n_class + n_attr > n {
        return Err(CodError::param("more outliers requested than samples"));
    }
    let mut truth = vec![OutlierTag::None; n];

    let class_idx = sample(rng, n, n_class).into_vec();
    for &i in &class_idx {
        truth[i] = OutlierTag::Class;
    }
    let remaining: Vec<usize> = (0..n).filter(|&i| truth[i] == OutlierTag::None).collect();
    let attr_idx: Vec<usize> = sample(rng, remaining.len(), n_attr)
        .into_iter()
        .map(|p| remaining[p])
        .collect();
    for &i in &attr_idx {
        truth[i] = OutlierTag::Attribute;
    }

    let labels = ds.labels();
    let mut label_changes = Vec::new();
    let mut pending: Vec<usize> = Vec::new();
    for &i in &class_idx {
        match pending.iter().position(|&p| labels[p] != labels[i]) {
            Some(pos) => {
                let p = pending.remove(pos);
                label_changes.push(vec![(p, labels[i]), (i, labels[p])]);
            }
            None => pending.push(i),
        }
    }
    for i in pending {
        let others: Vec<u32> = (1..=ds.n_classes()).filter(|&c| c != labels[i]).collect();
        label_changes.push(vec![(i, others[rng.random_range(0..others.len())])]);
    }

    let p = ds.n_features();
    let bands: Vec<(f64, f64, f64)> = (0..p)
        .map(|j| {
            let (lo, hi) = ds
                .column(j)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            let range = if hi > lo { hi - lo } else { 1.0 };
            (lo, hi, range)
        })
        .collect();
    let attribute_rows = attr_idx
        .iter()
        .map(|&i| {
            let row = bands
                .iter()
                .map(|&(lo, hi, range)| {
                    let low_side: bool = rng.random_bool(0.5);
                    let u: f64 = rng.random();
                    if low_side {
                        lo - 2.0 * range + u * range
                    } else {
                        hi + range + u * range
                    }
                })
                .collect();
            (i, row)
        })
        .collect();

    Ok(InjectionPlan {
        label_changes,
        attribute_rows,
        truth,
    })
}

fn corrupt_features(ds: &LabeledDataset, plan: &InjectionPlan) -> Vec<f64> {
    let p = ds.n_features();
    let mut features = ds.features().to_vec();
    for (i, row) in &plan.attribute_rows {
        features[i * p..(i + 1) * p].copy_from_slice(row);
    }
    features
}

/// Class injection followed by attribute injection on disjoint samples.
pub fn build_experiment_instance(
    ds: &LabeledDataset,
    config: &OutlierConfig,
) -> Result<CorruptedDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let plan = plan(ds, config, &mut rng)?;
    let mut labels = ds.labels().to_vec();
    for &(i, l) in plan.label_changes.iter().flatten() {
        labels[i] = l;
    }
    let data = ds
        .with_features(corrupt_features(ds, &plan))?
        .with_labels(labels)?;
    Ok(CorruptedDataset {
        data,
        truth: plan.truth,
    })
}

/// Injects into `ds` and projects onto the views described by `layout`.
/// Every class swap is applied in a uniformly chosen non-empty subset of
/// views when `config.views_mode` is [`ViewsMode::PerView`], and in all
/// views otherwise.
pub fn build_multiview_instance(
    ds: &LabeledDataset,
    layout: &[Vec<usize>],
    config: &OutlierConfig,
) -> Result<CorruptedMultiView> {
    let n_views = layout.len();
    if n_views == 0 || n_views > 16 {
        return Err(CodError::param(format!("{n_views} views not supported")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let plan = plan(ds, config, &mut rng)?;
    let corrupted = ds.with_features(corrupt_features(ds, &plan))?;
    let mut view_labels = vec![ds.labels().to_vec(); n_views];
    for change in &plan.label_changes {
        let mask: u32 = match config.views_mode {
            ViewsMode::PerView => rng.random_range(1..(1u32 << n_views)),
            ViewsMode::Single => (1u32 << n_views) - 1,
        };
        for (v, labels) in view_labels.iter_mut().enumerate() {
            if mask & (1 << v) != 0 {
                for &(i, l) in change {
                    labels[i] = l;
                }
            }
        }
    }
    let views = layout
        .iter()
        .zip(view_labels)
        .map(|(cols, labels)| corrupted.select_features(cols)?.with_labels(labels))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorruptedMultiView {
        data: MultiViewDataset::from_parts(views, layout.to_vec()),
        truth: plan.truth,
    })
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(CodError::param(format!("fraction {fraction} outside [0, 1)")));
    }
    Ok(())
}

pub fn inject_attribute_outliers(
    ds: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<CorruptedDataset> {
    check_fraction(fraction)?;
    build_experiment_instance(ds, &OutlierConfig::new(0.0, fraction, seed)?)
}

pub fn inject_class_outliers(
    ds: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<CorruptedDataset> {
    check_fraction(fraction)?;
    if ds.n_classes() < 2 {
        return Err(CodError::param("class outliers need at least 2 classes"));
    }
    build_experiment_instance(ds, &OutlierConfig::new(fraction, 0.0, seed)?)
}

/// Isotropic Gaussian blobs, one per center, sized as evenly as possible.
/// Class `i + 1` is drawn around `centers[i]`.
pub fn gaussian_blobs(
    centers: &[Vec<f64>],
    std_dev: f64,
    n_samples: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    let n_classes = centers.len();
    if n_classes == 0 || n_samples < n_classes {
        return Err(CodError::param("need at least one sample per blob"));
    }
    let dim = centers[0].len();
    if dim == 0 || centers.iter().any(|c| c.len() != dim) {
        return Err(CodError::param("blob centers must share a positive dimension"));
    }
    let normal = Normal::new(0.0, std_dev)
        .map_err(|e| CodError::param(format!("blob std {std_dev}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n_samples * dim);
    let mut labels = Vec::with_capacity(n_samples);
    for (c, center) in centers.iter().enumerate() {
        let size = n_samples / n_classes + usize::from(c < n_samples % n_classes);
        for _ in 0..size {
            features.extend(center.iter().map(|&m| m + normal.sample(&mut rng)));
            labels.push(c as u32 + 1);
        }
    }
    LabeledDataset::from_flat(features, dim, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize, classes: u32) -> LabeledDataset {
        let features = (0..n * 2).map(|x| x as f64).collect();
        let labels = (0..n).map(|i| (i as u32 % classes) + 1).collect();
        LabeledDataset::from_flat(features, 2, labels).unwrap()
    }

    #[test]
    fn tags_round_trip_through_strings() {
        for t in [OutlierTag::None, OutlierTag::Attribute, OutlierTag::Class] {
            assert_eq!(t.to_string().parse::<OutlierTag>().unwrap(), t);
        }
        assert!("weird".parse::<OutlierTag>().is_err());
    }

    #[test]
    fn named_configs() {
        let c = OutlierConfig::named("8-2", 1).unwrap();
        assert_eq!((c.class_pct, c.attr_pct), (0.08, 0.02));
        assert_eq!(c.name(), "8-2");
        for name in CONFIG_NAMES {
            assert_eq!(OutlierConfig::named(name, 0).unwrap().name(), name);
        }
        assert!(matches!(
            OutlierConfig::named("9-9", 0),
            Err(CodError::UnknownConfig(_))
        ));
        assert!(OutlierConfig::new(0.6, 0.4, 0).is_err());
        assert!(OutlierConfig::new(-0.1, 0.0, 0).is_err());
    }

    #[test]
    fn zero_fraction_is_a_no_op() {
        let ds = toy(20, 2);
        let a = inject_attribute_outliers(&ds, 0.0, 3).unwrap();
        assert_eq!(a.data, ds);
        assert!(a.truth.iter().all(|t| *t == OutlierTag::None));
        let c = inject_class_outliers(&ds, 0.0, 3).unwrap();
        assert_eq!(c.data, ds);
    }

    #[test]
    fn fraction_bounds() {
        let ds = toy(10, 2);
        assert!(inject_attribute_outliers(&ds, 1.0, 0).is_err());
        assert!(inject_attribute_outliers(&ds, -0.5, 0).is_err());
        assert!(inject_class_outliers(&toy(10, 1), 0.2, 0).is_err());
    }

    #[test]
    fn attribute_count_uses_floor() {
        let ds = toy(150, 3);
        let c = inject_attribute_outliers(&ds, 0.08, 11).unwrap();
        assert_eq!(c.truth.iter().filter(|t| t.is_outlier()).count(), 12);
        assert_eq!(outlier_count(0.29, 100), 29);
        assert_eq!(outlier_count(0.02, 149), 2);
    }

    #[test]
    fn paired_swap_exchanges_labels() {
        let ds = toy(100, 2);
        let mut exchanged = 0;
        for seed in 0..10 {
            let c = inject_class_outliers(&ds, 0.02, seed).unwrap();
            assert_eq!(c.data.features(), ds.features());
            let hit: Vec<usize> = (0..100).filter(|&i| c.truth[i].is_outlier()).collect();
            assert_eq!(hit.len(), 2);
            let (a, b) = (hit[0], hit[1]);
            if ds.labels()[a] != ds.labels()[b] {
                assert_eq!(c.data.labels()[a], ds.labels()[b]);
                assert_eq!(c.data.labels()[b], ds.labels()[a]);
                exchanged += 1;
            }
        }
        assert!(exchanged > 0);
    }

    #[test]
    fn leftover_is_reassigned_to_another_class() {
        let ds = LabeledDataset::from_flat(vec![0.0; 4], 1, vec![1, 1, 1, 2]).unwrap();
        for seed in 0..20 {
            let c = inject_class_outliers(&ds, 0.5, seed).unwrap();
            for i in 0..4 {
                let changed = c.data.labels()[i] != ds.labels()[i];
                assert_eq!(changed, c.truth[i] == OutlierTag::Class);
            }
        }
    }

    #[test]
    fn experiment_instance_is_disjoint_and_deterministic() {
        let ds = toy(200, 3);
        let config = OutlierConfig::named("5-5", 9).unwrap();
        let a = build_experiment_instance(&ds, &config).unwrap();
        let b = build_experiment_instance(&ds, &config).unwrap();
        assert_eq!(a, b);
        let count = |tag| a.truth.iter().filter(|&&t| t == tag).count();
        assert_eq!(count(OutlierTag::Class), 10);
        assert_eq!(count(OutlierTag::Attribute), 10);

        let only_attr = build_experiment_instance(&ds, &OutlierConfig::named("0-2", 9).unwrap())
            .unwrap();
        assert!(!only_attr.truth.contains(&OutlierTag::Class));
        assert_eq!(only_attr.data.labels(), ds.labels());
    }

    #[test]
    fn per_view_class_swaps_hit_some_views() {
        let ds = toy(100, 2);
        let layout = vec![vec![0], vec![1]];
        let config = OutlierConfig::named("8-2", 4)
            .unwrap()
            .with_views_mode(ViewsMode::PerView);
        let mv = build_multiview_instance(&ds, &layout, &config).unwrap();
        for i in 0..100 {
            let changed: Vec<bool> = mv
                .data
                .views()
                .iter()
                .map(|v| v.labels()[i] != ds.labels()[i])
                .collect();
            match mv.truth[i] {
                OutlierTag::Class => assert!(changed.iter().any(|&c| c)),
                _ => assert!(changed.iter().all(|&c| !c)),
            }
        }
        let attr = mv.truth.iter().position(|t| *t == OutlierTag::Attribute).unwrap();
        for (v, cols) in mv.data.views().iter().zip(&layout) {
            assert!(v.row(attr)[0] > 199.0 * 2.0 || v.row(attr)[0] < 0.0, "{cols:?}");
        }
    }

    #[test]
    fn blobs_shape() {
        let ds = gaussian_blobs(&[vec![0.0, 0.0], vec![10.0, 10.0]], 1.0, 5, 1).unwrap();
        assert_eq!(ds.labels(), &[1, 1, 1, 2, 2]);
        assert_eq!(ds.n_features(), 2);
        assert!(ds.row(4)[0] > 5.0);
        assert!(gaussian_blobs(&[], 1.0, 5, 1).is_err());
    }
}
