//! Labeled tabular datasets: CSV loading, z-score normalization and
//! feature-split views.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CodError, Result};
use crate::simulate::OutlierTag;

/// Name of the ground-truth column written next to injected datasets.
pub const OUTLIER_COLUMN: &str = "__outlier";

/// Which CSV column holds the class label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
    /// The last column other than `__outlier`.
    #[default]
    Last,
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Purely numeric selectors are 0-based indices, anything else a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// `N` samples with `n` real features each and class ids in `1..=n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<f64>,
    n_samples: usize,
    n_features: usize,
    labels: Vec<u32>,
    n_classes: u32,
    feature_names: Option<Vec<String>>,
    class_names: Option<Vec<String>>,
    label_name: Option<String>,
}

impl LabeledDataset {
    /// Builds a dataset from row-major features.
    ///
    /// `labels` must use contiguous ids `1..=n_l` with every id present.
    pub fn from_flat(features: Vec<f64>, n_features: usize, labels: Vec<u32>) -> Result<Self> {
        let n_classes = labels.iter().copied().max().unwrap_or(0);
        let ds = Self::with_classes(features, n_features, labels, n_classes)?;
        let mut seen = vec![false; n_classes as usize];
        for &l in &ds.labels {
            seen[(l - 1) as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(CodError::InvalidDataset(format!(
                "class id {} never appears",
                missing + 1
            )));
        }
        Ok(ds)
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u32>) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(CodError::InvalidDataset("ragged feature rows".into()));
        }
        Self::from_flat(rows.concat(), n_features, labels)
    }

    /// Like [`from_flat`](Self::from_flat) but with an explicit class count, so
    /// some classes may be absent (e.g. after label corruption).
    pub fn with_classes(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<u32>,
        n_classes: u32,
    ) -> Result<Self> {
        let n_samples = labels.len();
        if n_samples == 0 {
            return Err(CodError::EmptyDataset);
        }
        if n_features == 0 {
            return Err(CodError::InvalidDataset("no feature columns".into()));
        }
        if features.len() != n_samples * n_features {
            return Err(CodError::SizeMismatch(format!(
                "{} feature values for {n_samples}x{n_features}",
                features.len()
            )));
        }
        if let Some(pos) = features.iter().position(|x| !x.is_finite()) {
            return Err(CodError::InvalidDataset(format!(
                "non-finite value at sample {}, feature {}",
                pos / n_features,
                pos % n_features
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > n_classes) {
            return Err(CodError::InvalidDataset(format!(
                "label {bad} outside 1..={n_classes}"
            )));
        }
        Ok(Self {
            features,
            n_samples,
            n_features,
            labels,
            n_classes,
            feature_names: None,
            class_names: None,
            label_name: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features {
            return Err(CodError::SizeMismatch(format!(
                "{} names for {} features",
                names.len(),
                self.n_features
            )));
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> u32 {
        self.n_classes
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Row-major feature storage.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.n_features)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Original label strings, indexed by `id - 1`.
    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes as usize];
        for &l in &self.labels {
            counts[(l - 1) as usize] += 1;
        }
        counts
    }

    /// Same features, new labels over the same class set.
    pub fn with_labels(&self, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != self.n_samples {
            return Err(CodError::SizeMismatch(format!(
                "{} labels for {} samples",
                labels.len(),
                self.n_samples
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > self.n_classes) {
            return Err(CodError::InvalidDataset(format!(
                "label {bad} outside 1..={}",
                self.n_classes
            )));
        }
        Ok(Self {
            labels,
            ..self.clone()
        })
    }

    /// Same labels, new row-major features of the same shape.
    pub fn with_features(&self, features: Vec<f64>) -> Result<Self> {
        let ds = Self::with_classes(
            features,
            self.n_features,
            self.labels.clone(),
            self.n_classes,
        )?;
        Ok(Self {
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
            label_name: self.label_name.clone(),
            ..ds
        })
    }

    /// Keeps only the given feature columns, in the given order.
    pub fn select_features(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(CodError::param("a view needs at least one feature"));
        }
        if let Some(&c) = columns.iter().find(|&&c| c >= self.n_features) {
            return Err(CodError::param(format!(
                "feature index {c} out of range 0..{}",
                self.n_features
            )));
        }
        let features = self
            .rows()
            .flat_map(|r| columns.iter().map(move |&c| r[c]))
            .collect();
        let mut ds = Self::with_classes(
            features,
            columns.len(),
            self.labels.clone(),
            self.n_classes,
        )?;
        ds.feature_names = self
            .feature_names
            .as_ref()
            .map(|names| columns.iter().map(|&c| names[c].clone()).collect());
        ds.class_names = self.class_names.clone();
        ds.label_name = self.label_name.clone();
        Ok(ds)
    }
}

/// Loads a CSV dataset with a header row. A `__outlier` column, if present,
/// is ignored; use [`load_dataset_with_truth`] to read it.
pub fn load_dataset(path: impl AsRef<Path>, label_column: &LabelColumn) -> Result<LabeledDataset> {
    load_dataset_with_truth(path, label_column).map(|(ds, _)| ds)
}

pub fn load_dataset_with_truth(
    path: impl AsRef<Path>,
    label_column: &LabelColumn,
) -> Result<(LabeledDataset, Option<Vec<OutlierTag>>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CodError::io(path, e))?;
    read_dataset(file, label_column)
}

pub fn read_dataset<R: Read>(
    reader: R,
    label_column: &LabelColumn,
) -> Result<(LabeledDataset, Option<Vec<OutlierTag>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let truth_col = headers.iter().position(|h| h == OUTLIER_COLUMN);
    let label_col = match label_column {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CodError::MissingLabelColumn(name.clone()))?,
        LabelColumn::Last => (0..headers.len())
            .rev()
            .find(|&i| Some(i) != truth_col)
            .ok_or_else(|| CodError::MissingLabelColumn("<last>".into()))?,
        LabelColumn::Index(i) if *i < headers.len() && Some(*i) != truth_col => *i,
        LabelColumn::Index(i) => return Err(CodError::MissingLabelColumn(i.to_string())),
    };
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| c != label_col && Some(c) != truth_col)
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut truth = Vec::new();
    let mut class_ids: HashMap<String, u32> = HashMap::new();
    let mut class_names = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        for &c in &feature_cols {
            let cell = &record[c];
            let value = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CodError::BadCell {
                    row,
                    column: headers[c].clone(),
                    value: cell.to_string(),
                })?;
            features.push(value);
        }
        let raw = &record[label_col];
        let id = *class_ids.entry(raw.to_string()).or_insert_with(|| {
            class_names.push(raw.to_string());
            class_names.len() as u32
        });
        labels.push(id);
        if let Some(t) = truth_col {
            truth.push(record[t].parse::<OutlierTag>().map_err(|_| CodError::BadCell {
                row,
                column: OUTLIER_COLUMN.into(),
                value: record[t].to_string(),
            })?);
        }
    }
    if labels.is_empty() {
        return Err(CodError::EmptyDataset);
    }
    let mut ds = LabeledDataset::from_flat(features, feature_cols.len(), labels)?;
    ds.feature_names = Some(feature_cols.iter().map(|&c| headers[c].clone()).collect());
    ds.class_names = Some(class_names);
    ds.label_name = Some(headers[label_col].clone());
    Ok((ds, truth_col.map(|_| truth)))
}

/// Writes `ds` as CSV: features, the label column, and `__outlier` when
/// `truth` is given.
pub fn write_dataset<W: Write>(
    writer: W,
    ds: &LabeledDataset,
    truth: Option<&[OutlierTag]>,
) -> Result<()> {
    if let Some(t) = truth {
        if t.len() != ds.n_samples() {
            return Err(CodError::SizeMismatch(format!(
                "{} truth tags for {} samples",
                t.len(),
                ds.n_samples()
            )));
        }
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = match ds.feature_names() {
        Some(names) => names.to_vec(),
        None => (0..ds.n_features()).map(|j| format!("f{j}")).collect(),
    };
    header.push(ds.label_name.clone().unwrap_or_else(|| "label".into()));
    if truth.is_some() {
        header.push(OUTLIER_COLUMN.into());
    }
    w.write_record(&header)?;
    for (i, row) in ds.rows().enumerate() {
        let mut record: Vec<String> = row.iter().map(f64::to_string).collect();
        let label = ds.labels()[i];
        record.push(match ds.class_names() {
            Some(names) => names[(label - 1) as usize].clone(),
            None => label.to_string(),
        });
        if let Some(t) = truth {
            record.push(t[i].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| CodError::io("<csv output>", e))?;
    Ok(())
}

/// Column-wise z-scores using the sample (n-1) standard deviation.
/// Constant columns become all zeros.
pub fn normalize_features(ds: &LabeledDataset) -> Result<LabeledDataset> {
    let n = ds.n_samples();
    if n < 2 {
        return Err(CodError::param("normalization needs at least 2 samples"));
    }
    let p = ds.n_features();
    let mut out = ds.features().to_vec();
    for j in 0..p {
        let mean = ds.column(j).sum::<f64>() / n as f64;
        let var = ds.column(j).map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        let constant = sd <= 1e-12 * mean.abs().max(1.0);
        for i in 0..n {
            let x = &mut out[i * p + j];
            *x = if constant { 0.0 } else { (*x - mean) / sd };
        }
    }
    ds.with_features(out)
}

/// Labeled dataset split into feature views over the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<LabeledDataset>,
    view_feature_indices: Vec<Vec<usize>>,
}

impl MultiViewDataset {
    /// Projects `ds` onto the given column sets. The sets are not required to
    /// be disjoint here; [`split_views`] always produces a partition.
    pub fn from_layout(ds: &LabeledDataset, layout: &[Vec<usize>]) -> Result<Self> {
        if layout.is_empty() {
            return Err(CodError::param("at least one view is required"));
        }
        let views = layout
            .iter()
            .map(|cols| ds.select_features(cols))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            views,
            view_feature_indices: layout.to_vec(),
        })
    }

    /// Assembles views that may carry diverging labels (class outliers
    /// injected in a subset of views).
    pub(crate) fn from_parts(views: Vec<LabeledDataset>, layout: Vec<Vec<usize>>) -> Self {
        Self {
            views,
            view_feature_indices: layout,
        }
    }

    pub fn views(&self) -> &[LabeledDataset] {
        &self.views
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn n_samples(&self) -> usize {
        self.views[0].n_samples()
    }

    pub fn view_feature_indices(&self) -> &[Vec<usize>] {
        &self.view_feature_indices
    }
}

/// Random disjoint feature partition: shuffle columns by `seed`, then cut
/// into `n_views` contiguous blocks whose sizes differ by at most one.
pub fn view_layout(n_features: usize, n_views: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if n_views < 2 {
        return Err(CodError::param("a multi-view split needs at least 2 views"));
    }
    if n_features < n_views {
        return Err(CodError::param(format!(
            "cannot split {n_features} features into {n_views} views"
        )));
    }
    let mut order: Vec<usize> = (0..n_features).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n_features / n_views;
    let extra = n_features % n_views;
    let mut layout = Vec::with_capacity(n_views);
    let mut start = 0;
    for v in 0..n_views {
        let len = base + usize::from(v < extra);
        let mut block = order[start..start + len].to_vec();
        block.sort_unstable();
        layout.push(block);
        start += len;
    }
    Ok(layout)
}

pub fn split_views(ds: &LabeledDataset, n_views: usize, seed: u64) -> Result<MultiViewDataset> {
    let layout = view_layout(ds.n_features(), n_views, seed)?;
    MultiViewDataset::from_layout(ds, &layout)
}
