use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CodError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CodError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("label column {0} not found")]
    MissingLabelColumn(String),
    #[error("row {row}, column {column:?}: {value:?} is not a finite number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("node {node} is not a member of community {community}")]
    NotAMember { node: usize, community: usize },
    #[error("node {0} belongs to no community")]
    NoCommunity(usize),
    #[error("graph has no edges")]
    EdgelessGraph,
    #[error("both outlier and inlier samples are required")]
    SingleClass,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unknown outlier configuration {0:?} (expected one of 8-2, 5-5, 2-8, 0-8, 0-5, 0-2)")]
    UnknownConfig(String),
}

impl CodError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CodError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        CodError::InvalidParameter(msg.into())
    }
}
