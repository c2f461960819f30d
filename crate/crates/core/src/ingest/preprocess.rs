use serde::{Deserialize, Serialize};

use super::libsvm::RawDataset;
use crate::error::{Error, Result};
use crate::linalg::CscMatrix;

/// Map from the original feature space to the cleaned one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    /// Original (0-based) indices of the retained features.
    pub kept_ids: Vec<usize>,
    /// Max-abs value of each retained feature before scaling.
    pub scales: Vec<f64>,
    pub d_original: usize,
}

impl FeatureMeta {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::ModelSchema(m.to_string()));
        if self.kept_ids.len() != self.scales.len() {
            return bad("feature_meta.kept_ids and feature_meta.scales differ in length");
        }
        if self.kept_ids.windows(2).any(|w| w[0] >= w[1]) {
            return bad("feature_meta.kept_ids must be strictly increasing");
        }
        if self.kept_ids.last().is_some_and(|&k| k >= self.d_original) {
            return bad("feature_meta.kept_ids exceeds d_original");
        }
        if self.scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return bad("feature_meta.scales must be positive");
        }
        Ok(())
    }
}

/// Cleaned training matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    pub x: CscMatrix,
    pub y: Vec<f64>,
    pub meta: FeatureMeta,
}

/// Drops all-zero features and divides every remaining feature by its
/// max-abs value.
pub fn preprocess(raw: &RawDataset) -> Result<Preprocessed> {
    let y = raw
        .labels
        .clone()
        .ok_or_else(|| Error::InvalidData(format!("{}: training data needs labels", raw.source_path)))?;
    let max_abs = raw.x.row_max_abs();
    let kept_ids: Vec<usize> = (0..raw.d()).filter(|&i| max_abs[i] > 0.0).collect();
    if kept_ids.is_empty() {
        return Err(Error::InvalidData(format!("{}: every feature is zero", raw.source_path)));
    }
    let scales: Vec<f64> = kept_ids.iter().map(|&i| max_abs[i]).collect();
    let x = raw.x.select_rows(&kept_ids)?.divide_rows(&scales)?;
    Ok(Preprocessed { x, y, meta: FeatureMeta { kept_ids, scales, d_original: raw.d() } })
}
