use crate::error::{check_len, Error, Result};
use crate::ingest::FeatureMeta;
use crate::linalg::CscMatrix;

/// Trained classifier `f(x) = β + xᵀw` on raw (unpreprocessed) features.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    /// Weights in the solver's scaled space, one per kept feature.
    pub w_scaled: Vec<f64>,
    pub beta: f64,
    pub z_scale: f64,
    pub meta: FeatureMeta,
}

impl LinearModel {
    pub fn new(w_scaled: Vec<f64>, beta: f64, z_scale: f64, meta: FeatureMeta) -> Result<Self> {
        check_len(meta.kept_ids.len(), w_scaled.len())?;
        Ok(Self { w_scaled, beta, z_scale, meta })
    }

    /// Weights over the original feature space; dropped features get zero.
    pub fn original_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.meta.d_original];
        for ((&k, &s), &wj) in self.meta.kept_ids.iter().zip(&self.meta.scales).zip(&self.w_scaled) {
            w[k] = wj / (self.z_scale * s);
        }
        w
    }

    /// `β + xᵢᵀw` for every column of `x`. Features beyond the training
    /// dimension are ignored.
    pub fn decision_values(&self, x: &CscMatrix) -> Result<Vec<f64>> {
        if self.w_scaled.len() != self.meta.kept_ids.len() {
            return Err(Error::DimensionMismatch { expected: self.meta.kept_ids.len(), found: self.w_scaled.len() });
        }
        let w = self.original_weights();
        Ok((0..x.ncols())
            .map(|j| {
                let (rows, vals) = x.col(j);
                let dotp: f64 = rows.iter().zip(vals).filter(|(&r, _)| r < w.len()).map(|(&r, &v)| v * w[r]).sum();
                self.beta + dotp
            })
            .collect())
    }

    /// `+1` where the decision value is positive, `−1` otherwise.
    pub fn predict(&self, x: &CscMatrix) -> Result<Vec<f64>> {
        Ok(self.decision_values(x)?.into_iter().map(|f| if f > 0.0 { 1.0 } else { -1.0 }).collect())
    }
}

/// Percentage of samples with `yᵢ · sgn(fᵢ) ≤ 0`; a zero decision value is
/// always an error.
pub fn error_rate(decision: &[f64], y: &[f64]) -> Result<f64> {
    check_len(decision.len(), y.len())?;
    if y.is_empty() {
        return Ok(0.0);
    }
    let wrong = decision.iter().zip(y).filter(|(&f, &yi)| yi * sign(f) <= 0.0).count();
    Ok(wrong as f64 / y.len() as f64 * 100.0)
}

pub fn train_error(model: &LinearModel, x: &CscMatrix, y: &[f64]) -> Result<f64> {
    error_rate(&model.decision_values(x)?, y)
}

fn sign(f: f64) -> f64 {
    if f > 0.0 {
        1.0
    } else if f < 0.0 {
        -1.0
    } else {
        0.0
    }
}
