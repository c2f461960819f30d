use std::path::Path;

use serde::{Deserialize, Serialize};

use super::preprocess::FeatureMeta;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: i64 = 1;

/// Persisted classifier. `w` lives in the scaled space of the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: i64,
    pub q: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub z_scale: f64,
    pub mu: f64,
    pub beta: f64,
    pub w: Vec<f64>,
    pub feature_meta: FeatureMeta,
    pub solver: SolverMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub backend: String,
    pub converged: bool,
    pub iterations: usize,
    pub psqmr_total: usize,
    pub double_count: usize,
    pub eta_p: f64,
    pub eta_d: f64,
    pub eta_c: f64,
    pub eta_gap: f64,
    pub obj_primal: f64,
    pub obj_dual: f64,
}

impl ModelFile {
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ModelSchema(e.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::ModelSchema(e.message().to_string()))?;
        let version = match table.get("format_version") {
            None => return Err(Error::ModelSchema("missing field `format_version`".into())),
            Some(toml::Value::Integer(v)) => *v,
            Some(_) => return Err(Error::ModelSchema("`format_version` must be an integer".into())),
        };
        if version != FORMAT_VERSION {
            return Err(Error::ModelVersion { found: version, expected: FORMAT_VERSION });
        }
        let model: ModelFile = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::ModelSchema(e.message().to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.feature_meta.validate()?;
        if self.w.len() != self.feature_meta.kept_ids.len() {
            return Err(Error::ModelSchema(format!(
                "w has {} entries but feature_meta keeps {} features",
                self.w.len(),
                self.feature_meta.kept_ids.len()
            )));
        }
        let finite = self.w.iter().all(|v| v.is_finite())
            && [self.q, self.c, self.z_scale, self.mu, self.beta].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::ModelSchema("non-finite parameter".into()));
        }
        if !(self.z_scale > 0.0 && self.q > 0.0 && self.c > 0.0 && self.mu > 0.0) {
            return Err(Error::ModelSchema("q, C, z_scale and mu must be positive".into()));
        }
        Ok(())
    }
}

pub fn write_model(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = model.to_toml_string()?;
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn read_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    ModelFile::from_toml_str(&text)
}
