//! End-to-end training: parse, clean, tune, scale, solve.

use std::path::Path;
use std::time::Instant;

use crate::error::Result;
use crate::ingest::{preprocess, read_libsvm, FeatureMeta, ModelFile, RawDataset, SolverMeta, FORMAT_VERSION};
use crate::solver::{
    compute_penalty_c, compute_weights, scale_problem, sgs_admm_solve, train_error, LinearModel, SolveResult,
    SolverConfig,
};

#[derive(Debug, Clone, Default)]
pub struct TrainOptions {
    pub config: SolverConfig,
    /// Replaces the distance-based penalty parameter.
    pub c_override: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: LinearModel,
    pub result: SolveResult,
    pub n: usize,
    /// Feature count after removing all-zero features.
    pub d: usize,
    pub c_used: f64,
    /// Seconds spent reading the data file.
    pub read_time: f64,
    pub train_error_pct: f64,
    pub q: f64,
    pub mu: f64,
}

impl TrainReport {
    /// Read time plus solve time.
    pub fn total_time(&self) -> f64 {
        self.read_time + self.result.solve_time
    }

    pub fn to_model_file(&self) -> ModelFile {
        let r = &self.result;
        let res = &r.final_residuals;
        ModelFile {
            format_version: FORMAT_VERSION,
            q: self.q,
            c: self.c_used,
            z_scale: self.model.z_scale,
            mu: self.mu,
            beta: self.model.beta,
            w: self.model.w_scaled.clone(),
            feature_meta: self.model.meta.clone(),
            solver: SolverMeta {
                backend: r.backend_used.to_string(),
                converged: r.converged,
                iterations: r.iterations,
                psqmr_total: r.psqmr_total,
                double_count: r.double_count,
                eta_p: res.eta_p,
                eta_d: res.eta_d,
                eta_c: res.eta_c,
                eta_gap: res.eta_gap,
                obj_primal: res.obj_primal,
                obj_dual: res.obj_dual,
            },
        }
    }
}

pub fn train_file(path: impl AsRef<Path>, opts: &TrainOptions) -> Result<TrainReport> {
    let start = Instant::now();
    let raw = read_libsvm(path)?;
    let read_time = start.elapsed().as_secs_f64();
    let mut report = train_dataset(&raw, opts)?;
    report.read_time = read_time;
    Ok(report)
}

pub fn train_dataset(raw: &RawDataset, opts: &TrainOptions) -> Result<TrainReport> {
    let cfg = &opts.config;
    cfg.validate()?;
    let clean = preprocess(raw)?;
    let q = cfg.q;
    let c = match opts.c_override {
        Some(c) => c,
        None => compute_penalty_c(&clean.x, &clean.y, q, cfg.seed)?.0,
    };
    let tau = compute_weights(&clean.y, q)?;
    let e = vec![1.0; clean.y.len()];
    let data = scale_problem(&clean.x, &clean.y, &e, c, q, &tau)?;
    let result = sgs_admm_solve(&data, cfg)?;
    let model = LinearModel::new(result.w.clone(), result.beta, data.z_scale, clean.meta.clone())?;
    let train_error_pct = train_error(&model, &raw.x, &clean.y)?;
    Ok(TrainReport {
        model,
        result,
        n: data.n(),
        d: data.d(),
        c_used: c,
        read_time: 0.0,
        train_error_pct,
        q,
        mu: cfg.mu,
    })
}

impl LinearModel {
    pub fn from_model_file(m: &ModelFile) -> Result<Self> {
        m.validate()?;
        LinearModel::new(m.w.clone(), m.beta, m.z_scale, m.feature_meta.clone())
    }

    pub fn feature_meta(&self) -> &FeatureMeta {
        &self.meta
    }
}
