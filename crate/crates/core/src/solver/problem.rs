use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::CscMatrix;

/// Per-class cap on the samples used for the median distance.
pub const DISTANCE_SUBSAMPLE: usize = 2000;

/// Scaled training problem. Samples are the columns of `z_tilde`.
#[derive(Debug, Clone)]
pub struct ProblemData {
    /// `X diag(y) / z_scale`, shape `d x n`.
    pub z_tilde: CscMatrix,
    pub y: Vec<f64>,
    /// Slack penalty weights, `max eᵢ = 1`.
    pub e: Vec<f64>,
    /// Loss weights `ωᵢ = τᵢ^q`.
    pub weights: Vec<f64>,
    pub c: f64,
    pub q: f64,
    /// `√‖X‖_F`; also the radius of the ball holding the scaled `w`.
    pub z_scale: f64,
}

impl ProblemData {
    pub fn n(&self) -> usize {
        self.z_tilde.ncols()
    }

    pub fn d(&self) -> usize {
        self.z_tilde.nrows()
    }
}

pub fn class_counts(y: &[f64]) -> (usize, usize) {
    let pos = y.iter().filter(|&&v| v > 0.0).count();
    (pos, y.len() - pos)
}

fn require_two_classes(y: &[f64]) -> Result<(usize, usize)> {
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidData(format!("label {bad} is not ±1")));
    }
    let (positives, negatives) = class_counts(y);
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass { positives, negatives });
    }
    Ok((positives, negatives))
}

/// Builds the scaled problem; `tau` are the class weights and `ωᵢ = τᵢ^q`.
pub fn scale_problem(x: &CscMatrix, y: &[f64], e: &[f64], c: f64, q: f64, tau: &[f64]) -> Result<ProblemData> {
    let n = x.ncols();
    check_len(n, y.len())?;
    check_len(n, e.len())?;
    check_len(n, tau.len())?;
    require_two_classes(y)?;
    if !(c > 0.0 && c.is_finite()) || !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidData("C and q must be positive".into()));
    }
    let e_max = e.iter().cloned().fold(0.0, f64::max);
    if e.iter().any(|&v| !(v > 0.0)) || e_max != 1.0 {
        return Err(Error::InvalidData("penalty weights must be positive with maximum 1".into()));
    }
    if tau.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidData("class weights must be positive".into()));
    }
    let fro = x.frobenius_norm();
    if !(fro > 0.0 && fro.is_finite()) {
        return Err(Error::InvalidData("data matrix is zero".into()));
    }
    let z_scale = fro.sqrt();
    let scales: Vec<f64> = y.iter().map(|&yi| yi / z_scale).collect();
    Ok(ProblemData {
        z_tilde: x.scale_columns(&scales)?,
        y: y.to_vec(),
        e: e.to_vec(),
        weights: tau.iter().map(|t| t.powf(q)).collect(),
        c,
        q,
        z_scale,
    })
}

/// `10^{q+1} · max{1, 10^{q−1} · ln(n) · max{1000, d}^{1/3} / dist^{q+1}}`.
pub fn penalty_formula(q: f64, n: usize, d: usize, dist: f64) -> f64 {
    let growth = 10f64.powf(q - 1.0) * (n as f64).ln() * (d.max(1000) as f64).cbrt() / dist.powf(q + 1.0);
    10f64.powf(q + 1.0) * growth.max(1.0)
}

/// Median Euclidean distance between samples of opposite classes, ignoring
/// exact duplicates. Classes larger than [`DISTANCE_SUBSAMPLE`] are
/// subsampled with `seed` when `n` exceeds that size. Returns `+∞` if every
/// cross-class pair coincides.
pub fn median_class_distance(x: &CscMatrix, y: &[f64], seed: u64) -> Result<f64> {
    check_len(x.ncols(), y.len())?;
    require_two_classes(y)?;
    let mut pos: Vec<usize> = (0..y.len()).filter(|&i| y[i] > 0.0).collect();
    let mut neg: Vec<usize> = (0..y.len()).filter(|&i| y[i] < 0.0).collect();
    if y.len() > DISTANCE_SUBSAMPLE {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for class in [&mut pos, &mut neg] {
            if class.len() > DISTANCE_SUBSAMPLE {
                let mut picked: Vec<usize> =
                    sample(&mut rng, class.len(), DISTANCE_SUBSAMPLE).into_iter().map(|k| class[k]).collect();
                picked.sort_unstable();
                *class = picked;
            }
        }
    }
    let mut dists: Vec<f64> = Vec::with_capacity(pos.len() * neg.len());
    for &i in &pos {
        for &j in &neg {
            let dsq = x.col_distance_sq(i, x, j);
            if dsq > 0.0 {
                dists.push(dsq.sqrt());
            }
        }
    }
    if dists.is_empty() {
        return Ok(f64::INFINITY);
    }
    let len = dists.len();
    let mid = len / 2;
    let (_, &mut upper, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    if len % 2 == 1 {
        return Ok(upper);
    }
    let lower = dists[..mid].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(0.5 * (lower + upper))
}

/// Penalty parameter and the median distance it was derived from.
pub fn compute_penalty_c(x: &CscMatrix, y: &[f64], q: f64, seed: u64) -> Result<(f64, f64)> {
    let dist = median_class_distance(x, y, seed)?;
    Ok((penalty_formula(q, x.ncols(), x.nrows(), dist), dist))
}

/// Class-balancing weights `τᵢ ∈ (0, 1]`; the majority class gets the
/// smaller weight.
pub fn compute_weights(y: &[f64], q: f64) -> Result<Vec<f64>> {
    let (n_pos, n_neg) = require_two_classes(y)?;
    let n = y.len() as f64;
    let k = n / n.ln();
    let tau_pos = (n_pos as f64 / k).powf(1.0 / (1.0 + q));
    let tau_neg = (n_neg as f64 / k).powf(1.0 / (1.0 + q));
    let top = tau_pos.max(tau_neg);
    Ok(y.iter().map(|&yi| if yi > 0.0 { tau_neg / top } else { tau_pos / top }).collect())
}
