#![allow(dead_code)]

use dwd_core::linalg::{CscMatrix, DenseMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Random sparse matrix with roughly `density` of its entries nonzero.
pub fn random_csc(rng: &mut ChaCha8Rng, nrows: usize, ncols: usize, density: f64) -> CscMatrix {
    let mut trip = Vec::new();
    for j in 0..ncols {
        for i in 0..nrows {
            if rng.random::<f64>() < density {
                trip.push((i, j, rng.random_range(-1.0..1.0)));
            }
        }
    }
    CscMatrix::from_triplets(nrows, ncols, &trip).unwrap()
}

/// Alternating `±1` labels.
pub fn alternating_labels(n: usize) -> Vec<f64> {
    (0..n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn csc_to_na(m: &CscMatrix) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        let (rows, vals) = m.col(j);
        for (&i, &v) in rows.iter().zip(vals) {
            out[(i, j)] += v;
        }
    }
    out
}

/// Dense `[Z Zᵀ + μ² I, Z y; (Z y)ᵀ, yᵀy]`, assembled entry by entry.
pub fn dense_normal_matrix(z: &CscMatrix, y: &[f64], mu_sq: f64) -> DMatrix<f64> {
    let zd = csc_to_na(z);
    let (d, n) = zd.shape();
    let mut a = DMatrix::zeros(d + 1, d + 1);
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..n {
                s += zd[(i, k)] * zd[(j, k)];
            }
            a[(i, j)] = s;
        }
        a[(i, i)] += mu_sq;
        let mut s = 0.0;
        for k in 0..n {
            s += zd[(i, k)] * y[k];
        }
        a[(i, d)] = s;
        a[(d, i)] = s;
    }
    a[(d, d)] = y.iter().map(|v| v * v).sum();
    a
}

pub fn na_matvec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (a * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b).max(f64::MIN_POSITIVE)
}

/// Random symmetric positive definite matrix with eigenvalues spread
/// log-uniformly over `[1, cond]`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> DenseMatrix {
    let g: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let q = g.qr().q();
    let eig: Vec<f64> =
        (0..n).map(|i| cond.powf(if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 })).collect();
    let s: DMatrix<f64> = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig)) * q.transpose();
    DenseMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]))
}

/// Two Gaussian clouds, labels alternating, means `±shift` on the first
/// `signal` features; every sample has a margin of at least `shift` along
/// the signal direction.
pub fn separable_dataset(seed: u64, n: usize, d: usize, signal: usize, shift: f64) -> (CscMatrix, Vec<f64>) {
    let mut rng = rng(seed);
    let y = alternating_labels(n);
    let mut trip = Vec::new();
    for (j, &yj) in y.iter().enumerate() {
        for i in 0..d {
            if i < signal {
                let noise: f64 = rng.random_range(-0.5..0.5) * shift;
                trip.push((i, j, yj * shift + noise));
            } else if rng.random::<f64>() < 0.05 {
                trip.push((i, j, rng.random_range(-1.0..1.0)));
            }
        }
    }
    (CscMatrix::from_triplets(d, n, &trip).unwrap(), y)
}
