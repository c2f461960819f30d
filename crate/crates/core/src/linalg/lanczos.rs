//! Top-k eigenpairs of a symmetric operator by Lanczos with full
//! reorthogonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{axpy, dot, norm2, scale_in_place, DenseMatrix};
use crate::error::{Error, Result};

const BREAKDOWN_RTOL: f64 = 1e-12;
const CHECK_EVERY: usize = 4;

/// Leading eigenpairs, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialEig {
    pub eigenvalues: Vec<f64>,
    /// `d × k`, column `i` pairs with `eigenvalues[i]`.
    pub vectors: DenseMatrix,
    /// Explicit `‖M vᵢ − λᵢ vᵢ‖` for each pair.
    pub residual_norms: Vec<f64>,
    /// Estimate of `‖M‖` gathered along the way.
    pub norm_estimate: f64,
}

impl PartialEig {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Computes the `k` largest eigenpairs of the symmetric operator `apply`
/// (which writes `M x` into its second argument) on `R^dim`.
///
/// Convergence means `|βₘ sₘᵢ| ≤ tol·‖M‖` for every wanted Ritz pair. When the
/// Krylov space becomes invariant before `k` vectors are found, the process
/// restarts from a fresh random vector orthogonal to the basis.
pub fn lanczos_topk<F>(
    dim: usize,
    apply: F,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<PartialEig>
where
    F: Fn(&[f64], &mut [f64]),
{
    if k == 0 || k > dim {
        return Err(Error::InvalidData(format!(
            "requested {k} eigenpairs of a {dim}-dimensional operator"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = max_iter.max(k).min(dim);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut norm_est: f64 = 0.0;
    let mut prev_beta = 0.0;
    let mut w = vec![0.0; dim];

    let mut q = random_orthogonal(&mut rng, dim, &basis);
    loop {
        apply(&q, &mut w);
        let alpha = dot(&q, &w);
        axpy(-alpha, &q, &mut w);
        if let Some(prev) = basis.last() {
            axpy(-prev_beta, prev, &mut w);
        }
        basis.push(q);
        reorthogonalize(&mut w, &basis);
        reorthogonalize(&mut w, &basis);
        let beta = norm2(&w);
        alphas.push(alpha);
        norm_est = norm_est.max(alpha.abs() + beta + prev_beta);

        let m = basis.len();
        let invariant = beta <= BREAKDOWN_RTOL * norm_est || m == dim;
        let at_limit = m == limit;
        if m >= k && (invariant || at_limit || (m - k) % CHECK_EVERY == 0) {
            let (theta, s) = tridiagonal_eig(&alphas, &betas);
            let order = descending_order(&theta);
            let wanted = &order[..k];
            let converged = invariant
                || wanted.iter().all(|&i| (beta * s[i * m + m - 1]).abs() <= tol * norm_est);
            if converged || at_limit {
                let eig = ritz_pairs(&apply, &basis, &theta, &s, wanted, norm_est);
                if converged {
                    return Ok(eig);
                }
                return Err(Error::LanczosNotConverged { iterations: m, best: Box::new(eig) });
            }
        }
        if invariant {
            betas.push(0.0);
            prev_beta = 0.0;
            q = random_orthogonal(&mut rng, dim, &basis);
        } else {
            betas.push(beta);
            prev_beta = beta;
            scale_in_place(1.0 / beta, &mut w);
            q = w.clone();
        }
    }
}

fn reorthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    let coefs: Vec<f64> = basis.iter().map(|b| dot(b, w)).collect();
    for (b, c) in basis.iter().zip(coefs) {
        axpy(-c, b, w);
    }
}

fn random_orthogonal(rng: &mut ChaCha8Rng, dim: usize, basis: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        reorthogonalize(&mut v, basis);
        reorthogonalize(&mut v, basis);
        let nrm = norm2(&v);
        if nrm > 1e-8 {
            scale_in_place(1.0 / nrm, &mut v);
            return v;
        }
    }
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

fn ritz_pairs<F>(
    apply: &F,
    basis: &[Vec<f64>],
    theta: &[f64],
    s: &[f64],
    wanted: &[usize],
    norm_est: f64,
) -> PartialEig
where
    F: Fn(&[f64], &mut [f64]),
{
    let m = basis.len();
    let dim = basis[0].len();
    let mut vectors = DenseMatrix::zeros(dim, wanted.len());
    let mut residual_norms = Vec::with_capacity(wanted.len());
    let mut mv = vec![0.0; dim];
    for (col, &i) in wanted.iter().enumerate() {
        let v = vectors.column_mut(col);
        for (j, q) in basis.iter().enumerate() {
            axpy(s[i * m + j], q, v);
        }
        let nrm = norm2(v);
        scale_in_place(1.0 / nrm, v);
        apply(v, &mut mv);
        axpy(-theta[i], v, &mut mv);
        residual_norms.push(norm2(&mv));
    }
    PartialEig {
        eigenvalues: wanted.iter().map(|&i| theta[i]).collect(),
        vectors,
        residual_norms,
        norm_estimate: norm_est,
    }
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off[i]` couples `i` and `i + 1`) by
/// implicit QL with Wilkinson shifts.
///
/// Returns unsorted eigenvalues and the eigenvectors column-major: component
/// `j` of vector `i` is at `i * m + j`.
pub fn tridiagonal_eig(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = diag.len();
    assert!(off.len() + 1 >= m, "off-diagonal too short");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    e[..m.saturating_sub(1)].copy_from_slice(&off[..m.saturating_sub(1)]);
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }

    for l in 0..m {
        let mut sweeps = 0;
        loop {
            let mut mm = l;
            while mm + 1 < m {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l || sweeps >= 100 {
                break;
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..mm).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (left, right) = z.split_at_mut((i + 1) * m);
                let zi = &mut left[i * m..];
                let zi1 = &mut right[..m];
                for k in 0..m {
                    let f = zi1[k];
                    zi1[k] = s * zi[k] + c * f;
                    zi[k] = c * zi[k] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    (d, z)
}
