use crate::error::{check_len, Result};
use crate::linalg::{dot, factorize_owned, CholeskyFactor, CscMatrix};

/// Factored form of `A⁻¹` through an `n x n` Cholesky factor.
///
/// With `D̂ = diag(μ² I, ‖y‖²)`, `U = [Z, 0; yᵀ, ‖y‖]` and `G = diag(I, −1)`,
/// `A = D̂ + U G Uᵀ`. The capacitance matrix is `H = J + ȳȳᵀ` where
/// `J = diag(I + ZᵀZ/μ², −1)` and `ȳ = [y/‖y‖; 1]`.
#[derive(Debug, Clone)]
pub struct SmwFactor {
    /// Cholesky factor of `I + ZᵀZ/μ²`.
    pub h_block_factor: CholeskyFactor,
    /// `J⁻¹ȳ`, length `n + 1`.
    pub j_inv_ybar: Vec<f64>,
    /// `1 + ȳᵀJ⁻¹ȳ`.
    pub ybar_scalar: f64,
    pub p_diag: f64,
    pub y_norm_sq: f64,
}

pub fn build_smw(z: &CscMatrix, y: &[f64], mu_sq: f64) -> Result<SmwFactor> {
    check_len(z.ncols(), y.len())?;
    let n = z.ncols();
    let mut m = z.transpose().gram();
    for j in 0..n {
        let col = m.column_mut(j);
        for v in col.iter_mut() {
            *v /= mu_sq;
        }
        col[j] += 1.0;
    }
    let h_block_factor = factorize_owned(m)?;
    let y_norm_sq = dot(y, y);
    let y_norm = y_norm_sq.sqrt();
    let y_hat: Vec<f64> = y.iter().map(|v| v / y_norm).collect();
    let mut j_inv_ybar = h_block_factor.solve(&y_hat)?;
    let ybar_scalar = dot(&y_hat, &j_inv_ybar);
    j_inv_ybar.push(-1.0);
    Ok(SmwFactor { h_block_factor, j_inv_ybar, ybar_scalar, p_diag: mu_sq, y_norm_sq })
}

pub fn solve_smw(f: &SmwFactor, z: &CscMatrix, y: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    let (d, n) = (z.nrows(), z.ncols());
    check_len(n, y.len())?;
    check_len(n + 1, f.j_inv_ybar.len())?;
    check_len(d + 1, h.len())?;
    let y_norm = f.y_norm_sq.sqrt();

    // g = D̂⁻¹ h
    let mut g: Vec<f64> = h[..d].iter().map(|v| v / f.p_diag).collect();
    let g_last = h[d] / f.y_norm_sq;
    g.push(g_last);

    // t = Uᵀ g
    let mut t = z.matvec(&g[..d], true)?;
    for (ti, yi) in t.iter_mut().zip(y) {
        *ti += yi * g_last;
    }
    t.push(y_norm * g_last);

    // s = H⁻¹ t = J⁻¹t − J⁻¹ȳ (ȳᵀJ⁻¹t) / (1 + ȳᵀJ⁻¹ȳ)
    let mut s = f.h_block_factor.solve(&t[..n])?;
    s.push(-t[n]);
    let ybar_dot = s[..n].iter().zip(y).map(|(si, yi)| si * yi).sum::<f64>() / y_norm + s[n];
    let coef = ybar_dot / f.ybar_scalar;
    for (si, ji) in s.iter_mut().zip(&f.j_inv_ybar) {
        *si -= coef * ji;
    }

    // x = g − D̂⁻¹ U s
    let us_top = z.matvec(&s[..n], false)?;
    let us_last = dot(y, &s[..n]) + y_norm * s[n];
    let mut x = g;
    for (xi, ui) in x[..d].iter_mut().zip(&us_top) {
        *xi -= ui / f.p_diag;
    }
    x[d] -= us_last / f.y_norm_sq;
    Ok(x)
}
