use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, dot, lanczos_topk, norm2, CscMatrix, PartialEig};

const LANCZOS_TOL: f64 = 1e-10;
const SCHUR_FLOOR: f64 = 1e-14;

/// Low-rank proximal term `𝒯 = λ_ℓ I + Σᵢ₍ᵢ<ℓ₎ (λᵢ − λ_ℓ) vᵢvᵢᵀ − Z Zᵀ` built
/// from the top eigenpairs of `Z Zᵀ`, which makes `Z Zᵀ + μ² I + 𝒯` trivially
/// invertible.
///
/// The stored eigenvalues are the Ritz values raised by the Frobenius norm of
/// the Ritz residuals, so that inexact eigenpairs still yield `𝒯 ⪰ 0`.
#[derive(Debug, Clone)]
pub struct ProximalFactor {
    pub eig: PartialEig,
    pub ell: usize,
    pub mu_sq: f64,
    pub zy: Vec<f64>,
    pub yty: f64,
    /// `yᵀy − (Z y)ᵀ (Z Zᵀ + μ² I + 𝒯)⁻¹ (Z y)`.
    pub schur_scalar: f64,
    inv_zy: Vec<f64>,
}

pub fn build_proximal(z: &CscMatrix, y: &[f64], mu_sq: f64, ell: usize, seed: u64) -> Result<ProximalFactor> {
    check_len(z.ncols(), y.len())?;
    let d = z.nrows();
    let ell = ell.clamp(1, d.max(1));
    let n = z.ncols();
    let op = |x: &[f64], out: &mut [f64]| {
        let mut t = vec![0.0; n];
        z.mul_transpose_into(x, &mut t).expect("operator dimensions");
        z.mul_into(&t, out).expect("operator dimensions");
    };
    let max_iter = (20 * ell + 100).min(d);
    let mut eig = lanczos_topk(d, op, ell, LANCZOS_TOL, max_iter, seed)?;
    let shift = norm2(&eig.residual_norms);
    for v in &mut eig.eigenvalues {
        *v += shift;
    }

    let zy = z.matvec(y, false)?;
    let yty = dot(y, y);
    let mut f = ProximalFactor { eig, ell, mu_sq, zy, yty, schur_scalar: 0.0, inv_zy: Vec::new() };
    f.inv_zy = f.apply_inverse(&f.zy);
    f.schur_scalar = yty - dot(&f.zy, &f.inv_zy);
    if f.schur_scalar <= SCHUR_FLOOR * yty.max(1.0) {
        return Err(Error::DegenerateSchur { value: f.schur_scalar });
    }
    Ok(f)
}

impl ProximalFactor {
    fn lambda_ell(&self) -> f64 {
        self.eig.eigenvalues[self.ell - 1]
    }

    /// `(Z Zᵀ + μ² I + 𝒯)⁻¹ x`.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let base = 1.0 / (self.mu_sq + self.lambda_ell());
        let mut out: Vec<f64> = x.iter().map(|v| v * base).collect();
        for i in 0..self.ell - 1 {
            let v = self.eig.vectors.column(i);
            let coef = (1.0 / (self.mu_sq + self.eig.eigenvalues[i]) - base) * dot(v, x);
            axpy(coef, v, &mut out);
        }
        out
    }

    /// `𝒯 x`.
    pub fn apply_t(&self, z: &CscMatrix, x: &[f64]) -> Result<Vec<f64>> {
        let lam = self.lambda_ell();
        let zzx = z.matvec(&z.matvec(x, true)?, false)?;
        let mut out: Vec<f64> = x.iter().zip(&zzx).map(|(xi, mi)| lam * xi - mi).collect();
        for i in 0..self.ell - 1 {
            let v = self.eig.vectors.column(i);
            axpy((self.eig.eigenvalues[i] - lam) * dot(v, x), v, &mut out);
        }
        Ok(out)
    }
}

/// Solves the `𝒯`-augmented system by eliminating `β` through its scalar
/// Schur complement.
pub fn solve_proximal(f: &ProximalFactor, h: &[f64]) -> Result<Vec<f64>> {
    let d = f.zy.len();
    check_len(d + 1, h.len())?;
    let a = f.apply_inverse(&h[..d]);
    let beta = (h[d] - dot(&f.zy, &a)) / f.schur_scalar;
    let mut x = a;
    axpy(-beta, &f.inv_zy, &mut x);
    x.push(beta);
    Ok(x)
}
