use crate::error::{check_len, Result};
use crate::linalg::{cholesky_factorize, dot, CholeskyFactor, CscMatrix, DenseMatrix};

/// Dense `A = [Z Zᵀ + μ² I, Z y; (Z y)ᵀ, yᵀy]` and its Cholesky factor.
#[derive(Debug, Clone)]
pub struct DirectFactor {
    pub a_matrix: DenseMatrix,
    pub factor: CholeskyFactor,
}

pub fn build_direct(z: &CscMatrix, y: &[f64], mu_sq: f64) -> Result<DirectFactor> {
    check_len(z.ncols(), y.len())?;
    let d = z.nrows();
    let zy = z.matvec(y, false)?;
    let mut a = DenseMatrix::zeros(d + 1, d + 1);
    {
        let gram = z.gram();
        for j in 0..d {
            a.column_mut(j)[..d].copy_from_slice(gram.column(j));
            a[(j, j)] += mu_sq;
        }
    }
    for (j, &v) in zy.iter().enumerate() {
        a[(d, j)] = v;
        a[(j, d)] = v;
    }
    a[(d, d)] = dot(y, y);
    let factor = cholesky_factorize(&a)?;
    Ok(DirectFactor { a_matrix: a, factor })
}

pub fn solve_direct(f: &DirectFactor, h: &[f64]) -> Result<Vec<f64>> {
    f.factor.solve(h)
}
