use crate::error::{check_len, Result};
use crate::linalg::{dot, CscMatrix};

/// Matrix-free view of `A = [Z Zᵀ + μ² I, Z y; (Z y)ᵀ, yᵀy]` for `Z` of shape
/// `d x n`.
#[derive(Debug, Clone)]
pub struct NormalSystem<'a> {
    z: &'a CscMatrix,
    y: &'a [f64],
    mu_sq: f64,
    zy: Vec<f64>,
    yty: f64,
}

impl<'a> NormalSystem<'a> {
    pub fn new(z: &'a CscMatrix, y: &'a [f64], mu_sq: f64) -> Result<Self> {
        check_len(z.ncols(), y.len())?;
        let zy = z.matvec(y, false)?;
        Ok(Self { z, y, mu_sq, zy, yty: dot(y, y) })
    }

    /// `d + 1`.
    pub fn dim(&self) -> usize {
        self.z.nrows() + 1
    }

    pub fn zy(&self) -> &[f64] {
        &self.zy
    }

    pub fn yty(&self) -> f64 {
        self.yty
    }

    /// `out = A x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let d = self.z.nrows();
        let (w, beta) = (&x[..d], x[d]);
        let mut t = vec![0.0; self.z.ncols()];
        self.z.mul_transpose_into(w, &mut t).expect("dimensions fixed at construction");
        for (ti, yi) in t.iter_mut().zip(self.y) {
            *ti += yi * beta;
        }
        self.z.mul_into(&t, &mut out[..d]).expect("dimensions fixed at construction");
        for (o, wi) in out[..d].iter_mut().zip(w) {
            *o += self.mu_sq * wi;
        }
        out[d] = dot(self.y, &t);
    }

    pub fn apply_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        let mut out = vec![0.0; self.dim()];
        self.apply(x, &mut out);
        Ok(out)
    }

    /// Diagonal of `A`.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut diag = self.z.row_sq_sums();
        for v in &mut diag {
            *v += self.mu_sq;
        }
        diag.push(self.yty);
        diag
    }
}
