//! Dense Cholesky factorization `S = RᵀR` with triangular solves.
//!
//! The factorization kernel is faer's blocked left-looking `LLᵀ`, run
//! sequentially. `R` is stored row-major, which is the same memory layout as
//! the column-major lower factor `L = Rᵀ` that faer produces in place.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::{self, LltParams, LltRegularization};
use faer::{MatMut, Par, Spec};

use super::dense::{axpy, dot, DenseMatrix};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    /// Upper factor, row-major: `R[i][j]` lives at `i * dim + j` for `j >= i`.
    r_factor: Vec<f64>,
    /// When present, the factor is of `S[perm, perm]`.
    perm: Option<Vec<usize>>,
}

pub fn cholesky_factorize(s: &DenseMatrix) -> Result<CholeskyFactor> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch { expected: s.nrows(), found: s.ncols() });
    }
    factorize_buffer(s.nrows(), s.as_slice().to_vec(), None)
}

/// Factors `S[perm, perm]`; solves still answer `S x = b` in the original
/// ordering.
pub fn cholesky_factorize_permuted(s: &DenseMatrix, perm: Vec<usize>) -> Result<CholeskyFactor> {
    let n = s.nrows();
    if !s.is_square() {
        return Err(Error::DimensionMismatch { expected: n, found: s.ncols() });
    }
    check_len(n, perm.len())?;
    let mut seen = vec![false; n];
    for &p in &perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidData(format!("invalid permutation entry {p}")));
        }
    }
    let permuted = DenseMatrix::from_fn(n, n, |i, j| s[(perm[i], perm[j])]);
    factorize_buffer(n, permuted.into_vec(), Some(perm))
}

pub(crate) fn factorize_owned(s: DenseMatrix) -> Result<CholeskyFactor> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch { expected: s.nrows(), found: s.ncols() });
    }
    factorize_buffer(s.nrows(), s.into_vec(), None)
}

fn factorize_buffer(n: usize, mut data: Vec<f64>, perm: Option<Vec<usize>>) -> Result<CholeskyFactor> {
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("matrix has non-finite entries".into()));
    }
    {
        let a = MatMut::from_column_major_slice_mut(&mut data, n, n);
        let params: Spec<LltParams, f64> = Default::default();
        let req = factor::cholesky_in_place_scratch::<f64>(n, Par::Seq, params);
        let mut mem = MemBuffer::new(req);
        let stack = MemStack::new(&mut mem);
        factor::cholesky_in_place(a, LltRegularization::default(), Par::Seq, stack, params)
            .map_err(|factor::LltError::NonPositivePivot { index }| Error::IndefiniteMatrix { pivot: index })?;
    }
    // Column j of L (rows j..n) is row j of R; clear the stale strict upper
    // part of L, which in row-major reading is the strict lower part of R.
    for j in 0..n {
        for i in 0..j {
            data[j * n + i] = 0.0;
        }
    }
    Ok(CholeskyFactor { dim: n, r_factor: data, perm })
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn perm(&self) -> Option<&[usize]> {
        self.perm.as_deref()
    }

    /// Entry `R[i][j]` of the upper-triangular factor.
    pub fn r(&self, i: usize, j: usize) -> f64 {
        if j < i {
            0.0
        } else {
            self.r_factor[i * self.dim + j]
        }
    }

    /// Row `i` of `R`, columns `i..dim`.
    fn r_row(&self, i: usize) -> &[f64] {
        &self.r_factor[i * self.dim + i..(i + 1) * self.dim]
    }

    /// `RᵀR` as a dense matrix (in the permuted ordering when `perm` is set).
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim;
        DenseMatrix::from_fn(n, n, |i, j| {
            (0..=i.min(j)).map(|k| self.r(k, i) * self.r(k, j)).sum()
        })
    }

    /// Solves `S x = b`: one forward solve with `Rᵀ`, one backward solve with
    /// `R`, gathering and scattering through `perm` when present.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, b.len())?;
        match &self.perm {
            None => {
                let mut x = b.to_vec();
                self.solve_in_place(&mut x);
                Ok(x)
            }
            Some(p) => {
                let mut z: Vec<f64> = p.iter().map(|&k| b[k]).collect();
                self.solve_in_place(&mut z);
                let mut x = vec![0.0; self.dim];
                for (i, &k) in p.iter().enumerate() {
                    x[k] = z[i];
                }
                Ok(x)
            }
        }
    }

    /// In-place `RᵀR x = b` in the factor's own ordering.
    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        self.forward_in_place(x);
        self.backward_in_place(x);
    }

    /// `Rᵀ y = b`, overwriting `b`.
    fn forward_in_place(&self, y: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let row = self.r_row(i);
            y[i] /= row[0];
            let yi = y[i];
            if yi != 0.0 {
                axpy(-yi, &row[1..], &mut y[i + 1..]);
            }
        }
    }

    /// `R x = y`, overwriting `y`.
    fn backward_in_place(&self, x: &mut [f64]) {
        let n = self.dim;
        for i in (0..n).rev() {
            let row = self.r_row(i);
            let s = dot(&row[1..], &x[i + 1..]);
            x[i] = (x[i] - s) / row[0];
        }
    }
}
