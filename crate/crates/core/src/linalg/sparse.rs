//! Compressed sparse column storage.
//!
//! The training matrix keeps one sample per column, so `X` is `d x n` and the
//! transposed product `Xᵀv` is a per-sample dot product. Products are computed
//! with a block layout that depends only on the matrix, never on the number
//! of worker threads, so repeated runs are bit-identical.

use rayon::prelude::*;

use super::dense::DenseMatrix;
use crate::error::{check_len, Error, Result};

/// Number of column blocks used by the parallel `M x` kernel.
const MATVEC_BLOCKS: usize = 8;
/// Below this many stored entries products run in a single pass.
const PARALLEL_NNZ: usize = 1 << 15;
/// Column chunks denser than this are multiplied through dense GEMM in `gram`.
const DENSE_CHUNK_DENSITY: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            colptr: vec![0; ncols + 1],
            rowidx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            colptr: (0..=n).collect(),
            rowidx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Assembles a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed and entries that end up exactly zero are dropped. Non-finite
    /// values are rejected.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(row, col, _) in triplets {
            if row >= nrows || col >= ncols {
                return Err(Error::IndexOutOfBounds { row, col, nrows, ncols });
            }
        }
        if triplets.iter().any(|t| !t.2.is_finite()) {
            return Err(Error::InvalidData("matrix has non-finite entries".into()));
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (c, r));

        let mut colptr = vec![0usize; ncols + 1];
        let mut rowidx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut i = 0;
        while i < sorted.len() {
            let (row, col, mut v) = sorted[i];
            i += 1;
            while i < sorted.len() && sorted[i].0 == row && sorted[i].1 == col {
                v += sorted[i].2;
                i += 1;
            }
            if v != 0.0 {
                rowidx.push(row);
                values.push(v);
                colptr[col + 1] += 1;
            }
        }
        for c in 0..ncols {
            colptr[c + 1] += colptr[c];
        }
        Ok(Self { nrows, ncols, colptr, rowidx, values })
    }

    /// Validates raw CSC arrays. Explicit zeros are pruned.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        colptr: Vec<usize>,
        rowidx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidStructure(msg));
        if colptr.len() != ncols + 1 {
            return bad(format!("colptr has length {}, expected {}", colptr.len(), ncols + 1));
        }
        if colptr[0] != 0 || colptr[ncols] != rowidx.len() || rowidx.len() != values.len() {
            return bad("colptr bounds do not match stored entries".into());
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("matrix has non-finite entries".into()));
        }
        for c in 0..ncols {
            if colptr[c] > colptr[c + 1] {
                return bad(format!("colptr decreases at column {c}"));
            }
            let rows = &rowidx[colptr[c]..colptr[c + 1]];
            for (k, &r) in rows.iter().enumerate() {
                if r >= nrows {
                    return Err(Error::IndexOutOfBounds { row: r, col: c, nrows, ncols });
                }
                if k > 0 && rows[k - 1] >= r {
                    return bad(format!("row indices not strictly increasing in column {c}"));
                }
            }
        }
        let mut m = Self { nrows, ncols, colptr, rowidx, values };
        m.prune_zeros();
        Ok(m)
    }

    /// Trusted constructor for kernels that already maintain the invariants.
    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        colptr: Vec<usize>,
        rowidx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(colptr.len(), ncols + 1);
        debug_assert_eq!(colptr[ncols], rowidx.len());
        Self { nrows, ncols, colptr, rowidx, values }
    }

    fn prune_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut write = 0;
        let mut start = 0;
        for c in 0..self.ncols {
            let end = self.colptr[c + 1];
            for k in start..end {
                if self.values[k] != 0.0 {
                    self.rowidx[write] = self.rowidx[k];
                    self.values[write] = self.values[k];
                    write += 1;
                }
            }
            start = end;
            self.colptr[c + 1] = write;
        }
        self.rowidx.truncate(write);
        self.values.truncate(write);
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowidx(&self) -> &[usize] {
        &self.rowidx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `j`.
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let range = self.colptr[j]..self.colptr[j + 1];
        (&self.rowidx[range.clone()], &self.values[range])
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (rows, vals) = self.col(col);
        rows.binary_search(&row).map_or(0.0, |k| vals[k])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Sparse product `M x` (`transpose = false`) or `Mᵀ x`.
    pub fn matvec(&self, x: &[f64], transpose: bool) -> Result<Vec<f64>> {
        if transpose {
            let mut out = vec![0.0; self.ncols];
            self.mul_transpose_into(x, &mut out)?;
            Ok(out)
        } else {
            let mut out = vec![0.0; self.nrows];
            self.mul_into(x, &mut out)?;
            Ok(out)
        }
    }

    /// `out = M x`.
    pub fn mul_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.ncols, x.len())?;
        check_len(self.nrows, out.len())?;
        if self.nnz() < PARALLEL_NNZ || self.ncols < 2 * MATVEC_BLOCKS {
            out.fill(0.0);
            self.accumulate_columns(0..self.ncols, x, out);
            return Ok(());
        }
        let bounds = self.block_bounds();
        let partials: Vec<Vec<f64>> = bounds
            .par_windows(2)
            .map(|w| {
                let mut part = vec![0.0; self.nrows];
                self.accumulate_columns(w[0]..w[1], x, &mut part);
                part
            })
            .collect();
        out.fill(0.0);
        for part in &partials {
            for (o, p) in out.iter_mut().zip(part) {
                *o += p;
            }
        }
        Ok(())
    }

    /// `out = Mᵀ x`.
    pub fn mul_transpose_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.nrows, x.len())?;
        check_len(self.ncols, out.len())?;
        let col_dot = |j: usize| {
            let (rows, vals) = self.col(j);
            rows.iter().zip(vals).map(|(&r, &v)| v * x[r]).sum::<f64>()
        };
        if self.nnz() < PARALLEL_NNZ {
            for (j, o) in out.iter_mut().enumerate() {
                *o = col_dot(j);
            }
        } else {
            out.par_iter_mut().enumerate().for_each(|(j, o)| *o = col_dot(j));
        }
        Ok(())
    }

    fn accumulate_columns(&self, cols: std::ops::Range<usize>, x: &[f64], out: &mut [f64]) {
        for j in cols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.col(j);
            for (&r, &v) in rows.iter().zip(vals) {
                out[r] += v * xj;
            }
        }
    }

    /// Column boundaries splitting the stored entries into `MATVEC_BLOCKS`
    /// roughly equal parts.
    fn block_bounds(&self) -> Vec<usize> {
        let nnz = self.nnz();
        let mut bounds = vec![0];
        for b in 1..MATVEC_BLOCKS {
            let target = nnz * b / MATVEC_BLOCKS;
            let col = self.colptr.partition_point(|&p| p < target).min(self.ncols);
            let last = *bounds.last().unwrap();
            bounds.push(col.max(last));
        }
        bounds.push(self.ncols);
        bounds
    }

    pub fn transpose(&self) -> CscMatrix {
        let mut counts = vec![0usize; self.nrows + 1];
        for &r in &self.rowidx {
            counts[r + 1] += 1;
        }
        for r in 0..self.nrows {
            counts[r + 1] += counts[r];
        }
        let colptr = counts.clone();
        let mut next = counts;
        let mut rowidx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for c in 0..self.ncols {
            let (rows, vals) = self.col(c);
            for (&r, &v) in rows.iter().zip(vals) {
                let slot = next[r];
                rowidx[slot] = c;
                values[slot] = v;
                next[r] += 1;
            }
        }
        CscMatrix::from_parts_unchecked(self.ncols, self.nrows, colptr, rowidx, values)
    }

    /// `M diag(s)`.
    pub fn scale_columns(&self, s: &[f64]) -> Result<CscMatrix> {
        check_len(self.ncols, s.len())?;
        let mut out = self.clone();
        for (c, &sc) in s.iter().enumerate() {
            for v in &mut out.values[self.colptr[c]..self.colptr[c + 1]] {
                *v *= sc;
            }
        }
        out.prune_zeros();
        Ok(out)
    }

    /// `diag(s) M`.
    pub fn scale_rows(&self, s: &[f64]) -> Result<CscMatrix> {
        check_len(self.nrows, s.len())?;
        let mut out = self.clone();
        for (v, &r) in out.values.iter_mut().zip(&self.rowidx) {
            *v *= s[r];
        }
        out.prune_zeros();
        Ok(out)
    }

    /// `diag(s)⁻¹ M`, dividing rather than multiplying by reciprocals.
    pub fn divide_rows(&self, s: &[f64]) -> Result<CscMatrix> {
        check_len(self.nrows, s.len())?;
        let mut out = self.clone();
        for (v, &r) in out.values.iter_mut().zip(&self.rowidx) {
            *v /= s[r];
        }
        out.prune_zeros();
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> CscMatrix {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= factor;
        }
        out.prune_zeros();
        out
    }

    /// Sum of squares of every row, i.e. the diagonal of `M Mᵀ`.
    pub fn row_sq_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        for (&r, &v) in self.rowidx.iter().zip(&self.values) {
            out[r] += v * v;
        }
        out
    }

    /// Largest absolute value in each row; zero for empty rows.
    pub fn row_max_abs(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.nrows];
        for (&r, &v) in self.rowidx.iter().zip(&self.values) {
            out[r] = out[r].max(v.abs());
        }
        out
    }

    /// Keeps the listed rows (strictly increasing) and renumbers them `0..k`.
    pub fn select_rows(&self, keep: &[usize]) -> Result<CscMatrix> {
        let mut map = vec![usize::MAX; self.nrows];
        for (new, &old) in keep.iter().enumerate() {
            if old >= self.nrows {
                return Err(Error::IndexOutOfBounds { row: old, col: 0, nrows: self.nrows, ncols: self.ncols });
            }
            map[old] = new;
        }
        let mut colptr = Vec::with_capacity(self.ncols + 1);
        colptr.push(0);
        let mut rowidx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        for c in 0..self.ncols {
            let (rows, vals) = self.col(c);
            for (&r, &v) in rows.iter().zip(vals) {
                if map[r] != usize::MAX {
                    rowidx.push(map[r]);
                    values.push(v);
                }
            }
            colptr.push(rowidx.len());
        }
        Ok(CscMatrix::from_parts_unchecked(keep.len(), self.ncols, colptr, rowidx, values))
    }

    /// Reorders columns so that column `k` of the result is column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<CscMatrix> {
        check_len(self.ncols, perm.len())?;
        let mut colptr = Vec::with_capacity(self.ncols + 1);
        colptr.push(0);
        let mut rowidx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        for &c in perm {
            if c >= self.ncols {
                return Err(Error::IndexOutOfBounds { row: 0, col: c, nrows: self.nrows, ncols: self.ncols });
            }
            let (rows, vals) = self.col(c);
            rowidx.extend_from_slice(rows);
            values.extend_from_slice(vals);
            colptr.push(rowidx.len());
        }
        Ok(CscMatrix::from_parts_unchecked(self.nrows, self.ncols, colptr, rowidx, values))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.nrows, self.ncols);
        for c in 0..self.ncols {
            let (rows, vals) = self.col(c);
            let dst = out.column_mut(c);
            for (&r, &v) in rows.iter().zip(vals) {
                dst[r] = v;
            }
        }
        out
    }

    /// Dense Gram matrix `M Mᵀ` (`nrows x nrows`), accumulated one column chunk
    /// at a time. Dense chunks go through GEMM, sparse ones through explicit
    /// outer products.
    pub fn gram(&self) -> DenseMatrix {
        let m = self.nrows;
        let mut out = DenseMatrix::zeros(m, m);
        if m == 0 {
            return out;
        }
        let chunk = (4_000_000 / m).clamp(1, 256);
        let mut buf = Vec::new();
        let mut start = 0;
        while start < self.ncols {
            let end = (start + chunk).min(self.ncols);
            let width = end - start;
            let nnz = self.colptr[end] - self.colptr[start];
            let density = nnz as f64 / (m as f64 * width as f64);
            if density > DENSE_CHUNK_DENSITY {
                buf.clear();
                buf.resize(m * width, 0.0);
                for (k, c) in (start..end).enumerate() {
                    let (rows, vals) = self.col(c);
                    for (&r, &v) in rows.iter().zip(vals) {
                        buf[k * m + r] = v;
                    }
                }
                let block = faer::MatRef::from_column_major_slice(&buf, m, width);
                faer::linalg::matmul::matmul(
                    out.as_faer_mut(),
                    faer::Accum::Add,
                    block,
                    block.transpose(),
                    1.0,
                    faer::Par::Seq,
                );
            } else {
                for c in start..end {
                    let (rows, vals) = self.col(c);
                    for (a, (&ra, &va)) in rows.iter().zip(vals).enumerate() {
                        for (&rb, &vb) in rows[..=a].iter().zip(&vals[..=a]) {
                            out[(ra, rb)] += va * vb;
                        }
                    }
                }
            }
            start = end;
        }
        // The sparse path only fills the lower triangle, which is complete
        // either way.
        for j in 0..m {
            for i in 0..j {
                out[(i, j)] = out[(j, i)];
            }
        }
        out
    }

    /// Dot product of two columns (possibly from different matrices with the
    /// same row count).
    pub fn col_dot(&self, j: usize, other: &CscMatrix, k: usize) -> f64 {
        let (ra, va) = self.col(j);
        let (rb, vb) = other.col(k);
        let (mut p, mut q, mut acc) = (0, 0, 0.0);
        while p < ra.len() && q < rb.len() {
            match ra[p].cmp(&rb[q]) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    acc += va[p] * vb[q];
                    p += 1;
                    q += 1;
                }
            }
        }
        acc
    }

    /// Squared Euclidean distance between column `j` and column `k` of
    /// `other`, computed on the union of supports so identical columns give
    /// exactly zero.
    pub fn col_distance_sq(&self, j: usize, other: &CscMatrix, k: usize) -> f64 {
        let (ra, va) = self.col(j);
        let (rb, vb) = other.col(k);
        let (mut p, mut q, mut acc) = (0, 0, 0.0);
        while p < ra.len() || q < rb.len() {
            let diff = if q >= rb.len() || (p < ra.len() && ra[p] < rb[q]) {
                p += 1;
                va[p - 1]
            } else if p >= ra.len() || rb[q] < ra[p] {
                q += 1;
                -vb[q - 1]
            } else {
                p += 1;
                q += 1;
                va[p - 1] - vb[q - 1]
            };
            acc += diff * diff;
        }
        acc
    }

    /// Dot product of column `j` with a dense vector.
    pub fn col_dot_dense(&self, j: usize, x: &[f64]) -> f64 {
        let (rows, vals) = self.col(j);
        let mut acc = 0.0;
        for (&r, &v) in rows.iter().zip(vals) {
            acc += v * x[r];
        }
        acc
    }
}
