//! Compressed sparse row matrices and the kernels the scheme needs:
//! products, transposes, the symmetrized triple product HᵀSH, constraint
//! deduplication, and the saddle-point solver built on a sparse LU.

mod amd;
mod lu;
mod nd;
mod saddle;

pub use amd::{amd_order, colamd_order};
pub use lu::{LdlFactors, LuFactors};
pub use nd::nd_order;
pub use saddle::{rank_filter, solve_saddle, solve_saddle_with, SaddleOptions, SaddleSolution};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Magnitudes at or below this are dropped when rows are compressed.
const PRUNE_TOL: f64 = 1e-300;

/// Real matrix in compressed sparse row form.
///
/// Column indices are strictly increasing within each row and no duplicates
/// are stored; construction sums repeated triplets and prunes entries with
/// magnitude below 1e-300.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Matrix with no stored entries.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Identity of the given size.
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        let mut items: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidArgument(String::from(
                    "triplet index out of bounds",
                )));
            }
            items.push((r, c, v));
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        // bucket by row, then sort each row by column and merge duplicates
        let mut by_row: Vec<(usize, f64)> = vec![(0, 0.0); items.len()];
        let mut cursor = counts.clone();
        for &(r, c, v) in &items {
            by_row[cursor[r]] = (c, v);
            cursor[r] += 1;
        }
        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(items.len());
        let mut values = Vec::with_capacity(items.len());
        for r in 0..nrows {
            let seg = &mut by_row[counts[r]..counts[r + 1]];
            seg.sort_unstable_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < seg.len() {
                let c = seg[i].0;
                let mut v = 0.0;
                while i < seg.len() && seg[i].0 == c {
                    v += seg[i].1;
                    i += 1;
                }
                if math::abs(v) > PRUNE_TOL {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets[r + 1] = col_indices.len();
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds directly from CSR arrays, validating the invariants.
    pub fn from_csr(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != nrows + 1
            || col_indices.len() != values.len()
            || row_offsets[0] != 0
            || *row_offsets.last().unwrap() != values.len()
        {
            return Err(Error::InvalidArgument(String::from("malformed CSR arrays")));
        }
        for r in 0..nrows {
            if row_offsets[r] > row_offsets[r + 1] {
                return Err(Error::InvalidArgument(String::from(
                    "row offsets not monotone",
                )));
            }
            let seg = &col_indices[row_offsets[r]..row_offsets[r + 1]];
            for w in seg.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidArgument(String::from(
                        "columns not strictly increasing",
                    )));
                }
            }
            if let Some(&last) = seg.last() {
                if last >= ncols {
                    return Err(Error::InvalidArgument(String::from(
                        "column index out of bounds",
                    )));
                }
            }
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Stored value at (r, c), zero when absent.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        let mut y = vec![0.0; self.nrows];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        y
    }

    /// y = Aᵀ x without forming the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows, "matvec dimension mismatch");
        let mut y = vec![0.0; self.ncols];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * x[r];
            }
        }
        y
    }

    /// Exact transpose.
    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut cursor = counts.clone();
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let k = cursor[c];
                col_indices[k] = r;
                values[k] = v;
                cursor[c] += 1;
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    /// A + B.
    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.linear_combination(1.0, other, 1.0)
    }

    /// alpha·A + beta·B with matching shapes.
    pub fn linear_combination(
        &self,
        alpha: f64,
        other: &SparseMatrix,
        beta: f64,
    ) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::InvalidArgument(String::from("shape mismatch in add")));
        }
        let mut row_offsets = vec![0usize; self.nrows + 1];
        let mut col_indices = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.nrows {
            let (ca, va) = self.row(r);
            let (cb, vb) = other.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ca.len() || j < cb.len() {
                let (c, v) = if j >= cb.len() || (i < ca.len() && ca[i] < cb[j]) {
                    let out = (ca[i], alpha * va[i]);
                    i += 1;
                    out
                } else if i >= ca.len() || cb[j] < ca[i] {
                    let out = (cb[j], beta * vb[j]);
                    j += 1;
                    out
                } else {
                    let out = (ca[i], alpha * va[i] + beta * vb[j]);
                    i += 1;
                    j += 1;
                    out
                };
                if math::abs(v) > PRUNE_TOL {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets[r + 1] = col_indices.len();
        }
        Ok(SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Scales all stored values in place.
    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    /// Sparse product A·B  (Gustavson row merge with a dense accumulator).
    pub fn spgemm(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::InvalidArgument(String::from(
                "inner dimension mismatch in spgemm",
            )));
        }
        let n = other.ncols;
        let mut acc = vec![0.0f64; n];
        let mut mark = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_offsets = vec![0usize; self.nrows + 1];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.nrows {
            touched.clear();
            let (ca, va) = self.row(r);
            for (&k, &av) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&c, &bv) in cb.iter().zip(vb) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = 0.0;
                        touched.push(c);
                    }
                    acc[c] += av * bv;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if math::abs(acc[c]) > PRUNE_TOL {
                    col_indices.push(c);
                    values.push(acc[c]);
                }
            }
            row_offsets[r + 1] = col_indices.len();
        }
        Ok(SparseMatrix {
            nrows: self.nrows,
            ncols: n,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// HᵀSH, symmetrized so the result is exactly equal to its transpose.
    ///
    /// The product of three exact factors can carry roundoff asymmetry; the
    /// average with the transpose stores one value for both (i,j) and (j,i).
    pub fn triple_product(h: &SparseMatrix, s: &SparseMatrix) -> Result<SparseMatrix> {
        let sh = s.spgemm(h)?;
        let k = h.transpose().spgemm(&sh)?;
        let kt = k.transpose();
        let mut sym = k.linear_combination(0.5, &kt, 0.5)?;
        // exact symmetry: mirror the upper triangle onto the lower
        let upper = sym.clone();
        for r in 0..sym.nrows {
            let lo = sym.row_offsets[r];
            let hi = sym.row_offsets[r + 1];
            for k in lo..hi {
                let c = sym.col_indices[k];
                if c < r {
                    sym.values[k] = upper.get(c, r);
                }
            }
        }
        Ok(sym)
    }

    /// Dense copy, for small oracles and debugging.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[r][c] = v;
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0;
        for &v in &self.values {
            m = math::max(m, math::abs(v));
        }
        m
    }

    /// Extracts a subset of rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> SparseMatrix {
        let mut row_offsets = vec![0usize; rows.len() + 1];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            let (cols, vals) = self.row(r);
            col_indices.extend_from_slice(cols);
            values.extend_from_slice(vals);
            row_offsets[i + 1] = col_indices.len();
        }
        SparseMatrix {
            nrows: rows.len(),
            ncols: self.ncols,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// MatrixMarket coordinate text (1-based indices), for debugging dumps.
    pub fn to_matrix_market(&self) -> String {
        use core::fmt::Write;
        let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
        let _ = writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz());
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let _ = writeln!(out, "{} {} {:.16e}", r + 1, c + 1, v);
            }
        }
        out
    }
}

/// Removes constraint rows that duplicate an earlier row, up to sign.
///
/// Two rows are duplicates when their supports match and the values agree to
/// 1e-12 relative after normalizing the leading sign. A duplicate whose
/// right-hand side disagrees (beyond 1e-10·(1+max|g|)) is an inconsistency;
/// `labels` names the offending boundary vertex in that error. Returns the
/// kept rows, their data, and their original indices.
pub fn dedup_constraints(
    c: &SparseMatrix,
    g: &[f64],
    labels: &[usize],
) -> Result<(SparseMatrix, Vec<f64>, Vec<usize>)> {
    assert_eq!(c.nrows(), g.len());
    assert_eq!(c.nrows(), labels.len());
    let mut gmax = 0.0;
    for &v in g {
        gmax = math::max(gmax, math::abs(v));
    }
    let gtol = 1e-10 * (1.0 + gmax);

    // group candidate duplicates by support; supports are short so compare
    // within groups pairwise
    let mut order: Vec<usize> = (0..c.nrows()).collect();
    order.sort_by(|&a, &b| {
        let (ca, _) = c.row(a);
        let (cb, _) = c.row(b);
        ca.cmp(cb).then(a.cmp(&b))
    });

    let mut keep = vec![true; c.nrows()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        let (ci, _) = c.row(order[i]);
        while j < order.len() && c.row(order[j]).0 == ci {
            j += 1;
        }
        // rows order[i..j] share a support
        for a_pos in i..j {
            let a = order[a_pos];
            if !keep[a] {
                continue;
            }
            let (_, va) = c.row(a);
            let sa = leading_sign(va);
            for b_pos in a_pos + 1..j {
                let b = order[b_pos];
                if !keep[b] {
                    continue;
                }
                let (_, vb) = c.row(b);
                let sb = leading_sign(vb);
                let mut scale = 0.0;
                let mut diff = 0.0;
                for (&x, &y) in va.iter().zip(vb) {
                    scale = math::max(scale, math::abs(x));
                    diff = math::max(diff, math::abs(sa * x - sb * y));
                }
                if diff <= 1e-12 * scale {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    if math::abs(sa * g[a] - sb * g[b]) > gtol {
                        return Err(Error::InconsistentConstraints { vertex: labels[hi] });
                    }
                    keep[hi] = false;
                    let _ = lo;
                }
            }
        }
        i = j;
    }

    let kept: Vec<usize> = (0..c.nrows()).filter(|&r| keep[r]).collect();
    let cd = c.select_rows(&kept);
    let gd: Vec<f64> = kept.iter().map(|&r| g[r]).collect();
    Ok((cd, gd, kept))
}

fn leading_sign(vals: &[f64]) -> f64 {
    for &v in vals {
        if v != 0.0 {
            return if v > 0.0 { 1.0 } else { -1.0 };
        }
    }
    1.0
}
