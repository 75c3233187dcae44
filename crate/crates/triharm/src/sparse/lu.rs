//! Sparse LU factorization with partial pivoting, and a pivotless LDLᵀ.
//!
//! Left-looking column factorization in the Gilbert-Peierls style: each
//! column is computed by a sparse triangular solve whose nonzero pattern is
//! found by depth-first search over the structure of L, then the largest
//! remaining entry is chosen as the pivot. Columns are processed in a
//! caller-supplied fill-reducing order (see [`super::colamd_order`]).
//!
//! [`LdlFactors`] runs the same left-looking elimination but always takes the
//! diagonal as the pivot, which preserves symmetry: only L and D are stored,
//! and the fill is the symbolic Cholesky fill of the chosen symmetric order.
//! Stability comes from caller-supplied diagonal shifts rather than pivoting,
//! so it suits quasi-definite systems followed by iterative refinement.

use alloc::vec;
use alloc::vec::Vec;

use super::SparseMatrix;
use crate::math;
use crate::{Error, Result};

/// L and U factors with the row and column permutations of the pivoting.
///
/// Storage is by columns: `L` holds unit-lower-triangular columns without the
/// diagonal, `U` upper-triangular columns including the pivot. Row indices in
/// `L` are original (unpermuted); `U` rows are pivot positions.
pub struct LuFactors {
    n: usize,
    l_colptr: Vec<usize>,
    l_rows: Vec<u32>,
    l_vals: Vec<f64>,
    u_colptr: Vec<usize>,
    u_rows: Vec<u32>,
    u_vals: Vec<f64>,
    /// column order: column `col_perm[k]` of A was factored at step k
    col_perm: Vec<usize>,
    /// row r of A became pivot row `row_pos[r]`
    row_pos: Vec<usize>,
}

impl LuFactors {
    /// Factors A with columns taken in `col_order` and partial row pivoting.
    ///
    /// Fails with [`Error::SingularSystem`] when a column has no usable pivot.
    pub fn factor(a: &SparseMatrix, col_order: &[usize]) -> Result<LuFactors> {
        Self::factor_with_limit(a, col_order, usize::MAX)
    }

    /// Like [`LuFactors::factor`] but aborts once the factors would exceed
    /// `max_nnz` stored entries, guarding against orderings whose fill would
    /// exhaust memory.
    pub fn factor_with_limit(
        a: &SparseMatrix,
        col_order: &[usize],
        max_nnz: usize,
    ) -> Result<LuFactors> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidArgument(alloc::string::String::from(
                "LU needs a square matrix",
            )));
        }
        if col_order.len() != n {
            return Err(Error::InvalidArgument(alloc::string::String::from(
                "column order length mismatch",
            )));
        }
        // column access: factor by columns of A, i.e. rows of Aᵀ
        let at = a.transpose();

        let mut lu = LuFactors {
            n,
            l_colptr: Vec::with_capacity(n + 1),
            l_rows: Vec::new(),
            l_vals: Vec::new(),
            u_colptr: Vec::with_capacity(n + 1),
            u_rows: Vec::new(),
            u_vals: Vec::new(),
            col_perm: col_order.to_vec(),
            row_pos: vec![usize::MAX; n],
        };
        lu.l_colptr.push(0);
        lu.u_colptr.push(0);

        // dense workspace for the current column plus DFS scratch
        let mut x = vec![0.0f64; n];
        let mut visited = vec![u64::MAX; n];
        let mut topo: Vec<u32> = Vec::with_capacity(n);
        let mut dfs_stack: Vec<(u32, usize)> = Vec::new();

        for k in 0..n {
            let col = lu.col_perm[k];
            let (arows, avals) = at.row(col);

            // symbolic: rows reachable from the column's pattern through L
            topo.clear();
            for &r in arows {
                let r = r as u32;
                if visited[r as usize] == k as u64 {
                    continue;
                }
                // iterative DFS with postorder collection
                dfs_stack.push((r, 0));
                visited[r as usize] = k as u64;
                while let Some(top) = dfs_stack.len().checked_sub(1) {
                    let (node, mut pos) = dfs_stack[top];
                    let piv = lu.row_pos[node as usize];
                    let mut descended = false;
                    if piv != usize::MAX {
                        let lo = lu.l_colptr[piv];
                        let hi = lu.l_colptr[piv + 1];
                        while pos < hi - lo {
                            let child = lu.l_rows[lo + pos];
                            pos += 1;
                            if visited[child as usize] != k as u64 {
                                visited[child as usize] = k as u64;
                                dfs_stack[top].1 = pos;
                                dfs_stack.push((child, 0));
                                descended = true;
                                break;
                            }
                        }
                    }
                    if !descended {
                        dfs_stack.pop();
                        topo.push(node);
                    }
                }
            }
            // topo now holds a postorder: dependencies before dependents

            // numeric: sparse triangular solve
            for &r in &topo {
                x[r as usize] = 0.0;
            }
            for (&r, &v) in arows.iter().zip(avals) {
                x[r] = v;
            }
            for idx in (0..topo.len()).rev() {
                let r = topo[idx] as usize;
                let piv = lu.row_pos[r];
                if piv == usize::MAX {
                    continue;
                }
                let xr = x[r];
                if xr == 0.0 {
                    continue;
                }
                let lo = lu.l_colptr[piv];
                let hi = lu.l_colptr[piv + 1];
                for (&rr, &lv) in lu.l_rows[lo..hi].iter().zip(&lu.l_vals[lo..hi]) {
                    x[rr as usize] -= lv * xr;
                }
            }

            // pivot: largest magnitude among rows not yet pivotal
            let mut pivrow = usize::MAX;
            let mut pivmag = 0.0;
            for &r in &topo {
                let r = r as usize;
                if lu.row_pos[r] == usize::MAX {
                    let m = math::abs(x[r]);
                    if m > pivmag {
                        pivmag = m;
                        pivrow = r;
                    }
                }
            }
            if pivrow == usize::MAX || pivmag == 0.0 {
                return Err(Error::SingularSystem {
                    dropped_rows: Vec::new(),
                });
            }
            let pivval = x[pivrow];

            // store U column (pivot positions), then L column scaled
            for idx in (0..topo.len()).rev() {
                let r = topo[idx] as usize;
                let piv = lu.row_pos[r];
                if piv != usize::MAX && x[r] != 0.0 {
                    lu.u_rows.push(piv as u32);
                    lu.u_vals.push(x[r]);
                }
            }
            lu.u_rows.push(k as u32);
            lu.u_vals.push(pivval);
            lu.u_colptr.push(lu.u_rows.len());

            for &r in &topo {
                let r = r as usize;
                if lu.row_pos[r] == usize::MAX && r != pivrow && x[r] != 0.0 {
                    lu.l_rows.push(r as u32);
                    lu.l_vals.push(x[r] / pivval);
                }
            }
            lu.l_colptr.push(lu.l_rows.len());
            lu.row_pos[pivrow] = k;
            if lu.l_rows.len() + lu.u_rows.len() > max_nnz {
                return Err(Error::InvalidArgument(alloc::string::String::from(
                    "factor fill exceeds the configured limit",
                )));
            }
        }
        Ok(lu)
    }

    /// Stored entries in both factors.
    pub fn factor_nnz(&self) -> usize {
        self.l_vals.len() + self.u_vals.len()
    }

    /// (smallest pivot magnitude, largest entry magnitude in U).
    ///
    /// The ratio of the largest U entry to the largest input entry measures
    /// pivot growth; a tiny smallest pivot signals near-singularity.
    pub fn pivot_stats(&self) -> (f64, f64) {
        let mut min_piv = f64::INFINITY;
        let mut max_u = 0.0f64;
        for k in 0..self.n {
            let hi = self.u_colptr[k + 1];
            min_piv = math::min(min_piv, math::abs(self.u_vals[hi - 1]));
        }
        for &v in &self.u_vals {
            max_u = math::max(max_u, math::abs(v));
        }
        (min_piv, max_u)
    }

    /// Solves A x = b for the factored A.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        // forward: L y = P b, traversing columns in elimination order
        let mut y = vec![0.0; self.n];
        for (r, &br) in b.iter().enumerate() {
            y[self.row_pos[r]] = br;
        }
        for kcol in 0..self.n {
            let yk = y[kcol];
            if yk == 0.0 {
                continue;
            }
            let lo = self.l_colptr[kcol];
            let hi = self.l_colptr[kcol + 1];
            for t in lo..hi {
                y[self.row_pos[self.l_rows[t] as usize]] -= self.l_vals[t] * yk;
            }
        }
        // backward: U z = y
        let mut z = y;
        for kcol in (0..self.n).rev() {
            let lo = self.u_colptr[kcol];
            let hi = self.u_colptr[kcol + 1];
            // last entry of the column is the pivot (row kcol)
            let pivval = self.u_vals[hi - 1];
            let zk = z[kcol] / pivval;
            z[kcol] = zk;
            if zk != 0.0 {
                for t in lo..hi - 1 {
                    z[self.u_rows[t] as usize] -= self.u_vals[t] * zk;
                }
            }
        }
        // undo the column permutation
        let mut out = vec![0.0; self.n];
        for k in 0..self.n {
            out[self.col_perm[k]] = z[k];
        }
        out
    }
}

/// LDLᵀ factors of a symmetric matrix, eliminated in a fixed order.
///
/// L is unit lower triangular and stored by columns in elimination order with
/// row indices that are elimination positions; D is the pivot sequence. No
/// pivoting is performed: the caller provides per-variable diagonal shifts
/// that make every pivot safely nonzero, and pivots that still land inside
/// `pivot_floor` are bumped onto it.
pub struct LdlFactors {
    n: usize,
    /// variable eliminated at position k
    perm: Vec<usize>,
    /// inverse of `perm`
    pos: Vec<usize>,
    l_colptr: Vec<usize>,
    l_rows: Vec<u32>,
    l_vals: Vec<f64>,
    d: Vec<f64>,
    bumped: usize,
}

impl LdlFactors {
    /// Factors A + diag(shift) without pivoting, eliminating in `order`.
    ///
    /// `shift[v]` is added to the diagonal entry of variable v; its sign also
    /// decides which side a too-small pivot is pushed to. Aborts when L would
    /// exceed `max_nnz` stored entries.
    pub fn factor(
        a: &SparseMatrix,
        order: &[usize],
        shift: &[f64],
        pivot_floor: f64,
        max_nnz: usize,
    ) -> Result<LdlFactors> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidArgument(alloc::string::String::from(
                "LDLt needs a square matrix",
            )));
        }
        if order.len() != n || shift.len() != n {
            return Err(Error::InvalidArgument(alloc::string::String::from(
                "order or shift length mismatch",
            )));
        }
        let at = a.transpose();
        let mut pos = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return Err(Error::InvalidArgument(alloc::string::String::from(
                    "order is not a permutation",
                )));
            }
            pos[v] = k;
        }

        let mut ldl = LdlFactors {
            n,
            perm: order.to_vec(),
            pos,
            l_colptr: Vec::with_capacity(n + 1),
            l_rows: Vec::new(),
            l_vals: Vec::new(),
            d: Vec::with_capacity(n),
            bumped: 0,
        };
        ldl.l_colptr.push(0);

        // workspace indexed by elimination position
        let mut x = vec![0.0f64; n];
        let mut visited = vec![u64::MAX; n];
        let mut topo: Vec<u32> = Vec::with_capacity(n);
        let mut dfs_stack: Vec<(u32, usize)> = Vec::new();

        for k in 0..n {
            let col = ldl.perm[k];
            let (arows, avals) = at.row(col);

            // symbolic: positions reachable from the column's pattern through
            // the columns of L already computed; positions at or past k are
            // sinks since they have no L column yet
            topo.clear();
            for &r in arows {
                let p = ldl.pos[r] as u32;
                if visited[p as usize] == k as u64 {
                    continue;
                }
                visited[p as usize] = k as u64;
                if p as usize >= k {
                    topo.push(p);
                    continue;
                }
                dfs_stack.push((p, 0));
                while let Some(top) = dfs_stack.len().checked_sub(1) {
                    let (node, mut cur) = dfs_stack[top];
                    let lo = ldl.l_colptr[node as usize];
                    let hi = ldl.l_colptr[node as usize + 1];
                    let mut descended = false;
                    while cur < hi - lo {
                        let child = ldl.l_rows[lo + cur];
                        cur += 1;
                        if visited[child as usize] != k as u64 {
                            visited[child as usize] = k as u64;
                            if (child as usize) < k {
                                dfs_stack[top].1 = cur;
                                dfs_stack.push((child, 0));
                                descended = true;
                                break;
                            }
                            topo.push(child);
                        }
                    }
                    if !descended {
                        dfs_stack.pop();
                        topo.push(node);
                    }
                }
            }
            if visited[k] != k as u64 {
                // diagonal may be absent from the pattern; the shift fills it
                visited[k] = k as u64;
                topo.push(k as u32);
            }

            // numeric: sparse solve against the computed prefix of L
            for &p in &topo {
                x[p as usize] = 0.0;
            }
            for (&r, &v) in arows.iter().zip(avals) {
                x[ldl.pos[r]] = v;
            }
            x[k] += shift[col];
            for idx in (0..topo.len()).rev() {
                let p = topo[idx] as usize;
                if p >= k {
                    continue;
                }
                let xp = x[p];
                if xp == 0.0 {
                    continue;
                }
                let lo = ldl.l_colptr[p];
                let hi = ldl.l_colptr[p + 1];
                let rows = &ldl.l_rows[lo..hi];
                let vals = &ldl.l_vals[lo..hi];
                // unrolled by four; the row indices within a column are
                // distinct, so the updates are independent
                let pairs = rows.chunks_exact(4).zip(vals.chunks_exact(4));
                let rem = pairs.len() * 4;
                for (rc, vc) in pairs {
                    let a = x[rc[0] as usize] - vc[0] * xp;
                    let b = x[rc[1] as usize] - vc[1] * xp;
                    let c = x[rc[2] as usize] - vc[2] * xp;
                    let d = x[rc[3] as usize] - vc[3] * xp;
                    x[rc[0] as usize] = a;
                    x[rc[1] as usize] = b;
                    x[rc[2] as usize] = c;
                    x[rc[3] as usize] = d;
                }
                for (&r, &lv) in rows[rem..].iter().zip(&vals[rem..]) {
                    x[r as usize] -= lv * xp;
                }
            }

            let mut dk = x[k];
            if math::abs(dk) < pivot_floor {
                let side = if shift[col] != 0.0 { shift[col] } else { dk };
                dk = if side < 0.0 { -pivot_floor } else { pivot_floor };
                ldl.bumped += 1;
            }
            for &p in &topo {
                let pu = p as usize;
                if pu > k && x[pu] != 0.0 {
                    ldl.l_rows.push(p);
                    ldl.l_vals.push(x[pu] / dk);
                }
            }
            ldl.d.push(dk);
            ldl.l_colptr.push(ldl.l_rows.len());
            if ldl.l_rows.len() > max_nnz {
                return Err(Error::InvalidArgument(alloc::string::String::from(
                    "factor fill exceeds the configured limit",
                )));
            }
        }
        Ok(ldl)
    }

    /// Stored entries in L plus the diagonal.
    pub fn factor_nnz(&self) -> usize {
        self.l_vals.len() + self.n
    }

    /// Pivots that were pushed onto the floor during the factorization.
    pub fn bumped_pivots(&self) -> usize {
        self.bumped
    }

    /// Multiply-add count of the elimination, the sum of squared column
    /// lengths; a measure of how well the elimination order performed.
    pub fn elimination_flops(&self) -> f64 {
        let mut total = 0.0;
        for k in 0..self.n {
            let len = (self.l_colptr[k + 1] - self.l_colptr[k]) as f64;
            total += len * len;
        }
        total
    }

    /// Solves (A + diag(shift)) x = b for the factored matrix.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut z = vec![0.0; self.n];
        for k in 0..self.n {
            z[k] = b[self.perm[k]];
        }
        // forward: L z = P b, scattering down the columns
        for k in 0..self.n {
            let zk = z[k];
            if zk == 0.0 {
                continue;
            }
            let lo = self.l_colptr[k];
            let hi = self.l_colptr[k + 1];
            for (&r, &lv) in self.l_rows[lo..hi].iter().zip(&self.l_vals[lo..hi]) {
                z[r as usize] -= lv * zk;
            }
        }
        for k in 0..self.n {
            z[k] /= self.d[k];
        }
        // backward: Lᵀ x = z, gathering along the same columns
        for k in (0..self.n).rev() {
            let lo = self.l_colptr[k];
            let hi = self.l_colptr[k + 1];
            let mut acc = 0.0;
            for (&r, &lv) in self.l_rows[lo..hi].iter().zip(&self.l_vals[lo..hi]) {
                acc += lv * z[r as usize];
            }
            z[k] -= acc;
        }
        let mut out = vec![0.0; self.n];
        for k in 0..self.n {
            out[self.perm[k]] = z[k];
        }
        out
    }
}
