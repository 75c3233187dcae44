//! Constrained solves in saddle-point form.
//!
//! The system [[K, Cᵀ], [C, 0]] [u; λ] = [F; g] is equilibrated, factored by
//! sparse LU with partial pivoting under an approximate-minimum-degree column
//! order, and polished by iterative refinement. Constraint rows that are
//! linearly dependent on earlier rows (corners generate such sets even after
//! exact deduplication) are removed up front by a modified Gram-Schmidt pass;
//! callers order rows so that the preferred kinds come first.

use alloc::vec;
use alloc::vec::Vec;

use super::{colamd_order, LuFactors, SparseMatrix};
use crate::math;
use crate::{Error, Result};

/// Tunables for [`solve_saddle`]; the defaults match the scheme's needs.
#[derive(Debug, Clone)]
pub struct SaddleOptions {
    /// Bound on ‖Ku + Cᵀλ − F‖₂/‖F‖₂ before the solve errors out.
    pub residual_tol: f64,
    /// Bound factor on ‖Cu − g‖_∞, scaled by (1 + ‖g‖_∞).
    pub constraint_tol: f64,
    /// Iterative refinement sweeps after the direct solve.
    pub refine_steps: usize,
    /// Row is dropped when its orthogonalized remainder falls below this
    /// fraction of its original norm.
    pub rank_tol: f64,
    /// Entries below this relative size are dropped from basis rows.
    pub basis_drop_tol: f64,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        SaddleOptions {
            residual_tol: 1e-8,
            constraint_tol: 1e-10,
            refine_steps: 3,
            rank_tol: 1e-8,
            basis_drop_tol: 1e-13,
        }
    }
}

/// Solution and diagnostics of a constrained solve.
#[derive(Debug, Clone)]
pub struct SaddleSolution {
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    /// ‖Ku + Cᵀλ − F‖₂ / ‖F‖₂ on the unscaled system.
    pub kkt_residual: f64,
    /// Normwise backward error of the full KKT system.
    pub backward_error: f64,
    /// ‖Cu − g‖_∞ over the constraint rows that were kept.
    pub constraint_violation: f64,
    /// Input rows removed by the rank filter (indices into the passed C).
    pub dropped_rows: Vec<usize>,
    /// Stored entries in the LU factors.
    pub factor_nnz: usize,
}

/// Solves the saddle system with default options.
pub fn solve_saddle(
    k: &SparseMatrix,
    c: &SparseMatrix,
    f: &[f64],
    g: &[f64],
) -> Result<SaddleSolution> {
    solve_saddle_with(k, c, f, g, &SaddleOptions::default())
}

/// Solves the saddle system with explicit options.
pub fn solve_saddle_with(
    k: &SparseMatrix,
    c: &SparseMatrix,
    f: &[f64],
    g: &[f64],
    opts: &SaddleOptions,
) -> Result<SaddleSolution> {
    let n = k.nrows();
    if k.ncols() != n || c.ncols() != n || f.len() != n || g.len() != c.nrows() {
        return Err(Error::InvalidArgument(alloc::string::String::from(
            "saddle system dimension mismatch",
        )));
    }

    let (kept, dropped) = rank_filter(c, opts.rank_tol, opts.basis_drop_tol);
    let cf = c.select_rows(&kept);
    let gf: Vec<f64> = kept.iter().map(|&r| g[r]).collect();
    let m = cf.nrows();

    // equilibration: u block by 1/sqrt(diag K), constraint rows to unit inf-norm
    let mut d1 = vec![1.0; n];
    for r in 0..n {
        let dk = k.get(r, r);
        if dk > 0.0 {
            d1[r] = 1.0 / math::sqrt(dk);
        }
    }
    let mut d2 = vec![1.0; m];
    for r in 0..m {
        let (_, vals) = cf.row(r);
        let mut rmax = 0.0;
        for &v in vals {
            rmax = math::max(rmax, math::abs(v));
        }
        if rmax > 0.0 {
            d2[r] = 1.0 / rmax;
        }
    }

    // assemble the scaled KKT matrix by rows
    let nm = n + m;
    let cft = cf.transpose();
    let mut row_offsets = Vec::with_capacity(nm + 1);
    let mut col_indices = Vec::with_capacity(k.nnz() + 2 * cf.nnz());
    let mut values = Vec::with_capacity(k.nnz() + 2 * cf.nnz());
    row_offsets.push(0);
    for r in 0..n {
        let (kc, kv) = k.row(r);
        for (&cc, &vv) in kc.iter().zip(kv) {
            col_indices.push(cc);
            values.push(d1[r] * vv * d1[cc]);
        }
        let (tc, tv) = cft.row(r);
        for (&cc, &vv) in tc.iter().zip(tv) {
            col_indices.push(n + cc);
            values.push(d1[r] * vv * d2[cc]);
        }
        row_offsets.push(col_indices.len());
    }
    for r in 0..m {
        let (cc, cv) = cf.row(r);
        for (&col, &vv) in cc.iter().zip(cv) {
            col_indices.push(col);
            values.push(d2[r] * vv * d1[col]);
        }
        row_offsets.push(col_indices.len());
    }
    let mat = SparseMatrix::from_csr(nm, nm, row_offsets, col_indices, values)?;

    let order = colamd_order(&mat);
    let lu = LuFactors::factor(&mat, &order).map_err(|e| match e {
        Error::SingularSystem { .. } => Error::SingularSystem {
            dropped_rows: dropped.clone(),
        },
        other => other,
    })?;

    let mut rhs = vec![0.0; nm];
    for r in 0..n {
        rhs[r] = d1[r] * f[r];
    }
    for r in 0..m {
        rhs[n + r] = d2[r] * gf[r];
    }
    let mut x = lu.solve(&rhs);
    // refinement against the unscaled system: backward error is not
    // invariant under the block scaling, so polishing the scaled residual
    // alone would leave the unscaled one inflated by the scaling spread
    let mut u: Vec<f64> = (0..n).map(|i| d1[i] * x[i]).collect();
    let mut lambda: Vec<f64> = (0..m).map(|j| d2[j] * x[n + j]).collect();
    for _ in 0..opts.refine_steps {
        let ku = k.matvec(&u);
        let ctl = cf.matvec_transpose(&lambda);
        let cu = cf.matvec(&u);
        let mut resid = vec![0.0; nm];
        for i in 0..n {
            resid[i] = d1[i] * (f[i] - ku[i] - ctl[i]);
        }
        for j in 0..m {
            resid[n + j] = d2[j] * (gf[j] - cu[j]);
        }
        let dx = lu.solve(&resid);
        for i in 0..nm {
            x[i] += dx[i];
        }
        for i in 0..n {
            u[i] = d1[i] * x[i];
        }
        for j in 0..m {
            lambda[j] = d2[j] * x[n + j];
        }
    }

    // residuals on the unscaled system
    let ku = k.matvec(&u);
    let ctl = cf.matvec_transpose(&lambda);
    let mut r1_norm2 = 0.0;
    let mut r1_inf = 0.0;
    for i in 0..n {
        let r = ku[i] + ctl[i] - f[i];
        r1_norm2 += r * r;
        r1_inf = math::max(r1_inf, math::abs(r));
    }
    let cu = cf.matvec(&u);
    let mut cvio = 0.0;
    for j in 0..m {
        cvio = math::max(cvio, math::abs(cu[j] - gf[j]));
    }
    let mut f_norm2 = 0.0;
    let mut binf = 0.0;
    for &v in f {
        f_norm2 += v * v;
        binf = math::max(binf, math::abs(v));
    }
    for &v in &gf {
        binf = math::max(binf, math::abs(v));
    }
    let kkt_residual = if f_norm2 > 0.0 {
        math::sqrt(r1_norm2 / f_norm2)
    } else {
        math::sqrt(r1_norm2)
    };

    // normwise backward error over the assembled (unscaled) KKT operator
    let mut minf = 0.0f64;
    let mut ct_rowsum = vec![0.0; n];
    for r in 0..m {
        let (cols, vals) = cf.row(r);
        let mut rs = 0.0;
        for (&col, &v) in cols.iter().zip(vals) {
            rs += math::abs(v);
            ct_rowsum[col] += math::abs(v);
        }
        minf = math::max(minf, rs);
    }
    for r in 0..n {
        let (_, vals) = k.row(r);
        let mut rs = ct_rowsum[r];
        for &v in vals {
            rs += math::abs(v);
        }
        minf = math::max(minf, rs);
    }
    let mut xinf = 0.0;
    for &v in u.iter().chain(lambda.iter()) {
        xinf = math::max(xinf, math::abs(v));
    }
    let denom = minf * xinf + binf;
    let backward_error = if denom > 0.0 {
        math::max(r1_inf, cvio) / denom
    } else {
        0.0
    };

    let mut gmax = 0.0;
    for &v in &gf {
        gmax = math::max(gmax, math::abs(v));
    }
    if kkt_residual > opts.residual_tol {
        return Err(Error::ResidualTooLarge {
            achieved: kkt_residual,
            tolerance: opts.residual_tol,
        });
    }
    if cvio > opts.constraint_tol * (1.0 + gmax) {
        return Err(Error::ResidualTooLarge {
            achieved: cvio,
            tolerance: opts.constraint_tol * (1.0 + gmax),
        });
    }

    Ok(SaddleSolution {
        u,
        lambda,
        kkt_residual,
        backward_error,
        constraint_violation: cvio,
        dropped_rows: dropped,
        factor_nnz: lu.factor_nnz(),
    })
}

/// Selects a maximal set of rows of C that is numerically independent.
///
/// Sequential modified Gram-Schmidt with one reorthogonalization sweep; a row
/// whose remainder norm falls below `rank_tol` times its own norm is dropped.
/// Returns (kept indices, dropped indices) in input order.
pub fn rank_filter(c: &SparseMatrix, rank_tol: f64, drop_tol: f64) -> (Vec<usize>, Vec<usize>) {
    struct BasisRow {
        cols: Vec<u32>,
        vals: Vec<f64>,
    }
    let ncols = c.ncols();
    let mut basis: Vec<BasisRow> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();

    // inverted index: for each column, the basis rows supported there, so a
    // candidate row only ever meets the basis rows it can actually overlap
    let mut col_index: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    let mut bseen: Vec<u64> = Vec::new();
    let mut gtick = 0u64;

    let mut w = vec![0.0f64; ncols];
    let mut stamp = vec![u64::MAX; ncols];
    let mut touched: Vec<u32> = Vec::new();
    let mut cands: Vec<u32> = Vec::new();

    for r in 0..c.nrows() {
        let tick = r as u64;
        let (cols, vals) = c.row(r);
        if cols.is_empty() {
            dropped.push(r);
            continue;
        }
        touched.clear();
        let mut norm0 = 0.0;
        for (&col, &v) in cols.iter().zip(vals) {
            w[col] = v;
            stamp[col] = tick;
            touched.push(col as u32);
            norm0 += v * v;
        }
        norm0 = math::sqrt(norm0);

        // the basis is kept orthonormal to roundoff, so only basis rows that
        // meet the original support can carry a nonzero projection; rows that
        // would be reached through fill-in have an exact coefficient of zero
        gtick += 1;
        cands.clear();
        for &colu in touched.iter() {
            for &bid in &col_index[colu as usize] {
                if bseen[bid as usize] != gtick {
                    bseen[bid as usize] = gtick;
                    cands.push(bid);
                }
            }
        }
        // a second orthogonalization pass is only needed when the first one
        // cancelled a substantial part of the row; subtractions at roundoff
        // scale are skipped outright
        let sub_floor = 1e-15 * norm0;
        let mut nr = 0.0;
        for pass in 0..2 {
            for &bid in &cands {
                let b = &basis[bid as usize];
                let mut dot = 0.0;
                for (bc, bv) in b.cols.iter().zip(&b.vals) {
                    let col = *bc as usize;
                    if stamp[col] == tick {
                        dot += bv * w[col];
                    }
                }
                if math::abs(dot) > sub_floor {
                    for (bc, bv) in b.cols.iter().zip(&b.vals) {
                        let col = *bc as usize;
                        if stamp[col] != tick {
                            stamp[col] = tick;
                            w[col] = 0.0;
                            touched.push(*bc);
                        }
                        w[col] -= dot * bv;
                    }
                }
            }
            nr = 0.0;
            for &col in &touched {
                let v = w[col as usize];
                nr += v * v;
            }
            nr = math::sqrt(nr);
            if pass == 0 && nr > 0.7 * norm0 {
                break;
            }
        }
        if nr <= rank_tol * norm0 {
            dropped.push(r);
            continue;
        }
        kept.push(r);

        for &col in &touched {
            w[col as usize] /= nr;
        }
        // normalizing a remainder much smaller than the row amplifies the
        // roundoff it picked up, which would leave the new basis vector with
        // sizable components along basis rows outside the candidate set;
        // sweep those out so the orthonormal invariant survives, discovering
        // partners through fill-in since amplified components can sit anywhere
        if nr < 0.1 * norm0 {
            for _round in 0..4 {
                gtick += 1;
                cands.clear();
                let mut tptr = 0;
                while tptr < touched.len() {
                    let col = touched[tptr] as usize;
                    tptr += 1;
                    for &bid in &col_index[col] {
                        if bseen[bid as usize] != gtick {
                            bseen[bid as usize] = gtick;
                            cands.push(bid);
                        }
                    }
                    while let Some(bid) = cands.pop() {
                        let b = &basis[bid as usize];
                        let mut dot = 0.0;
                        for (bc, bv) in b.cols.iter().zip(&b.vals) {
                            let col = *bc as usize;
                            if stamp[col] == tick {
                                dot += bv * w[col];
                            }
                        }
                        if math::abs(dot) > 1e-13 {
                            for (bc, bv) in b.cols.iter().zip(&b.vals) {
                                let col = *bc as usize;
                                if stamp[col] != tick {
                                    stamp[col] = tick;
                                    w[col] = 0.0;
                                    touched.push(*bc);
                                }
                                w[col] -= dot * bv;
                            }
                        }
                    }
                }
                let mut qn = 0.0;
                for &col in &touched {
                    let v = w[col as usize];
                    qn += v * v;
                }
                qn = math::sqrt(qn);
                for &col in &touched {
                    w[col as usize] /= qn;
                }
                if qn > 0.999_999 {
                    break;
                }
            }
        }

        touched.sort_unstable();
        let mut bcols = Vec::new();
        let mut bvals = Vec::new();
        for &col in &touched {
            let v = w[col as usize];
            if math::abs(v) > drop_tol {
                bcols.push(col);
                bvals.push(v);
            }
        }
        let bid = basis.len() as u32;
        for &col in &bcols {
            col_index[col as usize].push(bid);
        }
        basis.push(BasisRow {
            cols: bcols,
            vals: bvals,
        });
        bseen.push(u64::MAX);
    }
    (kept, dropped)
}
