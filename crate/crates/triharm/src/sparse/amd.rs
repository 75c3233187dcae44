//! Minimum degree orderings for sparse factorization.
//!
//! Both entry points run the same quotient-graph elimination in the style of
//! Amestoy, Davis, and Duff: eliminated pivots become elements, adjacent
//! edges are pruned when an element covers them, absorbed elements disappear,
//! and variable degrees are maintained by the standard upper-bound
//! approximation. [`amd_order`] works on the symmetric pattern of A + Aᵀ;
//! [`colamd_order`] orders columns by the pattern of AᵀA, which it represents
//! implicitly by seeding every row of A as an element. For LU with partial
//! row pivoting the column variant is the right choice: it bounds fill for
//! any row exchange the pivoting may make.

use alloc::vec;
use alloc::vec::Vec;

use super::SparseMatrix;

/// Returns an elimination order for the symmetric pattern of `a`.
///
/// `perm[k]` is the variable eliminated at step k. The pattern used is that
/// of A + Aᵀ with the diagonal ignored, so unsymmetric inputs are accepted.
pub fn amd_order(a: &SparseMatrix) -> Vec<usize> {
    let n = a.nrows().max(a.ncols());
    if n == 0 {
        return Vec::new();
    }
    // symmetrized adjacency without the diagonal
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for r in 0..a.nrows() {
        let (cols, _) = a.row(r);
        for &c in cols {
            if c != r {
                adj[r].push(c as u32);
                adj[c].push(r as u32);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    quotient_md(n, adj, Vec::new())
}

/// Returns a column elimination order for the pattern of AᵀA.
///
/// Columns sharing a row are treated as adjacent, without ever forming AᵀA:
/// each row starts life as an element of the quotient graph. The resulting
/// order keeps LU fill modest regardless of the row permutation chosen by
/// partial pivoting, which makes it the default for saddle-point systems
/// whose symmetric orderings degrade badly.
pub fn colamd_order(a: &SparseMatrix) -> Vec<usize> {
    let n = a.ncols();
    if n == 0 {
        return Vec::new();
    }
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(a.nrows());
    for r in 0..a.nrows() {
        let (cols, _) = a.row(r);
        rows.push(cols.iter().map(|&c| c as u32).collect());
    }
    quotient_md(n, vec![Vec::new(); n], rows)
}

/// Quotient-graph minimum degree over `nvar` variables.
///
/// `adj` holds variable-variable edges; `init_elems` holds variable sets that
/// start as elements (cliques) of the quotient graph. Element ids share the
/// index space `nvar..nvar + init_elems.len()`; pivots reuse their variable id
/// when they become elements.
pub(super) fn quotient_md(
    nvar: usize,
    mut adj: Vec<Vec<u32>>,
    init_elems: Vec<Vec<u32>>,
) -> Vec<usize> {
    let n = nvar;
    let nelem = init_elems.len();
    let total = n + nelem;

    // element boundaries indexed over the shared id space
    let mut bound: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut elem_alive = vec![false; total];
    let mut elems_of: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, elem) in init_elems.into_iter().enumerate() {
        let e = n + i;
        for &v in &elem {
            elems_of[v as usize].push(e as u32);
        }
        if !elem.is_empty() {
            elem_alive[e] = true;
        }
        bound[e] = elem;
    }
    let mut alive = vec![true; n];

    // initial degrees: neighbor count plus the exact union of element
    // boundaries, computed with a marking sweep
    let mut degree: Vec<usize> = vec![0; n];
    {
        let mut mark = vec![u64::MAX; n];
        for v in 0..n {
            let tick = v as u64;
            mark[v] = tick;
            let mut d = 0usize;
            for &u in &adj[v] {
                if mark[u as usize] != tick {
                    mark[u as usize] = tick;
                    d += 1;
                }
            }
            for &e in &elems_of[v] {
                for &u in &bound[e as usize] {
                    if mark[u as usize] != tick {
                        mark[u as usize] = tick;
                        d += 1;
                    }
                }
            }
            degree[v] = d;
        }
    }

    // degree buckets as intrusive doubly linked lists
    let mut head: Vec<i64> = vec![-1; n + 1];
    let mut next: Vec<i64> = vec![-1; n];
    let mut prev: Vec<i64> = vec![-1; n];
    let mut in_list = vec![false; n];
    let insert = |d: usize, v: usize, head: &mut [i64], next: &mut [i64], prev: &mut [i64], in_list: &mut [bool]| {
        next[v] = head[d];
        prev[v] = -1;
        if head[d] >= 0 {
            prev[head[d] as usize] = v as i64;
        }
        head[d] = v as i64;
        in_list[v] = true;
    };
    let remove = |d: usize, v: usize, head: &mut [i64], next: &mut [i64], prev: &mut [i64], in_list: &mut [bool]| {
        if !in_list[v] {
            return;
        }
        if prev[v] >= 0 {
            next[prev[v] as usize] = next[v];
        } else {
            head[d] = next[v];
        }
        if next[v] >= 0 {
            prev[next[v] as usize] = prev[v];
        }
        in_list[v] = false;
    };
    for v in 0..n {
        insert(degree[v], v, &mut head, &mut next, &mut prev, &mut in_list);
    }

    // stamped workspaces; mark is variable-indexed, w element-indexed
    let mut mark = vec![0u64; n];
    let mut stamp = 0u64;
    let mut wstamp = vec![0u64; total];
    let mut w = vec![0usize; total];

    let mut perm = Vec::with_capacity(n);
    let mut mindeg = 0usize;
    let mut lp: Vec<u32> = Vec::new();

    for _step in 0..n {
        // locate the smallest nonempty bucket
        while mindeg <= n && head[mindeg] < 0 {
            mindeg += 1;
        }
        if mindeg > n {
            break;
        }
        let p = head[mindeg] as usize;
        remove(degree[p], p, &mut head, &mut next, &mut prev, &mut in_list);
        alive[p] = false;
        perm.push(p);

        // form the new element boundary L_p
        stamp += 1;
        mark[p] = stamp;
        lp.clear();
        for &v in &adj[p] {
            let v = v as usize;
            if alive[v] && mark[v] != stamp {
                mark[v] = stamp;
                lp.push(v as u32);
            }
        }
        let old_elems = core::mem::take(&mut elems_of[p]);
        for &e in &old_elems {
            let e = e as usize;
            if !elem_alive[e] {
                continue;
            }
            for &v in &bound[e] {
                let v = v as usize;
                if alive[v] && mark[v] != stamp {
                    mark[v] = stamp;
                    lp.push(v as u32);
                }
            }
            elem_alive[e] = false; // absorbed into p
            bound[e] = Vec::new();
        }
        adj[p] = Vec::new();

        // |L_e \ L_p| for elements still touching L_p, via the counting trick
        let wtick = stamp;
        for &iu in &lp {
            let i = iu as usize;
            for &e in &elems_of[i] {
                let e = e as usize;
                if !elem_alive[e] {
                    continue;
                }
                if wstamp[e] != wtick {
                    wstamp[e] = wtick;
                    w[e] = bound[e].len();
                }
                w[e] -= 1;
            }
        }

        // update each boundary variable
        let lp_len = lp.len();
        for &iu in &lp {
            let i = iu as usize;
            remove(degree[i], i, &mut head, &mut next, &mut prev, &mut in_list);

            // prune edges covered by the new element, and edges to the pivot
            adj[i].retain(|&v| {
                let v = v as usize;
                alive[v] && mark[v] != stamp
            });
            // drop absorbed elements, add the new one
            elems_of[i].retain(|&e| elem_alive[e as usize]);
            elems_of[i].push(p as u32);

            // approximate external degree
            let mut d = adj[i].len() + (lp_len - 1);
            for &e in &elems_of[i] {
                let e = e as usize;
                if e == p {
                    continue;
                }
                d += if wstamp[e] == wtick { w[e] } else { bound[e].len() };
            }
            let cap = n - perm.len();
            if d > cap {
                d = cap;
            }
            let grew = degree[i] + lp_len - 1;
            if d > grew {
                d = grew;
            }
            degree[i] = d;
            insert(d, i, &mut head, &mut next, &mut prev, &mut in_list);
            if d < mindeg {
                mindeg = d;
            }
        }

        elem_alive[p] = true;
        bound[p] = lp.clone();
    }

    debug_assert_eq!(perm.len(), n);
    perm
}
