//! Nested dissection guided by node coordinates.
//!
//! The matrices this crate factors come from planar meshes, so a good vertex
//! separator can be read off the geometry: split a region at the median of
//! its wider extent, take the nodes on one side of the cut that have matrix
//! neighbours on the other side as the separator, and recurse. Separators are
//! eliminated after both halves, which is what keeps fill and flop counts low
//! for mesh graphs; small pieces are handed to minimum degree.

use alloc::vec;
use alloc::vec::Vec;

use super::amd::quotient_md;
use super::SparseMatrix;

/// Pieces at or below this size are ordered by minimum degree directly.
const LEAF_SIZE: usize = 96;

/// Fill-reducing elimination order for a structurally symmetric matrix whose
/// nodes sit at known planar positions.
///
/// `coords[v]` is the position of node v; auxiliary unknowns (such as
/// multipliers tied to a mesh vertex) should reuse the position of the node
/// they ride on. The pattern of `a` is symmetrized internally. Returns the
/// elimination order: `order[k]` is the node eliminated at step k.
pub fn nd_order(a: &SparseMatrix, coords: &[[f64; 2]]) -> Vec<usize> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "nd_order needs a square matrix");
    assert_eq!(coords.len(), n, "one coordinate pair per node");
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for r in 0..n {
        let (cols, _) = a.row(r);
        for &c in cols {
            if c != r {
                adj[r].push(c as u32);
                adj[c].push(r as u32);
            }
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }

    let mut out = Vec::with_capacity(n);
    let mut scratch = Scratch {
        side: vec![0u8; n],
        local_id: vec![0u32; n],
        adj: &adj,
        coords,
    };
    let all: Vec<u32> = (0..n as u32).collect();
    dissect(all, &mut scratch, &mut out);
    debug_assert_eq!(out.len(), n);
    out
}

struct Scratch<'a> {
    /// 1 when the node is in the far half of the current split.
    side: Vec<u8>,
    /// Renumbering used when a piece is handed to minimum degree.
    local_id: Vec<u32>,
    adj: &'a [Vec<u32>],
    coords: &'a [[f64; 2]],
}

fn dissect(mut nodes: Vec<u32>, scr: &mut Scratch, out: &mut Vec<usize>) {
    if nodes.len() <= LEAF_SIZE {
        md_piece(&nodes, scr, out);
        return;
    }

    // split across the wider bounding-box extent at the median
    let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
    for &v in &nodes {
        let p = scr.coords[v as usize];
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let axis = usize::from(hi[1] - lo[1] > hi[0] - lo[0]);
    let half = nodes.len() / 2;
    nodes.select_nth_unstable_by(half, |&x, &y| {
        let (px, py) = (scr.coords[x as usize][axis], scr.coords[y as usize][axis]);
        px.partial_cmp(&py).unwrap().then(x.cmp(&y))
    });
    let far = nodes.split_off(half);
    let near = nodes;

    for &v in &far {
        scr.side[v as usize] = 1;
    }
    // one-sided separator: every edge between the halves has its near
    // endpoint collected here, so removing it disconnects the rest
    let mut sep = Vec::new();
    let mut rest = Vec::with_capacity(near.len());
    for &v in &near {
        if scr.adj[v as usize].iter().any(|&w| scr.side[w as usize] == 1) {
            sep.push(v);
        } else {
            rest.push(v);
        }
    }
    for &v in &far {
        scr.side[v as usize] = 0;
    }

    if sep.len() * 2 >= near.len() {
        // geometry is not separating this piece; minimum degree does fine
        let mut all = rest;
        all.extend_from_slice(&sep);
        all.extend_from_slice(&far);
        md_piece(&all, scr, out);
        return;
    }

    dissect(rest, scr, out);
    dissect(far, scr, out);
    // the separator is a thin strip; walking it along the cut keeps its own
    // fill banded
    let cross = 1 - axis;
    sep.sort_unstable_by(|&x, &y| {
        let (px, py) = (scr.coords[x as usize][cross], scr.coords[y as usize][cross]);
        px.partial_cmp(&py).unwrap().then(x.cmp(&y))
    });
    out.extend(sep.iter().map(|&v| v as usize));
}

/// Orders one piece by minimum degree on its induced subgraph.
fn md_piece(nodes: &[u32], scr: &mut Scratch, out: &mut Vec<usize>) {
    let m = nodes.len();
    if m == 0 {
        return;
    }
    for (i, &v) in nodes.iter().enumerate() {
        scr.side[v as usize] = 1;
        scr.local_id[v as usize] = i as u32;
    }
    let mut local: Vec<Vec<u32>> = vec![Vec::new(); m];
    for (i, &v) in nodes.iter().enumerate() {
        for &w in &scr.adj[v as usize] {
            if scr.side[w as usize] == 1 {
                local[i].push(scr.local_id[w as usize]);
            }
        }
    }
    for &v in nodes {
        scr.side[v as usize] = 0;
    }
    let order = quotient_md(m, local, Vec::new());
    out.extend(order.into_iter().map(|i| nodes[i] as usize));
}
