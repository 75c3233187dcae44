//! Gradient recovery operators: the area-weighted average, the gradient
//! least-squares fit, and the polynomial-preserving fit, each assembled as a
//! pair of sparse matrices acting on nodal vectors; plus the composed
//! recovered Hessian and the element-wise third-derivative tensor.
//!
//! Patches grow by vertex-neighbor layers until the fit has enough samples
//! and an acceptable condition number, so boundary and corner vertices use
//! the same rule as interior ones. Fits run through a column-pivoted
//! Householder QR on coordinates shifted to the patch center and scaled by
//! the patch diameter, which keeps conditioning independent of mesh size.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::fem::element_geometry;
use crate::math;
use crate::mesh::Mesh;
use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Which recovery rule a [`RecoveryOperator`] was built by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryMethod {
    /// Area-weighted average of adjacent element gradients.
    Wa,
    /// Linear least-squares fit to element gradients at patch barycenters.
    Spr,
    /// Quadratic least-squares fit to nodal values at patch vertices.
    Ppr,
}

/// The recovered-gradient operator as a pair of sparse matrices.
///
/// Row p of `gx`/`gy` maps nodal values to the recovered x/y derivative at
/// vertex p; its support is contained in the patch used at p.
pub struct RecoveryOperator {
    pub gx: SparseMatrix,
    pub gy: SparseMatrix,
    pub method: RecoveryMethod,
}

/// The four composed second-derivative matrices H_jk = G̃_j·G_k.
pub struct HessianRecovery {
    pub hxx: SparseMatrix,
    pub hxy: SparseMatrix,
    pub hyx: SparseMatrix,
    pub hyy: SparseMatrix,
}

impl HessianRecovery {
    /// Applies all four component maps to a nodal vector.
    pub fn apply(&self, v: &[f64]) -> [Vec<f64>; 4] {
        [
            self.hxx.matvec(v),
            self.hxy.matvec(v),
            self.hyx.matvec(v),
            self.hyy.matvec(v),
        ]
    }
}

/// Tuning knobs for the polynomial-preserving fit.
#[derive(Debug, Clone, Copy)]
pub struct PprOptions {
    /// Drop boundary vertices from every sample set; patches touching the
    /// boundary then grow until enough interior samples are found.
    pub interior_samples_only: bool,
    /// Maximum number of neighbor layers a patch may grow to.
    pub max_layers: usize,
    /// Condition-number ceiling for the scaled fit.
    pub cond_max: f64,
}

impl Default for PprOptions {
    fn default() -> Self {
        PprOptions {
            interior_samples_only: false,
            max_layers: 3,
            cond_max: 1e8,
        }
    }
}

/// Builds the operator for the requested method with default settings.
pub fn build(mesh: &Mesh, method: RecoveryMethod) -> Result<RecoveryOperator> {
    match method {
        RecoveryMethod::Wa => build_wa(mesh),
        RecoveryMethod::Spr => build_spr(mesh),
        RecoveryMethod::Ppr => build_ppr(mesh),
    }
}

/// Area-weighted gradient averaging: (Gv)(p) = Σ_τ area·∇v|_τ / Σ_τ area
/// over the elements touching p. Exact for linears.
pub fn build_wa(mesh: &Mesh) -> Result<RecoveryOperator> {
    let n = mesh.num_vertices();
    let (v2t, _) = mesh.vertex_adjacency();
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    for p in 0..n {
        let total: f64 = v2t[p]
            .iter()
            .map(|&ti| element_geometry(mesh, ti as usize).area)
            .sum();
        for &ti in &v2t[p] {
            let geo = element_geometry(mesh, ti as usize);
            let tri = mesh.triangles()[ti as usize];
            for loc in 0..3 {
                let w = geo.area / total;
                tx.push((p, tri[loc], w * geo.grads[loc][0]));
                ty.push((p, tri[loc], w * geo.grads[loc][1]));
            }
        }
    }
    Ok(RecoveryOperator {
        gx: SparseMatrix::from_triplets(n, n, tx)?,
        gy: SparseMatrix::from_triplets(n, n, ty)?,
        method: RecoveryMethod::Wa,
    })
}

/// Gradient least-squares fit: per vertex, a linear polynomial is fitted to
/// the element gradients of the patch sampled at barycenters (area-weighted,
/// which also realizes the local L2 projection for P1 data) and evaluated at
/// the vertex.
pub fn build_spr(mesh: &Mesh) -> Result<RecoveryOperator> {
    let n = mesh.num_vertices();
    let (v2t, v2v) = mesh.vertex_adjacency();
    let verts = mesh.vertices();
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    for p in 0..n {
        let mut patch: BTreeSet<u32> = core::iter::once(p as u32)
            .chain(v2v[p].iter().copied())
            .collect();
        let mut layers = 1usize;
        let (elems, w0) = loop {
            let mut elems: BTreeSet<u32> = BTreeSet::new();
            for &q in &patch {
                elems.extend(v2t[q as usize].iter().copied());
            }
            let elems: Vec<u32> = elems.into_iter().collect();
            let m = elems.len();
            let d = patch_diameter(verts, &patch);
            let mut ok = m >= 3;
            let mut cond = f64::INFINITY;
            let mut qr = None;
            if ok {
                // rows weighted by sqrt(area): least squares in the area
                // inner product
                let mut a = vec![0.0; m * 3];
                for (s, &ti) in elems.iter().enumerate() {
                    let geo = element_geometry(mesh, ti as usize);
                    let tri = mesh.triangles()[ti as usize];
                    let bx = (verts[tri[0]][0] + verts[tri[1]][0] + verts[tri[2]][0]) / 3.0;
                    let by = (verts[tri[0]][1] + verts[tri[1]][1] + verts[tri[2]][1]) / 3.0;
                    let sw = math::sqrt(geo.area);
                    a[s] = sw;
                    a[s + m] = sw * (bx - verts[p][0]) / d;
                    a[s + 2 * m] = sw * (by - verts[p][1]) / d;
                }
                let f = PivotedQr::new(a, m, 3);
                cond = f.cond();
                ok = cond < 1e8;
                qr = Some(f);
            }
            if ok {
                break (elems, qr.unwrap().pinv_row(0));
            }
            if layers >= 3 {
                return Err(Error::DegeneratePatch { vertex: p, cond });
            }
            grow_patch(&mut patch, &v2v);
            layers += 1;
        };
        for (s, &ti) in elems.iter().enumerate() {
            let geo = element_geometry(mesh, ti as usize);
            let tri = mesh.triangles()[ti as usize];
            let sw = math::sqrt(geo.area);
            for loc in 0..3 {
                tx.push((p, tri[loc], w0[s] * sw * geo.grads[loc][0]));
                ty.push((p, tri[loc], w0[s] * sw * geo.grads[loc][1]));
            }
        }
    }
    Ok(RecoveryOperator {
        gx: SparseMatrix::from_triplets(n, n, tx)?,
        gy: SparseMatrix::from_triplets(n, n, ty)?,
        method: RecoveryMethod::Spr,
    })
}

/// Polynomial-preserving recovery with default options (all patch vertices
/// as samples, up to 3 layers). Exact for quadratics at every vertex.
pub fn build_ppr(mesh: &Mesh) -> Result<RecoveryOperator> {
    build_ppr_with(mesh, &PprOptions::default())
}

/// Polynomial-preserving recovery: per vertex, a quadratic is fitted to the
/// nodal values at the patch vertices and its gradient evaluated at the
/// center. See [`PprOptions`] for the sample-filtering variant.
pub fn build_ppr_with(mesh: &Mesh, opts: &PprOptions) -> Result<RecoveryOperator> {
    let n = mesh.num_vertices();
    let (_, v2v) = mesh.vertex_adjacency();
    let verts = mesh.vertices();
    let mut boundary = vec![false; n];
    for &b in mesh.boundary_vertices() {
        boundary[b] = true;
    }
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    for p in 0..n {
        let mut patch: BTreeSet<u32> = core::iter::once(p as u32)
            .chain(v2v[p].iter().copied())
            .collect();
        let mut layers = 1usize;
        let (samples, d, qr) = loop {
            let samples: Vec<u32> = if opts.interior_samples_only {
                patch
                    .iter()
                    .copied()
                    .filter(|&q| !boundary[q as usize])
                    .collect()
            } else {
                patch.iter().copied().collect()
            };
            let m = samples.len();
            // diameter over the unfiltered patch keeps the scaling stable
            // even when most samples are filtered out
            let d = patch_diameter(verts, &patch);
            let mut ok = m >= 6;
            let mut cond = f64::INFINITY;
            let mut qr = None;
            if ok {
                let mut a = vec![0.0; m * 6];
                for (s, &q) in samples.iter().enumerate() {
                    let x = (verts[q as usize][0] - verts[p][0]) / d;
                    let y = (verts[q as usize][1] - verts[p][1]) / d;
                    a[s] = 1.0;
                    a[s + m] = x;
                    a[s + 2 * m] = y;
                    a[s + 3 * m] = x * x;
                    a[s + 4 * m] = x * y;
                    a[s + 5 * m] = y * y;
                }
                let f = PivotedQr::new(a, m, 6);
                cond = f.cond();
                ok = cond < opts.cond_max;
                qr = Some(f);
            }
            if ok {
                break (samples, d, qr.unwrap());
            }
            if layers >= opts.max_layers {
                return Err(Error::DegeneratePatch { vertex: p, cond });
            }
            grow_patch(&mut patch, &v2v);
            layers += 1;
        };
        let rx = qr.pinv_row(1);
        let ry = qr.pinv_row(2);
        for (s, &q) in samples.iter().enumerate() {
            tx.push((p, q as usize, rx[s] / d));
            ty.push((p, q as usize, ry[s] / d));
        }
    }
    Ok(RecoveryOperator {
        gx: SparseMatrix::from_triplets(n, n, tx)?,
        gy: SparseMatrix::from_triplets(n, n, ty)?,
        method: RecoveryMethod::Ppr,
    })
}

/// Composes the recovered-Hessian component matrices H_jk = G̃_j·G_k.
///
/// Passing the same operator twice gives the plain composition G_j·G_k; a
/// distinct outer operator lets the second differentiation use its own
/// sampling rule.
pub fn recovered_hessian(
    outer: &RecoveryOperator,
    inner: &RecoveryOperator,
) -> Result<HessianRecovery> {
    if outer.gx.nrows() != inner.gx.nrows() {
        return Err(Error::InvalidArgument(alloc::format!(
            "operator sizes differ: {} vs {}",
            outer.gx.nrows(),
            inner.gx.nrows()
        )));
    }
    Ok(HessianRecovery {
        hxx: outer.gx.spgemm(&inner.gx)?,
        hxy: outer.gx.spgemm(&inner.gy)?,
        hyx: outer.gy.spgemm(&inner.gx)?,
        hyy: outer.gy.spgemm(&inner.gy)?,
    })
}

/// Per-element third-derivative tensor t[i][j][k] = ∂_i of the piecewise
/// linear field H_jk u, constant on each element.
pub fn third_derivative_field(mesh: &Mesh, fields: &[Vec<f64>; 4]) -> Vec<[[[f64; 2]; 2]; 2]> {
    let mut out = Vec::with_capacity(mesh.num_triangles());
    for ti in 0..mesh.num_triangles() {
        let geo = element_geometry(mesh, ti);
        let tri = mesh.triangles()[ti];
        let mut t = [[[0.0f64; 2]; 2]; 2];
        for (c, field) in fields.iter().enumerate() {
            let (j, k) = (c / 2, c % 2);
            for i in 0..2 {
                t[i][j][k] = (0..3)
                    .map(|loc| field[tri[loc]] * geo.grads[loc][i])
                    .sum();
            }
        }
        out.push(t);
    }
    out
}

/// ‖D(G²u)‖₀: the L2 norm of the piecewise-constant third-derivative tensor.
pub fn d3_seminorm(mesh: &Mesh, fields: &[Vec<f64>; 4]) -> f64 {
    let mut acc = 0.0;
    for (ti, t) in third_derivative_field(mesh, fields).into_iter().enumerate() {
        let geo = element_geometry(mesh, ti);
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    s += t[i][j][k] * t[i][j][k];
                }
            }
        }
        acc += geo.area * s;
    }
    math::sqrt(acc)
}

fn grow_patch(patch: &mut BTreeSet<u32>, v2v: &[Vec<u32>]) {
    let mut add = Vec::new();
    for &q in patch.iter() {
        add.extend(v2v[q as usize].iter().copied());
    }
    patch.extend(add);
}

fn patch_diameter(verts: &[[f64; 2]], patch: &BTreeSet<u32>) -> f64 {
    let pts: Vec<[f64; 2]> = patch.iter().map(|&q| verts[q as usize]).collect();
    let mut d = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = math::max(
                d,
                math::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]),
            );
        }
    }
    math::max(d, 1e-300)
}

/// Column-pivoted Householder QR of a column-major m×n matrix, m ≥ n.
///
/// Provides rows of the pseudoinverse (for full-rank fits) and a condition
/// estimate from the R diagonal.
struct PivotedQr {
    m: usize,
    n: usize,
    /// Reflector vectors below the diagonal, R strictly above it.
    qr: Vec<f64>,
    beta: Vec<f64>,
    rdiag: Vec<f64>,
    piv: Vec<usize>,
}

impl PivotedQr {
    fn new(mut a: Vec<f64>, m: usize, n: usize) -> PivotedQr {
        debug_assert!(m >= n && a.len() == m * n);
        let mut beta = vec![0.0; n];
        let mut rdiag = vec![0.0; n];
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best = k;
            let mut best_norm2 = -1.0;
            for j in k..n {
                let s: f64 = (k..m).map(|i| a[i + j * m] * a[i + j * m]).sum();
                if s > best_norm2 {
                    best_norm2 = s;
                    best = j;
                }
            }
            if best != k {
                for i in 0..m {
                    a.swap(i + k * m, i + best * m);
                }
                piv.swap(k, best);
            }
            let norm = math::sqrt(best_norm2);
            if norm == 0.0 {
                continue;
            }
            let x0 = a[k + k * m];
            let alpha = if x0 >= 0.0 { -norm } else { norm };
            a[k + k * m] = x0 - alpha;
            let vtv: f64 = (k..m).map(|i| a[i + k * m] * a[i + k * m]).sum();
            beta[k] = 2.0 / vtv;
            rdiag[k] = alpha;
            for j in k + 1..n {
                let s: f64 = beta[k]
                    * (k..m).map(|i| a[i + k * m] * a[i + j * m]).sum::<f64>();
                for i in k..m {
                    a[i + j * m] -= s * a[i + k * m];
                }
            }
        }
        PivotedQr {
            m,
            n,
            qr: a,
            beta,
            rdiag,
            piv,
        }
    }

    /// |R₀₀| / |R_nn|; infinite when the trailing diagonal vanishes.
    fn cond(&self) -> f64 {
        let mut hi = 0.0f64;
        let mut lo = f64::INFINITY;
        for &r in &self.rdiag {
            hi = math::max(hi, math::abs(r));
            lo = math::min(lo, math::abs(r));
        }
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Row of the pseudoinverse for original coefficient `coef`: the weight
    /// vector w with fitted_coef = w·b. Requires a full-rank factor.
    fn pinv_row(&self, coef: usize) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        let pos = self.piv.iter().position(|&p| p == coef).unwrap();
        // solve Rᵀ y = e_pos by forward substitution
        let mut y = vec![0.0; n];
        for r in 0..n {
            let mut s = if r == pos { 1.0 } else { 0.0 };
            for t in 0..r {
                s -= self.qr[t + r * m] * y[t];
            }
            y[r] = s / self.rdiag[r];
        }
        // w = Q·[y; 0] via the reflectors in reverse order
        let mut w = vec![0.0; m];
        w[..n].copy_from_slice(&y);
        for k in (0..n).rev() {
            if self.beta[k] == 0.0 {
                continue;
            }
            let s: f64 = self.beta[k]
                * (k..m).map(|i| self.qr[i + k * m] * w[i]).sum::<f64>();
            for i in k..m {
                w[i] -= s * self.qr[i + k * m];
            }
        }
        w
    }
}
