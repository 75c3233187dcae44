//! P1 element calculus: element geometry, stiffness and load assembly, nodal
//! interpolation, and the five error norms of a computed solution.
//!
//! All integrals run over straight triangles with barycentric quadrature
//! rules from [`crate::quad`]; error integration defaults to degree 6 so the
//! quadrature error stays far below the discretization error.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::mesh::Mesh;
use crate::quad::QuadratureRule;
use crate::recovery::{HessianRecovery, RecoveryOperator};
use crate::sparse::SparseMatrix;

/// Per-triangle area and the constant gradients of the three hat functions.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub area: f64,
    /// ∇φ_i for the three local vertices, in local order.
    pub grads: [[f64; 2]; 3],
}

/// Computes area and basis gradients of triangle `ti`.
pub fn element_geometry(mesh: &Mesh, ti: usize) -> ElementGeometry {
    let [a, b, c] = mesh.triangles()[ti];
    let p = mesh.vertices();
    let det = (p[b][0] - p[a][0]) * (p[c][1] - p[a][1])
        - (p[b][1] - p[a][1]) * (p[c][0] - p[a][0]);
    let grads = [
        [(p[b][1] - p[c][1]) / det, (p[c][0] - p[b][0]) / det],
        [(p[c][1] - p[a][1]) / det, (p[a][0] - p[c][0]) / det],
        [(p[a][1] - p[b][1]) / det, (p[b][0] - p[a][0]) / det],
    ];
    ElementGeometry {
        area: det / 2.0,
        grads,
    }
}

/// Exact solution data for error measurement and nonhomogeneous boundaries.
pub struct ExactSolution {
    pub u: Box<dyn Fn([f64; 2]) -> f64>,
    pub grad: Box<dyn Fn([f64; 2]) -> [f64; 2]>,
    pub hess: Box<dyn Fn([f64; 2]) -> [[f64; 2]; 2]>,
    /// Third derivatives, indexed [i][j][k] = ∂_i ∂_j ∂_k u.
    pub third: Box<dyn Fn([f64; 2]) -> [[[f64; 2]; 2]; 2]>,
}

/// How boundary data is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryData {
    /// All four boundary conditions are zero.
    Homogeneous,
    /// Boundary values are sampled from the exact-solution callbacks.
    FromExact,
}

/// Right-hand side, optional exact solution, and the boundary mode.
pub struct ProblemSpec {
    pub f: Box<dyn Fn([f64; 2]) -> f64>,
    pub exact: Option<ExactSolution>,
    pub bc: BoundaryData,
}

/// P1 stiffness matrix S with S_pq = Σ_τ area(τ)·∇φ_p·∇φ_q.
pub fn assemble_stiffness(mesh: &Mesh) -> SparseMatrix {
    let n = mesh.num_vertices();
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    for ti in 0..mesh.num_triangles() {
        let geo = element_geometry(mesh, ti);
        let tri = mesh.triangles()[ti];
        for i in 0..3 {
            for j in 0..3 {
                let v = geo.area
                    * (geo.grads[i][0] * geo.grads[j][0] + geo.grads[i][1] * geo.grads[j][1]);
                triplets.push((tri[i], tri[j], v));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, triplets).expect("element indices are in range")
}

/// Load vector F_p = Σ_τ ∫_τ f·φ_p by the given quadrature rule.
pub fn assemble_load(mesh: &Mesh, f: &dyn Fn([f64; 2]) -> f64, rule: &QuadratureRule) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_vertices()];
    for ti in 0..mesh.num_triangles() {
        let geo = element_geometry(mesh, ti);
        let tri = mesh.triangles()[ti];
        let p = mesh.vertices();
        for (q, &w) in rule.points.iter().zip(rule.weights.iter()) {
            let x = [
                q[0] * p[tri[0]][0] + q[1] * p[tri[1]][0] + q[2] * p[tri[2]][0],
                q[0] * p[tri[0]][1] + q[1] * p[tri[1]][1] + q[2] * p[tri[2]][1],
            ];
            let fv = f(x);
            for i in 0..3 {
                out[tri[i]] += geo.area * w * q[i] * fv;
            }
        }
    }
    out
}

/// Nodal interpolant: u_I(p) = u(p) at every vertex.
pub fn interpolate(mesh: &Mesh, u: &dyn Fn([f64; 2]) -> f64) -> Vec<f64> {
    mesh.vertices().iter().map(|&x| u(x)).collect()
}

/// The five error measures of a discrete solution.
#[derive(Debug, Clone, Copy)]
pub struct ErrorNorms {
    /// ‖u − u_h‖₀.
    pub de: f64,
    /// ‖∇u − ∇u_h‖₀ with the broken piecewise-constant gradient.
    pub d1e: f64,
    /// ‖∇u − G u_h‖₀ with the piecewise-linear recovered gradient.
    pub d1re: f64,
    /// ‖D²u − D(G u_h)‖₀ with the per-element Jacobian of the recovered gradient.
    pub d2e: f64,
    /// ‖D³u − D(G² u_h)‖₀ over all 8 index triples.
    pub d3e: f64,
}

/// Computes all five error norms of `u_h` against the exact solution.
///
/// `g` supplies the recovered gradient, `h` the recovered-Hessian component
/// fields whose element-wise derivatives form the third-derivative tensor.
/// The rule should be exact to degree 6 or higher.
pub fn error_norms(
    mesh: &Mesh,
    u_h: &[f64],
    g: &RecoveryOperator,
    h: &HessianRecovery,
    exact: &ExactSolution,
    rule: &QuadratureRule,
) -> ErrorNorms {
    let gxu = g.gx.matvec(u_h);
    let gyu = g.gy.matvec(u_h);
    let hu = [
        h.hxx.matvec(u_h),
        h.hxy.matvec(u_h),
        h.hyx.matvec(u_h),
        h.hyy.matvec(u_h),
    ];

    let mut acc = [0.0f64; 5];
    let p = mesh.vertices();
    for ti in 0..mesh.num_triangles() {
        let geo = element_geometry(mesh, ti);
        let tri = mesh.triangles()[ti];
        // element-constant pieces
        let grad_uh = combine_grad(&geo, [u_h[tri[0]], u_h[tri[1]], u_h[tri[2]]]);
        let gx_loc = [gxu[tri[0]], gxu[tri[1]], gxu[tri[2]]];
        let gy_loc = [gyu[tri[0]], gyu[tri[1]], gyu[tri[2]]];
        let jac = [combine_grad(&geo, gx_loc), combine_grad(&geo, gy_loc)];
        let mut d3 = [[[0.0f64; 2]; 2]; 2];
        for (c, field) in hu.iter().enumerate() {
            let (j, k) = (c / 2, c % 2);
            let d = combine_grad(&geo, [field[tri[0]], field[tri[1]], field[tri[2]]]);
            d3[0][j][k] = d[0];
            d3[1][j][k] = d[1];
        }

        for (q, &w) in rule.points.iter().zip(rule.weights.iter()) {
            let x = [
                q[0] * p[tri[0]][0] + q[1] * p[tri[1]][0] + q[2] * p[tri[2]][0],
                q[0] * p[tri[0]][1] + q[1] * p[tri[1]][1] + q[2] * p[tri[2]][1],
            ];
            let scale = geo.area * w;
            let ue = (exact.u)(x);
            let uh = q[0] * u_h[tri[0]] + q[1] * u_h[tri[1]] + q[2] * u_h[tri[2]];
            acc[0] += scale * (ue - uh) * (ue - uh);

            let ge = (exact.grad)(x);
            acc[1] += scale * (sq(ge[0] - grad_uh[0]) + sq(ge[1] - grad_uh[1]));

            let gr = [
                q[0] * gx_loc[0] + q[1] * gx_loc[1] + q[2] * gx_loc[2],
                q[0] * gy_loc[0] + q[1] * gy_loc[1] + q[2] * gy_loc[2],
            ];
            acc[2] += scale * (sq(ge[0] - gr[0]) + sq(ge[1] - gr[1]));

            let he = (exact.hess)(x);
            // jac[j][i] = ∂_i (G_j u_h); compared entrywise against D²u
            acc[3] += scale
                * (sq(he[0][0] - jac[0][0])
                    + sq(he[0][1] - jac[0][1])
                    + sq(he[1][0] - jac[1][0])
                    + sq(he[1][1] - jac[1][1]));

            let te = (exact.third)(x);
            let mut s = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        s += sq(te[i][j][k] - d3[i][j][k]);
                    }
                }
            }
            acc[4] += scale * s;
        }
    }
    ErrorNorms {
        de: math::sqrt(acc[0]),
        d1e: math::sqrt(acc[1]),
        d1re: math::sqrt(acc[2]),
        d2e: math::sqrt(acc[3]),
        d3e: math::sqrt(acc[4]),
    }
}

/// ‖D²u − G²v‖₀ with the recovered Hessian as four piecewise-linear nodal
/// fields (ordered xx, xy, yx, yy), compared entrywise against the exact
/// Hessian.
pub fn hessian_field_error(
    mesh: &Mesh,
    fields: &[Vec<f64>; 4],
    hess: &dyn Fn([f64; 2]) -> [[f64; 2]; 2],
    rule: &QuadratureRule,
) -> f64 {
    let mut acc = 0.0;
    let p = mesh.vertices();
    for ti in 0..mesh.num_triangles() {
        let geo = element_geometry(mesh, ti);
        let tri = mesh.triangles()[ti];
        for (q, &w) in rule.points.iter().zip(rule.weights.iter()) {
            let x = [
                q[0] * p[tri[0]][0] + q[1] * p[tri[1]][0] + q[2] * p[tri[2]][0],
                q[0] * p[tri[0]][1] + q[1] * p[tri[1]][1] + q[2] * p[tri[2]][1],
            ];
            let he = hess(x);
            let mut s = 0.0;
            for (c, field) in fields.iter().enumerate() {
                let (j, k) = (c / 2, c % 2);
                let v = q[0] * field[tri[0]] + q[1] * field[tri[1]] + q[2] * field[tri[2]];
                s += sq(he[j][k] - v);
            }
            acc += geo.area * w * s;
        }
    }
    math::sqrt(acc)
}

fn combine_grad(geo: &ElementGeometry, vals: [f64; 3]) -> [f64; 2] {
    [
        vals[0] * geo.grads[0][0] + vals[1] * geo.grads[1][0] + vals[2] * geo.grads[2][0],
        vals[0] * geo.grads[0][1] + vals[1] * geo.grads[1][1] + vals[2] * geo.grads[2][1],
    ]
}

fn sq(x: f64) -> f64 {
    x * x
}
