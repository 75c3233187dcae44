//! Triangulations: the four uniform square patterns, the L-shape and disk
//! generators, red refinement, and boundary geometry.
//!
//! A [`Mesh`] validates its topology on construction: triangles are reoriented
//! counterclockwise, degenerate triangles and duplicate vertices are rejected,
//! every edge must belong to at most two triangles, and the boundary is
//! extracted as the set of directed edges without a reverse partner (so the
//! boundary loop runs counterclockwise around the domain and edge normals
//! point outward).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// The mesh families the generators and studies understand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshPattern {
    /// All cell diagonals in the same direction.
    Regular,
    /// Diagonal direction alternates by row.
    Chevron,
    /// Each cell split into four triangles through its center.
    CrissCross,
    /// Diagonal direction alternates like a checkerboard.
    UnionJack,
    /// Concentric-ring triangulation of the unit disk.
    Disk,
    /// Uniform regular-pattern triangulation of the L-shaped domain.
    LShape,
    /// Loaded from mesh files.
    Imported,
}

/// One outward frame of a boundary edge at a boundary vertex.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    /// Outward unit normal of the adjacent boundary edge.
    pub normal: [f64; 2],
    /// Unit tangent of the edge (counterclockwise traversal direction).
    pub tangent: [f64; 2],
}

/// Boundary data attached to one boundary vertex.
#[derive(Debug, Clone)]
pub struct BoundaryVertexInfo {
    /// Vertex index.
    pub vertex: usize,
    /// One frame per adjacent boundary edge (two for a closed boundary).
    pub frames: Vec<Frame>,
    /// True when adjacent edge normals differ by more than 1e-8 radians.
    pub corner: bool,
}

/// A conforming triangulation.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    /// Directed boundary edges (from, to, adjacent triangle), counterclockwise.
    boundary_edges: Vec<(usize, usize, usize)>,
    boundary_vertices: Vec<usize>,
    boundary_info: Vec<BoundaryVertexInfo>,
    h_max: f64,
}

impl Mesh {
    /// Builds and validates a mesh from raw vertex and triangle lists.
    ///
    /// Clockwise triangles are reoriented; zero-area triangles, edges shared
    /// by more than two triangles, out-of-range indices, and duplicate
    /// vertices (within 1e-12·h_max) are errors.
    pub fn new(vertices: Vec<[f64; 2]>, mut triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        let nv = vertices.len();
        for (ti, t) in triangles.iter_mut().enumerate() {
            for &v in t.iter() {
                if v >= nv {
                    return Err(Error::BadMesh(format!(
                        "triangle {ti} references vertex {v} out of range"
                    )));
                }
            }
            let det = signed_area2(&vertices, *t);
            if det < 0.0 {
                t.swap(1, 2);
            } else if det == 0.0 {
                return Err(Error::BadMesh(format!("triangle {ti} degenerate")));
            }
        }

        // undirected edge incidence
        let mut edge_tris: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (ti, &[a, b, c]) in triangles.iter().enumerate() {
            for (p, q) in [(a, b), (b, c), (c, a)] {
                let key = (p.min(q), p.max(q));
                edge_tris.entry(key).or_default().push(ti);
            }
        }
        for (&(p, q), ts) in &edge_tris {
            if ts.len() > 2 {
                return Err(Error::BadMesh(format!(
                    "nonconforming: edge ({p},{q}) shared by {} triangles",
                    ts.len()
                )));
            }
        }

        let mut h_max = 0.0;
        for &(p, q) in edge_tris.keys() {
            let d = math::hypot(
                vertices[p][0] - vertices[q][0],
                vertices[p][1] - vertices[q][1],
            );
            h_max = math::max(h_max, d);
        }

        check_duplicates(&vertices, 1e-12 * h_max)?;

        // boundary: directed edges of CCW triangles without a reverse partner
        let mut boundary_edges = Vec::new();
        for (ti, &[a, b, c]) in triangles.iter().enumerate() {
            for (p, q) in [(a, b), (b, c), (c, a)] {
                let key = (p.min(q), p.max(q));
                if edge_tris[&key].len() == 1 {
                    boundary_edges.push((p, q, ti));
                }
            }
        }
        let mut boundary_vertices: Vec<usize> = boundary_edges
            .iter()
            .flat_map(|&(a, b, _)| [a, b])
            .collect();
        boundary_vertices.sort_unstable();
        boundary_vertices.dedup();

        let boundary_info = build_frames(&vertices, &boundary_edges, &boundary_vertices);

        Ok(Mesh {
            vertices,
            triangles,
            boundary_edges,
            boundary_vertices,
            boundary_info,
            h_max,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Directed boundary edges (from, to, adjacent triangle index).
    pub fn boundary_edges(&self) -> &[(usize, usize, usize)] {
        &self.boundary_edges
    }

    /// Sorted boundary vertex indices.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    /// Per boundary vertex: adjacent-edge frames and the corner flag.
    pub fn boundary_frames(&self) -> &[BoundaryVertexInfo] {
        &self.boundary_info
    }

    /// Longest edge length.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Number of distinct edges.
    pub fn num_edges(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            for (p, q) in [(a, b), (b, c), (c, a)] {
                edges.push((p.min(q), p.max(q)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// Vertex-to-triangle and vertex-to-vertex adjacency.
    pub fn vertex_adjacency(&self) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let nv = self.vertices.len();
        let mut v2t: Vec<Vec<u32>> = vec![Vec::new(); nv];
        let mut v2v: Vec<Vec<u32>> = vec![Vec::new(); nv];
        for (ti, &[a, b, c]) in self.triangles.iter().enumerate() {
            for v in [a, b, c] {
                v2t[v].push(ti as u32);
            }
            for (p, q) in [(a, b), (b, c), (c, a)] {
                v2v[p].push(q as u32);
                v2v[q].push(p as u32);
            }
        }
        for list in v2v.iter_mut().chain(v2t.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        (v2t, v2v)
    }
}

fn signed_area2(vertices: &[[f64; 2]], [a, b, c]: [usize; 3]) -> f64 {
    let e1 = [
        vertices[b][0] - vertices[a][0],
        vertices[b][1] - vertices[a][1],
    ];
    let e2 = [
        vertices[c][0] - vertices[a][0],
        vertices[c][1] - vertices[a][1],
    ];
    e1[0] * e2[1] - e1[1] * e2[0]
}

fn check_duplicates(vertices: &[[f64; 2]], tol: f64) -> Result<()> {
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| {
        vertices[a][0]
            .partial_cmp(&vertices[b][0])
            .unwrap()
            .then(vertices[a][1].partial_cmp(&vertices[b][1]).unwrap())
    });
    for i in 0..order.len() {
        let p = vertices[order[i]];
        for &oj in order[i + 1..].iter() {
            let q = vertices[oj];
            if q[0] - p[0] > tol {
                break;
            }
            if math::abs(q[1] - p[1]) <= tol {
                return Err(Error::BadMesh(format!(
                    "vertices {} and {} coincide within tolerance",
                    order[i], oj
                )));
            }
        }
    }
    Ok(())
}

fn build_frames(
    vertices: &[[f64; 2]],
    boundary_edges: &[(usize, usize, usize)],
    boundary_vertices: &[usize],
) -> Vec<BoundaryVertexInfo> {
    let mut frames_of: BTreeMap<usize, Vec<Frame>> = BTreeMap::new();
    for &(a, b, _) in boundary_edges {
        let d = [
            vertices[b][0] - vertices[a][0],
            vertices[b][1] - vertices[a][1],
        ];
        let len = math::hypot(d[0], d[1]);
        let t = [d[0] / len, d[1] / len];
        // CCW boundary traversal puts the outward normal at tangent rotated -90°
        let n = [t[1], -t[0]];
        let frame = Frame {
            normal: n,
            tangent: t,
        };
        frames_of.entry(a).or_default().push(frame);
        frames_of.entry(b).or_default().push(frame);
    }
    boundary_vertices
        .iter()
        .map(|&v| {
            let frames = frames_of.remove(&v).unwrap_or_default();
            let mut corner = false;
            for i in 0..frames.len() {
                for j in i + 1..frames.len() {
                    let (n1, n2) = (frames[i].normal, frames[j].normal);
                    let cross = math::abs(n1[0] * n2[1] - n1[1] * n2[0]);
                    let dot = n1[0] * n2[0] + n1[1] * n2[1];
                    if math::atan2(cross, dot) > 1e-8 {
                        corner = true;
                    }
                }
            }
            BoundaryVertexInfo {
                vertex: v,
                frames,
                corner,
            }
        })
        .collect()
}

/// Uniform triangulation of a rectangle in one of the four square patterns.
///
/// Vertices are laid out row-major; CrissCross appends cell centers after the
/// grid block. Rejects n < 2 and the non-square patterns.
pub fn generate_uniform(
    pattern: MeshPattern,
    n: usize,
    lo: [f64; 2],
    hi: [f64; 2],
) -> Result<Mesh> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "pattern mesh needs n >= 2, got {n}"
        )));
    }
    match pattern {
        MeshPattern::Regular | MeshPattern::Chevron | MeshPattern::CrissCross | MeshPattern::UnionJack => {}
        other => {
            return Err(Error::InvalidArgument(format!(
                "generate_uniform does not handle {other:?}"
            )))
        }
    }
    let coord = |k: usize, axis: usize| -> f64 {
        lo[axis] + (hi[axis] - lo[axis]) * (k as f64) / (n as f64)
    };
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices: Vec<[f64; 2]> = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([coord(i, 0), coord(j, 1)]);
        }
    }
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (v00, v10) = (vid(i, j), vid(i + 1, j));
            let (v01, v11) = (vid(i, j + 1), vid(i + 1, j + 1));
            if pattern == MeshPattern::CrissCross {
                let center = vertices.len();
                vertices.push([
                    (coord(i, 0) + coord(i + 1, 0)) / 2.0,
                    (coord(j, 1) + coord(j + 1, 1)) / 2.0,
                ]);
                triangles.push([v00, v10, center]);
                triangles.push([v10, v11, center]);
                triangles.push([v11, v01, center]);
                triangles.push([v01, v00, center]);
                continue;
            }
            let ne_diagonal = match pattern {
                MeshPattern::Regular => true,
                MeshPattern::Chevron => j % 2 == 0,
                MeshPattern::UnionJack => (i + j) % 2 == 0,
                _ => unreachable!(),
            };
            if ne_diagonal {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            } else {
                triangles.push([v00, v10, v01]);
                triangles.push([v10, v11, v01]);
            }
        }
    }
    Mesh::new(vertices, triangles)
}

/// Regular-pattern triangulation of [−1,1]² minus [0,1]×[−1,0].
///
/// `n` is the cell count per direction of the full square and must be even so
/// the reentrant corner lands on a grid point.
pub fn generate_lshape(n: usize) -> Result<Mesh> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "L-shape needs even n >= 2, got {n}"
        )));
    }
    let coord = |k: usize| -1.0 + 2.0 * (k as f64) / (n as f64);
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            if coord(i) > 0.0 && coord(j) < 0.0 {
                continue;
            }
            index.insert((i, j), vertices.len());
            vertices.push([coord(i), coord(j)]);
        }
    }
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i >= n / 2 && j < n / 2 {
                continue;
            }
            let v00 = index[&(i, j)];
            let v10 = index[&(i + 1, j)];
            let v01 = index[&(i, j + 1)];
            let v11 = index[&(i + 1, j + 1)];
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    Mesh::new(vertices, triangles)
}

/// Concentric-ring triangulation of the unit disk.
///
/// Ring k holds 6k vertices at radius k/n_rings; every boundary vertex ends
/// exactly on the unit circle. Consecutive rings are joined by an angle-merge
/// strip, so the mesh is quasi-uniform.
pub fn generate_disk(n_rings: usize) -> Result<Mesh> {
    if n_rings < 1 {
        return Err(Error::InvalidArgument(format!(
            "disk needs n_rings >= 1, got {n_rings}"
        )));
    }
    let mut vertices: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let mut ring_start = vec![0usize, 1];
    for k in 1..=n_rings {
        let m = 6 * k;
        let r = k as f64 / n_rings as f64;
        for j in 0..m {
            let th = 2.0 * core::f64::consts::PI * (j as f64) / (m as f64);
            vertices.push([r * math::cos(th), r * math::sin(th)]);
        }
        ring_start.push(ring_start[k] + m);
    }
    let mut triangles = Vec::new();
    for j in 0..6 {
        triangles.push([0, 1 + j, 1 + (j + 1) % 6]);
    }
    for k in 2..=n_rings {
        let (ai, bi) = (ring_start[k - 1], ring_start[k]);
        let (a, b) = (6 * (k - 1), 6 * k);
        let (mut i, mut jj) = (0usize, 0usize);
        while i < a || jj < b {
            let ang_i = if i < a {
                (i + 1) as f64 / a as f64
            } else {
                f64::INFINITY
            };
            let ang_j = if jj < b {
                (jj + 1) as f64 / b as f64
            } else {
                f64::INFINITY
            };
            if ang_j <= ang_i {
                triangles.push([bi + jj % b, bi + (jj + 1) % b, ai + i % a]);
                jj += 1;
            } else {
                triangles.push([ai + i % a, ai + (i + 1) % a, bi + jj % b]);
                i += 1;
            }
        }
    }
    Mesh::new(vertices, triangles)
}

/// Red refinement: each triangle splits into four through its edge midpoints.
///
/// With `project_boundary`, midpoints of boundary edges are renormalized onto
/// the unit circle (for disk meshes).
pub fn refine_regular(mesh: &Mesh, project_boundary: bool) -> Result<Mesh> {
    let mut vertices = mesh.vertices().to_vec();
    let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let boundary: alloc::collections::BTreeSet<(usize, usize)> = mesh
        .boundary_edges()
        .iter()
        .map(|&(a, b, _)| (a.min(b), a.max(b)))
        .collect();
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    for &[a, b, c] in mesh.triangles() {
        let mut mid = |p: usize, q: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            let key = (p.min(q), p.max(q));
            if let Some(&m) = midpoint.get(&key) {
                return m;
            }
            let mut m = [
                (vertices[p][0] + vertices[q][0]) / 2.0,
                (vertices[p][1] + vertices[q][1]) / 2.0,
            ];
            if project_boundary && boundary.contains(&key) {
                let r = math::hypot(m[0], m[1]);
                m = [m[0] / r, m[1] / r];
            }
            let id = vertices.len();
            vertices.push(m);
            midpoint.insert(key, id);
            id
        };
        let ab = mid(a, b, &mut vertices);
        let bc = mid(b, c, &mut vertices);
        let ca = mid(c, a, &mut vertices);
        triangles.push([a, ab, ca]);
        triangles.push([b, bc, ab]);
        triangles.push([c, ca, bc]);
        triangles.push([ab, bc, ca]);
    }
    Mesh::new(vertices, triangles)
}
