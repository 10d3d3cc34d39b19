//! Triangulations of multiply-connected polygons.
//!
//! A [`Mesh`] is a flat indexed triangulation: vertices, counterclockwise
//! triangles and a derived edge list. Every edge is stored once with the
//! global orientation "lower vertex index to higher vertex index"; its unit
//! tangent follows that orientation. Boundary edges and vertices carry the
//! index of the boundary component they lie on, component 0 being the outer
//! boundary.

mod generate;
mod io;
mod refine;
mod validate;

pub use generate::{generate_square_hole_mesh, HoleBox};
pub use io::MeshFile;
pub use refine::refine_uniform;
pub use validate::{validate, ValidationReport, Violation};

use crate::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Interior,
    Component(usize),
}

impl BoundaryTag {
    pub fn is_interior(self) -> bool {
        matches!(self, BoundaryTag::Interior)
    }

    pub fn component(self) -> Option<usize> {
        match self {
            BoundaryTag::Interior => None,
            BoundaryTag::Component(k) => Some(k),
        }
    }
}

/// A polygon with polygonal holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    /// Counterclockwise outer boundary.
    pub outer: Vec<Point>,
    /// Clockwise hole boundaries.
    pub holes: Vec<Vec<Point>>,
}

impl Domain {
    pub fn n_holes(&self) -> usize {
        self.holes.len()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    /// Local edge `k` of a triangle is opposite its local vertex `k`.
    triangle_edges: Vec<[usize; 3]>,
    edge_triangles: Vec<Vec<usize>>,
    vertex_tags: Vec<BoundaryTag>,
    edge_tags: Vec<BoundaryTag>,
    n_holes: usize,
}

impl Mesh {
    /// Build the topology of a triangulation. No invariant is checked here;
    /// use [`validate`] for that.
    pub fn from_parts(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, n_holes: usize) -> Self {
        let (edges, triangle_edges, edge_triangles) = build_edges(&triangles);
        let mut mesh = Mesh {
            vertex_tags: vec![BoundaryTag::Interior; vertices.len()],
            edge_tags: vec![BoundaryTag::Interior; edges.len()],
            vertices,
            triangles,
            edges,
            triangle_edges,
            edge_triangles,
            n_holes,
        };
        mesh.assign_boundary_tags();
        mesh
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_triangles[e]
    }

    pub fn vertex_tags(&self) -> &[BoundaryTag] {
        &self.vertex_tags
    }

    pub fn edge_tags(&self) -> &[BoundaryTag] {
        &self.edge_tags
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Number of holes `J` of the underlying domain.
    pub fn n_holes(&self) -> usize {
        self.n_holes
    }

    pub fn n_interior_vertices(&self) -> usize {
        self.vertex_tags.iter().filter(|t| t.is_interior()).count()
    }

    pub fn n_interior_edges(&self) -> usize {
        self.edge_tags.iter().filter(|t| t.is_interior()).count()
    }

    pub fn triangle_points(&self, k: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[k];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area, positive for counterclockwise triangles.
    pub fn signed_area(&self, k: usize) -> f64 {
        let [p, q, r] = self.triangle_points(k);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
    }

    pub fn area(&self, k: usize) -> f64 {
        self.signed_area(k).abs()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|k| self.signed_area(k)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        let (p, q) = (self.vertices[a], self.vertices[b]);
        (q[0] - p[0]).hypot(q[1] - p[1])
    }

    /// Unit tangent of edge `e`, pointing from its lower to its higher vertex.
    pub fn edge_tangent(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        let (p, q) = (self.vertices[a], self.vertices[b]);
        let l = self.edge_length(e);
        [(q[0] - p[0]) / l, (q[1] - p[1]) / l]
    }

    /// +1 if the global orientation of local edge `k` of triangle `t` agrees
    /// with the counterclockwise traversal of the triangle, -1 otherwise.
    pub fn edge_sign(&self, t: usize, k: usize) -> f64 {
        let tri = self.triangles[t];
        let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
        if i < j {
            1.0
        } else {
            -1.0
        }
    }

    /// Longest edge length.
    pub fn mesh_size(&self) -> f64 {
        (0..self.n_edges())
            .map(|e| self.edge_length(e))
            .fold(0.0, f64::max)
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for k in 0..self.n_triangles() {
            let p = self.triangle_points(k);
            for i in 0..3 {
                let a = p[i];
                let b = p[(i + 1) % 3];
                let c = p[(i + 2) % 3];
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                min = min.min(cos.clamp(-1.0, 1.0).acos());
            }
        }
        min
    }

    /// Triangles incident to each vertex.
    pub fn vertex_patches(&self) -> Vec<Vec<usize>> {
        let mut patches = vec![Vec::new(); self.n_vertices()];
        for (k, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                patches[v].push(k);
            }
        }
        patches
    }

    /// Ordered vertex cycles, one per boundary component, indexed by
    /// component. Each cycle follows the boundary with the domain on its
    /// left, so the outer cycle is counterclockwise and hole cycles are
    /// clockwise.
    pub fn boundary_components(&self) -> Result<Vec<Vec<usize>>> {
        let n_comp = self
            .edge_tags
            .iter()
            .filter_map(|t| t.component())
            .max()
            .map_or(0, |k| k + 1);
        // next[v] = successor of boundary vertex v along the traversal
        let mut next = vec![usize::MAX; self.n_vertices()];
        let mut indegree = vec![0usize; self.n_vertices()];
        for (e, tag) in self.edge_tags.iter().enumerate() {
            if tag.is_interior() {
                continue;
            }
            let (from, to) = self.directed_boundary_edge(e);
            if next[from] != usize::MAX {
                return Err(Error::NonManifoldBoundary(from));
            }
            next[from] = to;
            indegree[to] += 1;
        }
        if let Some(v) = indegree.iter().position(|&d| d > 1) {
            return Err(Error::NonManifoldBoundary(v));
        }

        let mut cycles = vec![Vec::new(); n_comp];
        let mut visited = vec![false; self.n_vertices()];
        for v in 0..self.n_vertices() {
            let Some(comp) = self.vertex_tags[v].component() else {
                continue;
            };
            if visited[v] {
                continue;
            }
            if !cycles[comp].is_empty() {
                // a second cycle within one component
                return Err(Error::NonManifoldBoundary(v));
            }
            let mut cur = v;
            loop {
                if next[cur] == usize::MAX {
                    return Err(Error::NonManifoldBoundary(cur));
                }
                visited[cur] = true;
                cycles[comp].push(cur);
                cur = next[cur];
                if cur == v {
                    break;
                }
                if visited[cur] {
                    return Err(Error::NonManifoldBoundary(cur));
                }
            }
        }
        Ok(cycles)
    }

    /// Boundary edge `e` oriented as it appears in its (single) triangle.
    fn directed_boundary_edge(&self, e: usize) -> (usize, usize) {
        let t = self.edge_triangles[e][0];
        let k = self.triangle_edges[t]
            .iter()
            .position(|&x| x == e)
            .expect("edge belongs to its triangle");
        let tri = self.triangles[t];
        (tri[(k + 1) % 3], tri[(k + 2) % 3])
    }

    /// Tag boundary entities by connected boundary component. The component
    /// with the largest bounding box is the outer boundary (0); the others
    /// are numbered by their lowest vertex index.
    fn assign_boundary_tags(&mut self) {
        let nv = self.n_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let boundary_edges: Vec<usize> = (0..self.n_edges())
            .filter(|&e| self.edge_triangles[e].len() == 1)
            .collect();
        let mut on_boundary = vec![false; nv];
        for &e in &boundary_edges {
            let [a, b] = self.edges[e];
            on_boundary[a] = true;
            on_boundary[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }

        // roots, with bounding boxes
        let mut roots: Vec<usize> = Vec::new();
        let mut bbox: Vec<[f64; 4]> = Vec::new();
        let mut root_slot = vec![usize::MAX; nv];
        for v in 0..nv {
            if !on_boundary[v] {
                continue;
            }
            let r = find(&mut parent, v);
            if root_slot[r] == usize::MAX {
                root_slot[r] = roots.len();
                roots.push(r);
                bbox.push([
                    f64::INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::NEG_INFINITY,
                ]);
            }
            let s = root_slot[r];
            let p = self.vertices[v];
            bbox[s][0] = bbox[s][0].min(p[0]);
            bbox[s][1] = bbox[s][1].min(p[1]);
            bbox[s][2] = bbox[s][2].max(p[0]);
            bbox[s][3] = bbox[s][3].max(p[1]);
        }
        let mut comp_of_slot = vec![0usize; roots.len()];
        if !roots.is_empty() {
            let extent = |b: &[f64; 4]| (b[2] - b[0]) * (b[3] - b[1]);
            let outer = (0..roots.len())
                .max_by(|&a, &b| {
                    extent(&bbox[a])
                        .total_cmp(&extent(&bbox[b]))
                        .then(b.cmp(&a))
                })
                .unwrap();
            // roots are in increasing lowest-vertex order already
            let mut next = 1;
            for s in 0..roots.len() {
                if s == outer {
                    comp_of_slot[s] = 0;
                } else {
                    comp_of_slot[s] = next;
                    next += 1;
                }
            }
        }
        for v in 0..nv {
            self.vertex_tags[v] = if on_boundary[v] {
                let r = find(&mut parent, v);
                BoundaryTag::Component(comp_of_slot[root_slot[r]])
            } else {
                BoundaryTag::Interior
            };
        }
        for e in 0..self.n_edges() {
            self.edge_tags[e] = if self.edge_triangles[e].len() == 1 {
                self.vertex_tags[self.edges[e][0]]
            } else {
                BoundaryTag::Interior
            };
        }
    }
}

/// Edges sorted lexicographically by `(low, high)` vertex index.
#[allow(clippy::type_complexity)]
fn build_edges(triangles: &[[usize; 3]]) -> (Vec<[usize; 2]>, Vec<[usize; 3]>, Vec<Vec<usize>>) {
    let mut half: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            half.push((i.min(j), i.max(j), t, k));
        }
    }
    half.sort_unstable();
    let mut edges = Vec::new();
    let mut edge_triangles: Vec<Vec<usize>> = Vec::new();
    let mut triangle_edges = vec![[usize::MAX; 3]; triangles.len()];
    for h in &half {
        if edges.last() != Some(&[h.0, h.1]) {
            edges.push([h.0, h.1]);
            edge_triangles.push(Vec::with_capacity(2));
        }
        let e = edges.len() - 1;
        edge_triangles[e].push(h.2);
        triangle_edges[h.2][h.3] = e;
    }
    (edges, triangle_edges, edge_triangles)
}
