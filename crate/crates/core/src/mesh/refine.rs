use super::Mesh;

/// Red refinement: every triangle is split into four congruent children by
/// joining its edge midpoints.
///
/// New vertex `V + e` is the midpoint of edge `e`. The children of triangle
/// `k` are `4k..4k+4`, in the order: corner at local vertex 0, 1, 2, then the
/// middle triangle. Callers rely on `child / 4` being the parent index.
pub fn refine_uniform(m: &Mesh) -> Mesh {
    let nv = m.n_vertices();
    let mut vertices = m.vertices().to_vec();
    vertices.reserve(m.n_edges());
    for &[a, b] in m.edges() {
        let (p, q) = (m.vertices()[a], m.vertices()[b]);
        vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
    }
    let mut triangles = Vec::with_capacity(4 * m.n_triangles());
    for (tri, te) in m.triangles().iter().zip(m.triangle_edges()) {
        let [a, b, c] = *tri;
        let (m0, m1, m2) = (nv + te[0], nv + te[1], nv + te[2]);
        triangles.push([a, m2, m1]);
        triangles.push([m2, b, m0]);
        triangles.push([m1, m0, c]);
        triangles.push([m0, m1, m2]);
    }
    Mesh::from_parts(vertices, triangles, m.n_holes())
}
