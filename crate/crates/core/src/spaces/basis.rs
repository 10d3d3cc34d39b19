//! Local shape functions on a single triangle.
//!
//! All edge-based functions here use the counterclockwise orientation of
//! the triangle; [`super::DofMap`] supplies the sign that converts them to
//! the global edge orientation. Local edge `k` is opposite local vertex `k`
//! and runs from vertex `k+1` to vertex `k+2`.

use crate::forms::material::Tensor2;
use crate::mesh::{Mesh, Point};

/// Value and gradient of a (scalar or vector) shape function. Scalars use
/// `value[0]` and `grad[0]`; for vectors `grad[c][d]` is `d v_c / d x_d`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BasisEval {
    pub value: [f64; 2],
    pub grad: Tensor2,
}

impl BasisEval {
    pub fn rot(&self) -> f64 {
        self.grad[1][0] - self.grad[0][1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub points: [Point; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grad_bary: [[f64; 2]; 3],
    pub edge_length: [f64; 3],
    /// Counterclockwise unit tangents of the local edges.
    pub edge_tangent: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, t: usize) -> Self {
        Self::from_points(mesh.triangle_points(t))
    }

    pub fn from_points(p: [Point; 3]) -> Self {
        let twice =
            (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let mut grad_bary = [[0.0; 2]; 3];
        let mut edge_length = [0.0; 3];
        let mut edge_tangent = [[0.0; 2]; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            grad_bary[i] = [(p[j][1] - p[k][1]) / twice, (p[k][0] - p[j][0]) / twice];
            let d = [p[k][0] - p[j][0], p[k][1] - p[j][1]];
            let l = d[0].hypot(d[1]);
            edge_length[i] = l;
            edge_tangent[i] = [d[0] / l, d[1] / l];
        }
        Self {
            points: p,
            area: 0.5 * twice,
            grad_bary,
            edge_length,
            edge_tangent,
        }
    }

    pub fn point(&self, bary: &[f64; 3]) -> Point {
        let p = &self.points;
        [
            bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
            bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
        ]
    }

    /// Barycentric coordinates of a point (not necessarily inside).
    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        let mut b = [0.0; 3];
        for (i, bi) in b.iter_mut().enumerate() {
            let j = (i + 1) % 3;
            let g = self.grad_bary[i];
            *bi = g[0] * (x[0] - self.points[j][0]) + g[1] * (x[1] - self.points[j][1]);
        }
        b
    }
}

/// Linear Lagrange functions at the three vertices.
pub fn p1(geom: &ElementGeometry, bary: &[f64; 3]) -> [BasisEval; 3] {
    let mut out = [BasisEval::default(); 3];
    for i in 0..3 {
        out[i].value[0] = bary[i];
        out[i].grad[0] = geom.grad_bary[i];
    }
    out
}

/// Vertex-linear vector functions (`2i + c` is vertex `i`, component `c`)
/// followed by the three tangential edge bubbles `(6 / |e|) l_i l_j t_e`,
/// normalised so that their tangential integral over their own edge is 1.
pub fn bernardi_raugel(geom: &ElementGeometry, bary: &[f64; 3]) -> [BasisEval; 9] {
    let mut out = [BasisEval::default(); 9];
    for i in 0..3 {
        for c in 0..2 {
            let f = &mut out[2 * i + c];
            f.value[c] = bary[i];
            f.grad[c] = geom.grad_bary[i];
        }
    }
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let s = 6.0 / geom.edge_length[k];
        let t = geom.edge_tangent[k];
        let b = s * bary[i] * bary[j];
        let gb = [
            s * (bary[i] * geom.grad_bary[j][0] + bary[j] * geom.grad_bary[i][0]),
            s * (bary[i] * geom.grad_bary[j][1] + bary[j] * geom.grad_bary[i][1]),
        ];
        let f = &mut out[6 + k];
        f.value = [b * t[0], b * t[1]];
        f.grad = [[t[0] * gb[0], t[0] * gb[1]], [t[1] * gb[0], t[1] * gb[1]]];
    }
    out
}

/// Lowest-order edge functions `l_i grad l_j - l_j grad l_i` with unit
/// tangential integral on their own edge. Their gradient is constant and
/// `rot = 1 / |K|`.
pub fn raviart_thomas(geom: &ElementGeometry, bary: &[f64; 3]) -> [BasisEval; 3] {
    let mut out = [BasisEval::default(); 3];
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let (gi, gj) = (geom.grad_bary[i], geom.grad_bary[j]);
        let f = &mut out[k];
        f.value = [
            bary[i] * gj[0] - bary[j] * gi[0],
            bary[i] * gj[1] - bary[j] * gi[1],
        ];
        for c in 0..2 {
            for d in 0..2 {
                f.grad[c][d] = gi[d] * gj[c] - gj[d] * gi[c];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::quadrature::gauss_legendre;

    fn geom() -> ElementGeometry {
        ElementGeometry::from_points([[0.2, 0.1], [1.3, 0.4], [0.5, 1.2]])
    }

    fn edge_point(k: usize, s: f64) -> [f64; 3] {
        let mut b = [0.0; 3];
        b[(k + 1) % 3] = 1.0 - s;
        b[(k + 2) % 3] = s;
        b
    }

    fn tangential_integral(
        g: &ElementGeometry,
        k: usize,
        f: impl Fn(&[f64; 3]) -> [f64; 2],
    ) -> f64 {
        let (x, w) = gauss_legendre(4);
        let t = g.edge_tangent[k];
        x.iter()
            .zip(&w)
            .map(|(s, w)| {
                let v = f(&edge_point(k, *s));
                w * (v[0] * t[0] + v[1] * t[1])
            })
            .sum::<f64>()
            * g.edge_length[k]
    }

    #[test]
    fn barycentric_round_trip() {
        let g = geom();
        let b = [0.2, 0.5, 0.3];
        let back = g.barycentric(g.point(&b));
        for i in 0..3 {
            assert!((back[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn edge_functions_are_dual_to_edge_integrals() {
        let g = geom();
        for k in 0..3 {
            for l in 0..3 {
                let rt = tangential_integral(&g, l, |b| raviart_thomas(&g, b)[k].value);
                let br = tangential_integral(&g, l, |b| bernardi_raugel(&g, b)[6 + k].value);
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((rt - want).abs() < 1e-13, "rt {k} on edge {l}: {rt}");
                assert!((br - want).abs() < 1e-13, "bubble {k} on edge {l}: {br}");
            }
        }
    }

    #[test]
    fn raviart_thomas_rot_is_inverse_area() {
        let g = geom();
        for f in raviart_thomas(&g, &[0.3, 0.3, 0.4]) {
            assert!((f.rot() - 1.0 / g.area).abs() < 1e-12);
        }
    }

    #[test]
    fn bubble_gradient_matches_finite_difference() {
        let g = geom();
        let b0 = [0.25, 0.35, 0.4];
        let x0 = g.point(&b0);
        let h = 1e-6;
        for f in 0..9 {
            let exact = bernardi_raugel(&g, &b0)[f].grad;
            for d in 0..2 {
                let mut xp = x0;
                let mut xm = x0;
                xp[d] += h;
                xm[d] -= h;
                let vp = bernardi_raugel(&g, &g.barycentric(xp))[f].value;
                let vm = bernardi_raugel(&g, &g.barycentric(xm))[f].value;
                for c in 0..2 {
                    let fd = (vp[c] - vm[c]) / (2.0 * h);
                    assert!((fd - exact[c][d]).abs() < 1e-6);
                }
            }
        }
    }
}
