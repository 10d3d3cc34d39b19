//! Clement, Fortin and edge-element interpolation.
//!
//! Inputs are closures evaluated pointwise. Boundary degrees of freedom are
//! dropped (set to zero), so the inputs are expected to vanish on the
//! boundary for the commuting identities to hold there.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use rayon::prelude::*;

use super::basis::ElementGeometry;
use super::dofmap::{DofMap, SpaceKind};
use super::field::FieldFunction;
use crate::forms::quadrature::{gauss_legendre, quadrature};
use crate::mesh::{Mesh, Point};
use crate::sparse::{CsrMatrix, Triplets};
use crate::{Error, Result};

const PATCH_DEGREE: usize = 8;
const EDGE_POINTS: usize = 10;

fn require(d: &DofMap, kind: SpaceKind) -> Result<()> {
    if d.kind() != kind {
        return Err(Error::DimensionMismatch(format!(
            "expected {kind}, got {}",
            d.kind()
        )));
    }
    Ok(())
}

/// Tangential integral of `v` along edge `e` in its global orientation.
pub fn edge_tangential_integral<F: Fn(Point) -> [f64; 2]>(mesh: &Mesh, e: usize, v: &F) -> f64 {
    let [a, b] = mesh.edges()[e];
    let (p, q) = (mesh.vertices()[a], mesh.vertices()[b]);
    let d = [q[0] - p[0], q[1] - p[1]];
    let (s, w) = gauss_legendre(EDGE_POINTS);
    s.iter()
        .zip(&w)
        .map(|(&s, &w)| {
            let val = v([p[0] + s * d[0], p[1] + s * d[1]]);
            w * (val[0] * d[0] + val[1] * d[1])
        })
        .sum()
}

/// Vertex values of the Clement interpolant: the L2 projection of `v` onto
/// linear polynomials over the vertex patch, evaluated at the vertex.
fn clement_vertex_values<F>(mesh: &Mesh, v: &F) -> Vec<[f64; 2]>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    let rule = quadrature(PATCH_DEGREE).expect("patch rule");
    let patches = mesh.vertex_patches();
    (0..mesh.n_vertices())
        .into_par_iter()
        .map(|vx| {
            if !mesh.vertex_tags()[vx].is_interior() {
                return [0.0; 2];
            }
            let c = mesh.vertices()[vx];
            // basis 1, x - c_x, y - c_y
            let mut gram = faer::Mat::<f64>::zeros(3, 3);
            let mut rhs = faer::Mat::<f64>::zeros(3, 2);
            for &t in &patches[vx] {
                let g = ElementGeometry::new(mesh, t);
                for (b, w) in rule.points.iter().zip(&rule.weights) {
                    let x = g.point(b);
                    let phi = [1.0, x[0] - c[0], x[1] - c[1]];
                    let val = v(x);
                    let wk = w * g.area;
                    for i in 0..3 {
                        for j in 0..3 {
                            gram[(i, j)] += wk * phi[i] * phi[j];
                        }
                        rhs[(i, 0)] += wk * phi[i] * val[0];
                        rhs[(i, 1)] += wk * phi[i] * val[1];
                    }
                }
            }
            let sol = gram.partial_piv_lu().solve(&rhs);
            [sol[(0, 0)], sol[(0, 1)]]
        })
        .collect()
}

/// Clement interpolant into the vertex part of the rotated Bernardi-Raugel
/// space (bubble coefficients zero).
pub fn interpolate_clement<F>(br: &Arc<DofMap>, v: F) -> Result<FieldFunction>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    require(br, SpaceKind::BrVec)?;
    let mesh = br.mesh();
    let vals = clement_vertex_values(mesh, &v);
    let mut c = vec![0.0; br.n_dofs()];
    for (vx, val) in vals.iter().enumerate() {
        if let Some(g) = br.vertex_dof(vx) {
            c[g] = val[0];
            c[g + 1] = val[1];
        }
    }
    FieldFunction::new(br.clone(), c)
}

/// Fortin interpolant: Clement vertex values plus edge bubbles that restore
/// every tangential edge integral.
pub fn interpolate_fortin<F>(br: &Arc<DofMap>, v: F) -> Result<FieldFunction>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    let clement = interpolate_clement(br, &v)?;
    let mesh = br.mesh();
    let mut c = clement.into_coefficients();
    let vertex_value = |vx: usize, c: &[f64]| match br.vertex_dof(vx) {
        Some(g) => [c[g], c[g + 1]],
        None => [0.0; 2],
    };
    let corrections: Vec<(usize, f64)> = (0..mesh.n_edges())
        .into_par_iter()
        .filter_map(|e| br.edge_dof(e).map(|g| (e, g)))
        .map(|(e, g)| {
            let [a, b] = mesh.edges()[e];
            let t = mesh.edge_tangent(e);
            let (va, vb) = (vertex_value(a, &c), vertex_value(b, &c));
            let linear =
                0.5 * mesh.edge_length(e) * ((va[0] + vb[0]) * t[0] + (va[1] + vb[1]) * t[1]);
            (g, edge_tangential_integral(mesh, e, &v) - linear)
        })
        .collect();
    for (g, val) in corrections {
        c[g] = val;
    }
    FieldFunction::new(br.clone(), c)
}

/// Edge-element interpolant: every interior edge coefficient is the
/// tangential integral of `v` in the global orientation.
pub fn interpolate_rt<F>(rt: &Arc<DofMap>, v: F) -> Result<FieldFunction>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    require(rt, SpaceKind::RtRot)?;
    let mesh = rt.mesh();
    let mut c = vec![0.0; rt.n_dofs()];
    let vals: Vec<(usize, f64)> = (0..mesh.n_edges())
        .into_par_iter()
        .filter_map(|e| {
            rt.edge_dof(e)
                .map(|g| (g, edge_tangential_integral(mesh, e, &v)))
        })
        .collect();
    for (g, val) in vals {
        c[g] = val;
    }
    FieldFunction::new(rt.clone(), c)
}

/// Global matrix of the edge-element interpolant restricted to the rotated
/// Bernardi-Raugel space (rows: edge DOFs, columns: BR DOFs). It is exact:
/// vertex functions contribute half the edge length times the tangent
/// component, bubbles contribute 1 on their own edge.
pub fn rt_interpolation_matrix(br: &DofMap, rt: &DofMap) -> Result<CsrMatrix> {
    require(br, SpaceKind::BrVec)?;
    require(rt, SpaceKind::RtRot)?;
    let mesh = br.mesh();
    let mut trip = Triplets::new(rt.n_dofs(), br.n_dofs());
    for e in 0..mesh.n_edges() {
        let Some(row) = rt.edge_dof(e) else { continue };
        let t = mesh.edge_tangent(e);
        let half = 0.5 * mesh.edge_length(e);
        for &vx in &mesh.edges()[e] {
            if let Some(g) = br.vertex_dof(vx) {
                trip.push(row, g, half * t[0]);
                trip.push(row, g + 1, half * t[1]);
            }
        }
        if let Some(g) = br.edge_dof(e) {
            trip.push(row, g, 1.0);
        }
    }
    Ok(trip.to_csr())
}
