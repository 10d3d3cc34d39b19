use rayon::prelude::*;

use super::local::{local_coupling, local_elasticity, FormTag, LocalMatrix, DEFAULT_DEGREE};
use super::material::PlateMaterial;
use super::quadrature::quadrature;
use crate::mesh::Point;
use crate::spaces::basis::ElementGeometry;
use crate::spaces::field::local_basis;
use crate::spaces::DofMap;
use crate::sparse::{CsrMatrix, Triplets};
use crate::{Error, Result};

fn check_same_mesh(a: &DofMap, b: &DofMap) -> Result<()> {
    if !std::sync::Arc::ptr_eq(a.mesh(), b.mesh())
        && a.mesh().n_triangles() != b.mesh().n_triangles()
    {
        return Err(Error::DimensionMismatch(format!(
            "{} and {} live on different meshes",
            a.kind(),
            b.kind()
        )));
    }
    Ok(())
}

/// Scatter element matrices into a global matrix, applying orientation
/// signs and dropping constrained functions. Element matrices are computed
/// in parallel and scattered in triangle order, so the result does not
/// depend on the thread count.
pub fn assemble_local<F>(rows: &DofMap, cols: &DofMap, local: F) -> Result<CsrMatrix>
where
    F: Fn(usize, &ElementGeometry) -> Result<LocalMatrix> + Sync,
{
    check_same_mesh(rows, cols)?;
    let mesh = rows.mesh();
    let locals: Vec<LocalMatrix> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| local(t, &ElementGeometry::new(mesh, t)))
        .collect::<Result<_>>()?;
    let mut trip = Triplets::new(rows.n_dofs(), cols.n_dofs());
    for (t, m) in locals.iter().enumerate() {
        if m.rows != rows.n_local() || m.cols != cols.n_local() {
            return Err(Error::DimensionMismatch(format!(
                "element matrix {}x{} for {}x{}",
                m.rows,
                m.cols,
                rows.kind(),
                cols.kind()
            )));
        }
        let (rd, cd) = (rows.cell(t), cols.cell(t));
        for (i, r) in rd.iter().enumerate() {
            let Some(gi) = r.global else { continue };
            for (j, c) in cd.iter().enumerate() {
                let Some(gj) = c.global else { continue };
                trip.push(gi, gj, r.sign * c.sign * m.get(i, j));
            }
        }
    }
    Ok(trip.to_csr())
}

/// Global matrix of a coupling form.
pub fn assemble(rows: &DofMap, cols: &DofMap, form: FormTag) -> Result<CsrMatrix> {
    let rule = quadrature(DEFAULT_DEGREE)?;
    let (rk, ck) = (rows.kind(), cols.kind());
    if !form.accepts(rk, ck) {
        return Err(Error::IncompatibleForm {
            form: form.to_string(),
            row: rk.to_string(),
            col: ck.to_string(),
        });
    }
    assemble_local(rows, cols, |_, g| local_coupling(g, rk, ck, form, &rule))
}

pub fn assemble_elasticity(br: &DofMap, mat: &PlateMaterial) -> Result<CsrMatrix> {
    if br.kind() != crate::spaces::SpaceKind::BrVec {
        return Err(Error::IncompatibleForm {
            form: "elasticity".into(),
            row: br.kind().to_string(),
            col: br.kind().to_string(),
        });
    }
    let rule = quadrature(DEFAULT_DEGREE)?;
    assemble_local(br, br, |_, g| local_elasticity(g, mat, &rule))
}

fn assemble_load<F>(space: &DofMap, degree: usize, integrand: F) -> Result<Vec<f64>>
where
    F: Fn(Point, &crate::spaces::basis::BasisEval) -> f64 + Sync,
{
    let rule = quadrature(degree)?;
    let mesh = space.mesh();
    let kind = space.kind();
    let locals: Vec<Vec<f64>> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let g = ElementGeometry::new(mesh, t);
            let mut out = vec![0.0; kind.n_local()];
            for (b, w) in rule.points.iter().zip(&rule.weights) {
                let x = g.point(b);
                for (o, s) in out.iter_mut().zip(local_basis(kind, &g, b)) {
                    *o += w * g.area * integrand(x, &s);
                }
            }
            out
        })
        .collect();
    let mut rhs = vec![0.0; space.n_dofs()];
    for (t, loc) in locals.iter().enumerate() {
        for (d, v) in space.cell(t).iter().zip(loc) {
            if let Some(g) = d.global {
                rhs[g] += d.sign * v;
            }
        }
    }
    Ok(rhs)
}

/// `<f, psi>` for a vector load against a vector space.
pub fn assemble_load_vector<F>(space: &DofMap, f: F, degree: usize) -> Result<Vec<f64>>
where
    F: Fn(Point) -> [f64; 2] + Sync,
{
    if !space.kind().is_vector() {
        return Err(Error::IncompatibleForm {
            form: "vector load".into(),
            row: space.kind().to_string(),
            col: "-".into(),
        });
    }
    assemble_load(space, degree, |x, s| {
        let v = f(x);
        v[0] * s.value[0] + v[1] * s.value[1]
    })
}

/// `<g, mu>` for a scalar load against a scalar space.
pub fn assemble_load_scalar<F>(space: &DofMap, g: F, degree: usize) -> Result<Vec<f64>>
where
    F: Fn(Point) -> f64 + Sync,
{
    if space.kind().is_vector() {
        return Err(Error::IncompatibleForm {
            form: "scalar load".into(),
            row: space.kind().to_string(),
            col: "-".into(),
        });
    }
    assemble_load(space, degree, |x, s| g(x) * s.value[0])
}
