use std::sync::Arc;

use super::field::*;
use super::{Block, BlockSystem, FieldLayout, PlateProblem, SchemeKind};
use crate::forms::local::local_rt_interpolation;
use crate::forms::{
    assemble, assemble_elasticity, assemble_load_scalar, assemble_load_vector, assemble_local,
    local_coupling, quadrature, FormTag, DEFAULT_DEGREE,
};
use crate::mesh::Mesh;
use crate::spaces::{gradient_matrix, rt_interpolation_matrix, DofMap, SpaceKind, SpaceSet};
use crate::sparse::{CsrMatrix, Triplets};
use crate::{Error, Result};

struct Builder {
    layout: Vec<FieldLayout>,
    blocks: Vec<Block>,
}

impl Builder {
    fn new(kind: SchemeKind, spaces: &SpaceSet) -> Self {
        let mut offset = 0;
        let layout = kind
            .fields()
            .into_iter()
            .map(|(name, space)| {
                let len = match space {
                    Some(k) => space_of(spaces, name, k).n_dofs(),
                    None => 1,
                };
                let f = FieldLayout {
                    name,
                    space,
                    offset,
                    len,
                };
                offset += len;
                f
            })
            .collect();
        Self {
            layout,
            blocks: Vec::new(),
        }
    }

    fn field(&self, name: &str) -> &FieldLayout {
        self.layout
            .iter()
            .find(|f| f.name == name)
            .expect("field in layout")
    }

    fn push(&mut self, row: &'static str, col: &'static str, matrix: CsrMatrix) -> Result<()> {
        let (r, c) = (self.field(row), self.field(col));
        if matrix.nrows() != r.len || matrix.ncols() != c.len {
            return Err(Error::DimensionMismatch(format!(
                "block ({row},{col}) is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                r.len,
                c.len
            )));
        }
        self.blocks.push(Block { row, col, matrix });
        Ok(())
    }

    fn matrix(&self) -> CsrMatrix {
        let n: usize = self.layout.iter().map(|f| f.len).sum();
        let mut trip = Triplets::new(n, n);
        for b in &self.blocks {
            let (r, c) = (self.field(b.row).offset, self.field(b.col).offset);
            trip.push_block(r, c, &b.matrix, 1.0);
            if b.row != b.col {
                trip.push_block(c, r, &b.matrix.transpose(), 1.0);
            }
        }
        trip.to_csr()
    }
}

fn space_of<'a>(spaces: &'a SpaceSet, name: &str, kind: SpaceKind) -> &'a Arc<DofMap> {
    match kind {
        SpaceKind::BrVec => &spaces.br,
        SpaceKind::RtRot => &spaces.rt,
        SpaceKind::P1Zero => &spaces.p1_zero,
        SpaceKind::P1HoleConstant => &spaces.p1_hole,
        SpaceKind::P0MeanZero => &spaces.p0,
        SpaceKind::P1 => unreachable!("field {name} has no unconstrained space"),
    }
}

/// `(q, 1)` for every piecewise constant: the column of the mean multiplier.
fn mean_column(mesh: &Mesh, p0: &DofMap) -> CsrMatrix {
    let mut trip = Triplets::new(p0.n_dofs(), 1);
    for t in 0..mesh.n_triangles() {
        if let Some(g) = p0.cell(t)[0].global {
            trip.push(g, 0, mesh.area(t));
        }
    }
    trip.to_csr()
}

/// `(Pi psi, grad z)` with the edge interpolant applied element by element.
fn reduced_gradient_coupling(spaces: &SpaceSet) -> Result<CsrMatrix> {
    let rule = quadrature(DEFAULT_DEGREE)?;
    assemble_local(&spaces.br, &spaces.p1_hole, |_, g| {
        let c = local_coupling(
            g,
            SpaceKind::RtRot,
            SpaceKind::P1HoleConstant,
            FormTag::VecDotGrad,
            &rule,
        )?;
        Ok(local_rt_interpolation(g).tr_mul(&c))
    })
}

/// Assemble the block system of `kind` on `mesh`. The thickness is taken
/// from the problem's material; Kirchhoff kinds ignore it.
pub fn assemble_scheme(
    mesh: &Arc<Mesh>,
    problem: &PlateProblem,
    kind: SchemeKind,
) -> Result<BlockSystem> {
    let t = problem.thickness();
    if kind.is_rm() && !(t > 0.0) {
        return Err(Error::NonPositiveThickness(t));
    }
    if mesh.n_interior_vertices() == 0 {
        return Err(Error::InsufficientResolution);
    }
    let spaces = SpaceSet::new(mesh.clone());
    let mut b = Builder::new(kind, &spaces);
    let t2 = t * t;

    let a = assemble_elasticity(&spaces.br, &problem.material)?;
    let f = assemble_load_vector(&spaces.br, |x| (problem.load_f)(x), problem.load_degree)?;
    let g = assemble_load_scalar(
        &spaces.p1_zero,
        |x| (problem.load_g)(x),
        problem.load_degree,
    )?;

    match kind {
        SchemeKind::RmPrimal => {
            let p = rt_interpolation_matrix(&spaces.br, &spaces.rt)?;
            let grad = gradient_matrix(&spaces.p1_zero, &spaces.rt);
            let m = assemble(&spaces.rt, &spaces.rt, FormTag::RtMass)?;
            let s = 1.0 / t2;
            let mp = m.matmul(&p)?;
            let mg = m.matmul(&grad)?;
            b.push(PHI, PHI, a.add(&p.transpose().matmul(&mp)?, s)?)?;
            b.push(PHI, OMEGA, p.transpose().matmul(&mg)?.scale(-s))?;
            b.push(OMEGA, OMEGA, grad.transpose().matmul(&mg)?.scale(s))?;
        }
        SchemeKind::BfsCheck => {
            let c = assemble(&spaces.br, &spaces.p1_hole, FormTag::VecDotGrad)?;
            let d = assemble(&spaces.br, &spaces.p0, FormTag::RotTimesP0)?;
            let m = assemble(&spaces.rt, &spaces.rt, FormTag::RtMass)?;
            let r = assemble(&spaces.rt, &spaces.p0, FormTag::RtRotP0)?;
            let kcc = assemble(&spaces.p1_hole, &spaces.p1_hole, FormTag::GradGrad)?;
            let k0c = assemble(&spaces.p1_zero, &spaces.p1_hole, FormTag::GradGrad)?;
            b.push(PHI, PHI, a)?;
            b.push(PHI, Y, c.scale(-1.0))?;
            b.push(PHI, P, d.scale(-1.0))?;
            b.push(ALPHA, ALPHA, m.scale(t2))?;
            b.push(ALPHA, P, r.scale(-t2))?;
            b.push(Y, Y, kcc.scale(-t2))?;
            b.push(OMEGA, Y, k0c)?;
            b.push(P, MEAN, mean_column(mesh, &spaces.p0))?;
        }
        _ => {
            let c = if kind.is_reduced() {
                reduced_gradient_coupling(&spaces)?
            } else {
                assemble(&spaces.br, &spaces.p1_hole, FormTag::VecDotGrad)?
            };
            b.push(PHI, PHI, a)?;
            b.push(PHI, Y, c)?;
            b.push(
                PHI,
                P,
                assemble(&spaces.br, &spaces.p0, FormTag::RotTimesP0)?,
            )?;
            if kind.is_rm() {
                b.push(
                    ZETA,
                    ZETA,
                    assemble(&spaces.rt, &spaces.rt, FormTag::RtMass)?.scale(t2),
                )?;
                b.push(
                    ZETA,
                    Y,
                    assemble(&spaces.rt, &spaces.p1_hole, FormTag::VecDotGrad)?.scale(t2),
                )?;
                b.push(
                    ZETA,
                    P,
                    assemble(&spaces.rt, &spaces.p0, FormTag::RtRotP0)?.scale(t2),
                )?;
            }
            b.push(
                OMEGA,
                Y,
                assemble(&spaces.p1_zero, &spaces.p1_hole, FormTag::GradGrad)?.scale(-1.0),
            )?;
            b.push(P, MEAN, mean_column(mesh, &spaces.p0))?;
        }
    }

    let matrix = b.matrix();
    let mut rhs = vec![0.0; matrix.nrows()];
    let (po, oo) = (b.field(PHI).offset, b.field(OMEGA).offset);
    rhs[po..po + f.len()].copy_from_slice(&f);
    rhs[oo..oo + g.len()].copy_from_slice(&g);

    Ok(BlockSystem {
        kind,
        thickness: if kind.is_kirchhoff() { 0.0 } else { t },
        spaces,
        layout: b.layout,
        blocks: b.blocks,
        matrix,
        rhs,
        symmetric: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::PlateMaterial;
    use crate::mesh::{generate_square_hole_mesh, refine_uniform, HoleBox};

    pub(crate) fn canonical(level: usize) -> Arc<Mesh> {
        let mut m = generate_square_hole_mesh(3.0, &[HoleBox::new(1.0, 1.0, 2.0, 2.0)], 1).unwrap();
        for _ in 0..level {
            m = refine_uniform(&m);
        }
        Arc::new(m)
    }

    fn problem(t: f64) -> PlateProblem {
        let mut p = PlateProblem::new(
            PlateMaterial::default().with_thickness(t),
            Arc::new(|x| [x[0].sin(), x[1] * x[0]]),
            Arc::new(|x| 1.0 + x[0]),
        );
        p.load_degree = 6;
        p
    }

    #[test]
    fn every_kind_is_symmetric() {
        let mesh = canonical(1);
        for kind in SchemeKind::ALL {
            let sys = assemble_scheme(&mesh, &problem(0.3), kind).unwrap();
            let scale = sys.matrix.max_abs();
            assert!(
                sys.matrix.asymmetry() <= 1e-13 * scale,
                "{kind}: {}",
                sys.matrix.asymmetry()
            );
        }
    }

    #[test]
    fn rm_mixed_unknown_count() {
        let mesh = canonical(2);
        let sys = assemble_scheme(&mesh, &problem(1.0), SchemeKind::RmMixed).unwrap();
        let (vi, ei, t, j) = (
            mesh.n_interior_vertices(),
            mesh.n_interior_edges(),
            mesh.n_triangles(),
            mesh.n_holes(),
        );
        assert_eq!(sys.n_unknowns(), 2 * vi + ei + ei + vi + vi + j + t + 1);
    }

    #[test]
    fn kirchhoff_is_rm_without_shear() {
        let mesh = canonical(1);
        for (rm, k) in [
            (SchemeKind::RmMixed, SchemeKind::KMixed),
            (SchemeKind::RmMixedReduced, SchemeKind::KMixedReduced),
        ] {
            let a = assemble_scheme(&mesh, &problem(0.5), rm).unwrap();
            let b = assemble_scheme(&mesh, &problem(0.5), k).unwrap();
            let keep: Vec<usize> = a
                .layout
                .iter()
                .filter(|f| f.name != ZETA)
                .flat_map(|f| f.offset..f.offset + f.len)
                .collect();
            let sub = a.matrix.submatrix(&keep, &keep);
            assert_eq!(sub.nrows(), b.matrix.nrows());
            let diff = sub.add(&b.matrix, -1.0).unwrap().max_abs();
            assert!(diff < 1e-14, "{rm} vs {k}: {diff}");
            let rhs: Vec<f64> = keep.iter().map(|&i| a.rhs[i]).collect();
            assert_eq!(rhs, b.rhs);
        }
    }

    #[test]
    fn reduced_coupling_equals_interpolated_product() {
        // (Pi psi, grad z) = P^T (RT x P1C coupling)
        let mesh = canonical(1);
        let s = SpaceSet::new(mesh);
        let local = reduced_gradient_coupling(&s).unwrap();
        let p = rt_interpolation_matrix(&s.br, &s.rt).unwrap();
        let c = assemble(&s.rt, &s.p1_hole, FormTag::VecDotGrad).unwrap();
        // no BR function has a tangential moment on a boundary edge, so the
        // constrained global product loses nothing
        let global = p.transpose().matmul(&c).unwrap();
        let diff = local.add(&global, -1.0).unwrap().max_abs();
        assert!(diff < 1e-13, "{diff}");
    }

    #[test]
    fn thickness_and_resolution_errors() {
        let mesh = canonical(1);
        assert!(matches!(
            assemble_scheme(&mesh, &problem(0.0), SchemeKind::RmMixed),
            Err(Error::NonPositiveThickness(_))
        ));
        assert!(assemble_scheme(&mesh, &problem(0.0), SchemeKind::KMixed).is_ok());
        let coarse = canonical(0);
        assert!(matches!(
            assemble_scheme(&coarse, &problem(1.0), SchemeKind::KMixed),
            Err(Error::InsufficientResolution)
        ));
    }
}
