use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::dofmap::{DofMap, SpaceKind};
use crate::forms::{assemble, FormTag};
use crate::mesh::Mesh;
use crate::sparse::{CsrMatrix, Triplets};
use crate::Result;

/// Edge coefficients of gradients of a P1-type space: for an interior edge
/// `a -> b` the coefficient of `grad z_j` is `z_j(b) - z_j(a)`.
pub fn gradient_matrix(p1: &DofMap, rt: &DofMap) -> CsrMatrix {
    let mesh = p1.mesh();
    let mut trip = Triplets::new(rt.n_dofs(), p1.n_dofs());
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let Some(row) = rt.edge_dof(e) else { continue };
        if let Some(j) = p1.vertex_dof(b) {
            trip.push(row, j, 1.0);
        }
        if let Some(j) = p1.vertex_dof(a) {
            trip.push(row, j, -1.0);
        }
    }
    trip.to_csr()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactSequenceReport {
    pub dim_rt: usize,
    pub dim_p1c: usize,
    pub dim_p0_meanzero: usize,
    pub rot_rank: usize,
    pub n_triangles: usize,
    /// Largest absolute entry of `rot(grad z)` over the P1C basis.
    pub grad_rot_residual: f64,
    pub violations: Vec<String>,
}

impl ExactSequenceReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ExactSequenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dim RT = {} = {} + {}; rank rot = {} (T-1 = {}); |rot grad| = {:.2e}",
            self.dim_rt,
            self.dim_p1c,
            self.dim_p0_meanzero,
            self.rot_rank,
            self.n_triangles.saturating_sub(1),
            self.grad_rot_residual
        )
    }
}

fn numerical_rank(m: &CsrMatrix) -> usize {
    let dense = m.to_dense();
    let mat = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| dense[i][j]);
    let sv = mat.singular_values().expect("singular values");
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-10 * max).count()
}

/// Verify the discrete sequence `P1C --grad--> RT --rot--> P0/R --> 0`.
pub fn check_exact_sequence(mesh: &Arc<Mesh>) -> Result<ExactSequenceReport> {
    let rt = DofMap::build(mesh.clone(), SpaceKind::RtRot);
    let pc = DofMap::build(mesh.clone(), SpaceKind::P1HoleConstant);
    let p0 = DofMap::build(mesh.clone(), SpaceKind::P0MeanZero);
    let t = mesh.n_triangles();
    let rot = assemble(&rt, &p0, FormTag::RtRotP0)?.transpose();
    let rank = numerical_rank(&rot);
    let grad = gradient_matrix(&pc, &rt);
    let residual = rot.matmul(&grad)?.max_abs();

    let mut violations = Vec::new();
    if rt.n_dofs() != pc.n_dofs() + t - 1 {
        violations.push(format!(
            "dim RT {} != dim P1C {} + (T-1) {}",
            rt.n_dofs(),
            pc.n_dofs(),
            t - 1
        ));
    }
    if rank != t - 1 {
        violations.push(format!("rank of rot is {rank}, expected {}", t - 1));
    }
    if residual > 1e-12 {
        violations.push(format!("rot grad residual {residual:e} > 1e-12"));
    }
    Ok(ExactSequenceReport {
        dim_rt: rt.n_dofs(),
        dim_p1c: pc.n_dofs(),
        dim_p0_meanzero: t - 1,
        rot_rank: rank,
        n_triangles: t,
        grad_rot_residual: residual,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_square_hole_mesh, refine_uniform, HoleBox};

    #[test]
    fn holed_square_dimensions() {
        let coarse =
            generate_square_hole_mesh(3.0, &[HoleBox::new(1.0, 1.0, 2.0, 2.0)], 1).unwrap();
        let r0 = check_exact_sequence(&Arc::new(coarse.clone())).unwrap();
        assert!(r0.is_ok(), "{:?}", r0.violations);
        assert_eq!((r0.dim_rt, r0.dim_p1c, r0.dim_p0_meanzero), (16, 1, 15));
        let r1 = check_exact_sequence(&Arc::new(refine_uniform(&coarse))).unwrap();
        assert!(r1.is_ok());
        assert_eq!((r1.dim_rt, r1.dim_p1c, r1.dim_p0_meanzero), (80, 17, 63));
    }

    #[test]
    fn holeless_identity() {
        let m = Arc::new(generate_square_hole_mesh(2.0, &[], 2).unwrap());
        let r = check_exact_sequence(&m).unwrap();
        assert!(r.is_ok());
        assert_eq!(r.dim_rt, m.n_interior_vertices() + m.n_triangles() - 1);
    }

    #[test]
    fn dropping_hole_tying_breaks_the_sequence() {
        // with plain zero boundary values the hole gradient is missing
        let m = Arc::new(
            generate_square_hole_mesh(3.0, &[HoleBox::new(1.0, 1.0, 2.0, 2.0)], 2).unwrap(),
        );
        let rt = DofMap::build(m.clone(), SpaceKind::RtRot);
        let p1 = DofMap::build(m.clone(), SpaceKind::P1Zero);
        assert_ne!(rt.n_dofs(), p1.n_dofs() + m.n_triangles() - 1);
    }
}
