use std::sync::Arc;

use serde::Serialize;

use super::{assemble_scheme, solve_scheme, PlateProblem, SchemeKind};
use crate::mesh::Mesh;
use crate::spaces::{gradient_matrix, FieldFunction};
use crate::{Error, Result};

/// Gaps between the mixed solution and the alternative-multiplier
/// solution on the same mesh. `relative` divides each absolute gap by the
/// norm of the corresponding mixed quantity.
#[derive(Debug, Clone, Serialize)]
pub struct BfsReport {
    pub t: f64,
    pub h: f64,
    /// `|phi - phi_B|_1`, `|omega - omega_B|_1`, `|y + y_B|_1`,
    /// `|p + p_B|_0`, `|alpha_B - (grad y + zeta)|_0`.
    pub absolute: [f64; 5],
    pub relative: [f64; 5],
}

impl BfsReport {
    pub const NAMES: [&'static str; 5] = ["phi", "omega", "y", "p", "alpha"];
}

fn gap(a: &FieldFunction, b: &FieldFunction, sign: f64, h1: bool) -> Result<(f64, f64)> {
    let d = a.axpby(1.0, b, sign)?;
    let norm = |f: &FieldFunction| if h1 { f.h1_norm() } else { f.l2_norm() };
    let (abs, base) = (norm(&d), norm(a));
    Ok((abs, if base > 0.0 { abs / base } else { abs }))
}

pub fn bfs_cross_check(mesh: &Arc<Mesh>, problem: &PlateProblem) -> Result<BfsReport> {
    let t = problem.thickness();
    if !(t > 0.0) {
        return Err(Error::NonPositiveThickness(t));
    }
    let rm = solve_scheme(&assemble_scheme(mesh, problem, SchemeKind::RmMixed)?)?;
    let bfs = solve_scheme(&assemble_scheme(mesh, problem, SchemeKind::BfsCheck)?)?;
    let (y, yb) = (rm.y.as_ref().unwrap(), bfs.y.as_ref().unwrap());
    let zeta = rm.zeta.as_ref().unwrap();
    let alpha = bfs.alpha.as_ref().unwrap();

    let grad = gradient_matrix(y.dofmap(), zeta.dofmap()).mul_vec(y.coefficients());
    let predicted: Vec<f64> = grad
        .iter()
        .zip(zeta.coefficients())
        .map(|(a, b)| a + b)
        .collect();
    let predicted = FieldFunction::new(zeta.dofmap().clone(), predicted)?;

    let all = [
        gap(&rm.phi, &bfs.phi, -1.0, true)?,
        gap(&rm.omega, &bfs.omega, -1.0, true)?,
        gap(y, yb, 1.0, true)?,
        gap(rm.p.as_ref().unwrap(), bfs.p.as_ref().unwrap(), 1.0, false)?,
        gap(&predicted, alpha, -1.0, false)?,
    ];
    Ok(BfsReport {
        t,
        h: mesh.mesh_size(),
        absolute: all.map(|g| g.0),
        relative: all.map(|g| g.1),
    })
}
