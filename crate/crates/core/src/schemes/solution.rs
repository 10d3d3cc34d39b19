use std::sync::Arc;

use super::field::*;
use super::{BlockSystem, SchemeKind};
use crate::solver::{solve_with_options, SolveOptions, SolveReport};
use crate::spaces::{gradient_matrix, rt_interpolation_matrix, DofMap, FieldFunction, SpaceKind};
use crate::{Error, Result};

/// Discrete solution split into its fields. Absent fields are `None`: the
/// primal scheme carries only rotation and deflection (its shear is
/// recovered), Kirchhoff schemes have no shear, and the cross-check scheme
/// stores its edge unknown in `alpha`.
#[derive(Debug, Clone)]
pub struct SolutionFields {
    pub kind: SchemeKind,
    pub thickness: f64,
    pub phi: FieldFunction,
    pub zeta: Option<FieldFunction>,
    pub alpha: Option<FieldFunction>,
    pub omega: FieldFunction,
    pub y: Option<FieldFunction>,
    pub p: Option<FieldFunction>,
    pub mean: Option<f64>,
    pub raw: Vec<f64>,
    pub report: SolveReport,
}

pub fn solve_scheme(system: &BlockSystem) -> Result<SolutionFields> {
    solve_scheme_with(
        system,
        &SolveOptions {
            signs: Some(pivot_signs(system)),
            ..Default::default()
        },
    )
}

/// `-1` on the constraint multipliers `y` and `p`, `+1` elsewhere. The mean
/// multiplier only constrains `p`, so it sits on the positive side; with
/// this split a shift of the zero diagonals makes every scheme
/// quasi-definite.
pub fn pivot_signs(system: &BlockSystem) -> Vec<i8> {
    let mut s = vec![1i8; system.n_unknowns()];
    for f in &system.layout {
        if f.name == Y || f.name == P {
            s[f.offset..f.offset + f.len].fill(-1);
        }
    }
    s
}

pub fn solve_scheme_with(system: &BlockSystem, opts: &SolveOptions) -> Result<SolutionFields> {
    let report = solve_with_options(&system.matrix, &system.rhs, opts)?;
    let x = report.solution.clone();
    let s = &system.spaces;
    let take = |name: &str, map: &Arc<DofMap>| -> Result<Option<FieldFunction>> {
        system
            .slice(name, &x)
            .map(|c| FieldFunction::new(map.clone(), c.to_vec()))
            .transpose()
    };
    let phi = take(PHI, &s.br)?.expect("every scheme has a rotation");
    let omega = take(OMEGA, &s.p1_zero)?.expect("every scheme has a deflection");
    let mut zeta = take(ZETA, &s.rt)?;
    if system.kind == SchemeKind::RmPrimal {
        zeta = Some(recover_shear(&s.rt, &phi, &omega, system.thickness)?);
    }
    Ok(SolutionFields {
        kind: system.kind,
        thickness: system.thickness,
        zeta,
        alpha: take(ALPHA, &s.rt)?,
        y: take(Y, &s.p1_hole)?,
        p: take(P, &s.p0)?,
        mean: system.slice(MEAN, &x).map(|m| m[0]),
        phi,
        omega,
        raw: x,
        report,
    })
}

/// Shear from rotation and deflection: `t^-2 (grad omega - Pi phi)`, edge
/// by edge.
pub fn recover_shear(
    rt: &Arc<DofMap>,
    phi: &FieldFunction,
    omega: &FieldFunction,
    t: f64,
) -> Result<FieldFunction> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveThickness(t));
    }
    if rt.kind() != SpaceKind::RtRot || phi.kind() != SpaceKind::BrVec || !omega.kind().is_p1() {
        return Err(Error::DimensionMismatch(format!(
            "shear recovery needs RT_rot, BR_vec and P1 spaces, got {}, {}, {}",
            rt.kind(),
            phi.kind(),
            omega.kind()
        )));
    }
    let p = rt_interpolation_matrix(phi.dofmap(), rt)?;
    let g = gradient_matrix(omega.dofmap(), rt);
    let pp = p.mul_vec(phi.coefficients());
    let gw = g.mul_vec(omega.coefficients());
    let s = 1.0 / (t * t);
    FieldFunction::new(
        rt.clone(),
        gw.iter().zip(&pp).map(|(a, b)| s * (a - b)).collect(),
    )
}
