use std::fmt;

use serde::{Deserialize, Serialize};

use super::material::{apply_c, ddot, sym, PlateMaterial};
use super::quadrature::QuadratureRule;
use crate::spaces::basis::{BasisEval, ElementGeometry};
use crate::spaces::field::local_basis;
use crate::spaces::SpaceKind;
use crate::{Error, Result};

/// Bubble times bubble is the highest product that occurs.
pub const DEFAULT_DEGREE: usize = 4;

/// Dense row-major element matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl LocalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// `self^T * rhs`.
    pub fn tr_mul(&self, rhs: &LocalMatrix) -> Self {
        assert_eq!(self.rows, rhs.rows);
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(k, i);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

/// The coupling forms that appear in the block systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormTag {
    /// `(u, v)` between vector spaces.
    MassVec,
    /// `(grad u, grad v)` between P1 spaces.
    GradGrad,
    /// `(u, grad z)` with `u` vector, `z` P1.
    VecDotGrad,
    /// `(rot u, q)` with `u` vector, `q` piecewise constant.
    RotTimesP0,
    /// `(u, v)` between edge-element spaces.
    RtMass,
    /// `(rot u, q)` with `u` an edge element.
    RtRotP0,
    /// `(u, v)` between scalar spaces.
    MassScalar,
}

impl FormTag {
    pub const ALL: [FormTag; 7] = [
        FormTag::MassVec,
        FormTag::GradGrad,
        FormTag::VecDotGrad,
        FormTag::RotTimesP0,
        FormTag::RtMass,
        FormTag::RtRotP0,
        FormTag::MassScalar,
    ];

    pub fn accepts(self, row: SpaceKind, col: SpaceKind) -> bool {
        let scalar = |k: SpaceKind| k.is_p1() || k == SpaceKind::P0MeanZero;
        match self {
            FormTag::MassVec => row.is_vector() && col.is_vector(),
            FormTag::GradGrad => row.is_p1() && col.is_p1(),
            FormTag::VecDotGrad => row.is_vector() && col.is_p1(),
            FormTag::RotTimesP0 => row.is_vector() && col == SpaceKind::P0MeanZero,
            FormTag::RtMass => row == SpaceKind::RtRot && col == SpaceKind::RtRot,
            FormTag::RtRotP0 => row == SpaceKind::RtRot && col == SpaceKind::P0MeanZero,
            FormTag::MassScalar => scalar(row) && scalar(col),
        }
    }

    fn integrand(self, u: &BasisEval, v: &BasisEval) -> f64 {
        match self {
            FormTag::MassVec | FormTag::RtMass => u.value[0] * v.value[0] + u.value[1] * v.value[1],
            FormTag::GradGrad => u.grad[0][0] * v.grad[0][0] + u.grad[0][1] * v.grad[0][1],
            FormTag::VecDotGrad => u.value[0] * v.grad[0][0] + u.value[1] * v.grad[0][1],
            FormTag::RotTimesP0 | FormTag::RtRotP0 => u.rot() * v.value[0],
            FormTag::MassScalar => u.value[0] * v.value[0],
        }
    }
}

impl fmt::Display for FormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormTag::MassVec => "mass_vec",
            FormTag::GradGrad => "grad_grad",
            FormTag::VecDotGrad => "vec_dot_grad",
            FormTag::RotTimesP0 => "rot_times_p0",
            FormTag::RtMass => "rt_mass",
            FormTag::RtRotP0 => "rt_rot_p0",
            FormTag::MassScalar => "mass_scalar",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for FormTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormTag::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown form tag '{s}'")))
    }
}

fn check_geometry(geom: &ElementGeometry) -> Result<()> {
    if !(geom.area > 0.0) || !geom.area.is_finite() {
        return Err(Error::DegenerateTriangle(0));
    }
    Ok(())
}

/// `(C E(u), E(v))` over the nine local Bernardi-Raugel functions.
pub fn local_elasticity(
    geom: &ElementGeometry,
    mat: &PlateMaterial,
    rule: &QuadratureRule,
) -> Result<LocalMatrix> {
    check_geometry(geom)?;
    let mut m = LocalMatrix::zeros(9, 9);
    for (b, w) in rule.points.iter().zip(&rule.weights) {
        let shapes = local_basis(SpaceKind::BrVec, geom, b);
        let strains: Vec<_> = shapes.iter().map(|s| sym(&s.grad)).collect();
        let stresses: Vec<_> = strains.iter().map(|e| apply_c(e, mat)).collect();
        let wk = w * geom.area;
        for i in 0..9 {
            for j in 0..9 {
                m.add(i, j, wk * ddot(&stresses[j], &strains[i]));
            }
        }
    }
    Ok(m)
}

/// Element matrix of `form` with rows indexed by the local functions of
/// `row` and columns by those of `col`, both in local orientation.
pub fn local_coupling(
    geom: &ElementGeometry,
    row: SpaceKind,
    col: SpaceKind,
    form: FormTag,
    rule: &QuadratureRule,
) -> Result<LocalMatrix> {
    if !form.accepts(row, col) {
        return Err(Error::IncompatibleForm {
            form: form.to_string(),
            row: row.to_string(),
            col: col.to_string(),
        });
    }
    check_geometry(geom)?;
    let mut m = LocalMatrix::zeros(row.n_local(), col.n_local());
    for (b, w) in rule.points.iter().zip(&rule.weights) {
        let us = local_basis(row, geom, b);
        let vs = local_basis(col, geom, b);
        let wk = w * geom.area;
        for (i, u) in us.iter().enumerate() {
            for (j, v) in vs.iter().enumerate() {
                m.add(i, j, wk * form.integrand(u, v));
            }
        }
    }
    Ok(m)
}

/// Tangential edge integrals of the local Bernardi-Raugel functions, i.e.
/// the local edge-element interpolant as a 3x9 matrix (local orientation).
pub fn local_rt_interpolation(geom: &ElementGeometry) -> LocalMatrix {
    let mut m = LocalMatrix::zeros(3, 9);
    for k in 0..3 {
        let t = geom.edge_tangent[k];
        let half = 0.5 * geom.edge_length[k];
        for i in [(k + 1) % 3, (k + 2) % 3] {
            for c in 0..2 {
                m.add(k, 2 * i + c, half * t[c]);
            }
        }
        m.add(k, 6 + k, 1.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::quadrature::quadrature;

    fn reference() -> ElementGeometry {
        ElementGeometry::from_points([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    }

    fn rule() -> QuadratureRule {
        quadrature(DEFAULT_DEGREE).unwrap()
    }

    #[test]
    fn p1_stiffness_on_reference_triangle() {
        let m = local_coupling(
            &reference(),
            SpaceKind::P1,
            SpaceKind::P1,
            FormTag::GradGrad,
            &rule(),
        )
        .unwrap();
        let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j) - want[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn elasticity_kernel_is_rigid_motions() {
        let g = ElementGeometry::from_points([[0.3, 0.1], [1.4, 0.5], [0.2, 0.9]]);
        let mat = PlateMaterial::default();
        let m = local_elasticity(&g, &mat, &rule()).unwrap();
        // translations and the linear rotation (-y, x) have no bubble part
        let mut rigid = vec![vec![0.0; 9]; 3];
        for i in 0..3 {
            rigid[0][2 * i] = 1.0;
            rigid[1][2 * i + 1] = 1.0;
            rigid[2][2 * i] = -g.points[i][1];
            rigid[2][2 * i + 1] = g.points[i][0];
        }
        for r in &rigid {
            let y = m.mul_vec(r);
            assert!(y.iter().all(|v| v.abs() < 1e-13), "{y:?}");
        }
        for i in 0..9 {
            for j in 0..9 {
                assert!((m.get(i, j) - m.get(j, i)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn elasticity_vertex_block_matches_hand_strain_matrix() {
        // E = 12, nu = 0: C = identity, so the entry is E(u):E(v) |K|.
        let g = reference();
        let mat = PlateMaterial::new(12.0, 0.0, 1.0).unwrap();
        let m = local_elasticity(&g, &mat, &rule()).unwrap();
        let grads = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        for a in 0..6 {
            for b in 0..6 {
                let (ia, ca) = (a / 2, a % 2);
                let (ib, cb) = (b / 2, b % 2);
                // E(l_i e_c) : E(l_j e_d) = 1/2 (delta_cd g_i.g_j + g_i[d] g_j[c])
                let dot = grads[ia][0] * grads[ib][0] + grads[ia][1] * grads[ib][1];
                let delta = if ca == cb { dot } else { 0.0 };
                let want = 0.5 * (delta + grads[ia][cb] * grads[ib][ca]) * 0.5;
                assert!((m.get(a, b) - want).abs() < 1e-14, "{a} {b}");
            }
        }
    }

    #[test]
    fn rt_rot_and_constant_couplings() {
        let g = ElementGeometry::from_points([[0.1, 0.2], [0.9, 0.3], [0.4, 1.1]]);
        let r = local_coupling(
            &g,
            SpaceKind::RtRot,
            SpaceKind::P0MeanZero,
            FormTag::RtRotP0,
            &rule(),
        )
        .unwrap();
        for k in 0..3 {
            assert!((r.get(k, 0) - 1.0).abs() < 1e-14);
        }
        // u + v x_perp has rot 2v; its moment against q = 1 is 2 v |K|
        let v = 0.7;
        let coeffs: Vec<f64> = (0..3)
            .map(|k| {
                let (a, b) = (g.points[(k + 1) % 3], g.points[(k + 2) % 3]);
                // exact tangential integral of (u0 - v y, u1 + v x) along a -> b
                let u = [0.3, -0.2];
                let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                let d = [b[0] - a[0], b[1] - a[1]];
                (u[0] - v * mid[1]) * d[0] + (u[1] + v * mid[0]) * d[1]
            })
            .collect();
        let moment: f64 = (0..3).map(|k| coeffs[k] * r.get(k, 0)).sum();
        assert!((moment - 2.0 * v * g.area).abs() < 1e-14);
    }

    #[test]
    fn vec_dot_grad_of_constants() {
        let g = ElementGeometry::from_points([[0.0, 0.0], [2.0, 0.0], [0.5, 1.5]]);
        let m = local_coupling(
            &g,
            SpaceKind::BrVec,
            SpaceKind::P1,
            FormTag::VecDotGrad,
            &rule(),
        )
        .unwrap();
        // vector (1, 2) from vertex functions; scalar x + 3y
        let mut c = [0.0; 9];
        for i in 0..3 {
            c[2 * i] = 1.0;
            c[2 * i + 1] = 2.0;
        }
        let z: Vec<f64> = g.points.iter().map(|p| p[0] + 3.0 * p[1]).collect();
        let val: f64 = (0..9)
            .map(|i| (0..3).map(|j| c[i] * m.get(i, j) * z[j]).sum::<f64>())
            .sum();
        assert!((val - g.area * (1.0 + 6.0)).abs() < 1e-13);
    }

    #[test]
    fn incompatible_pairs_are_rejected() {
        let g = reference();
        let err = local_coupling(
            &g,
            SpaceKind::P1,
            SpaceKind::RtRot,
            FormTag::RtMass,
            &rule(),
        );
        assert!(matches!(err, Err(Error::IncompatibleForm { .. })));
        assert!("nonsense".parse::<FormTag>().is_err());
        assert_eq!("rt_rot_p0".parse::<FormTag>().unwrap(), FormTag::RtRotP0);
    }

    #[test]
    fn rt_interpolation_reproduces_edge_integrals() {
        let g = ElementGeometry::from_points([[0.1, 0.2], [0.9, 0.3], [0.4, 1.1]]);
        let pi = local_rt_interpolation(&g);
        // the RT basis is dual to tangential edge integrals, so the rot of the
        // interpolant equals the boundary circulation of the input
        let coeffs: Vec<f64> = (0..9).map(|i| (i as f64 * 0.37).sin()).collect();
        let edge = pi.mul_vec(&coeffs);
        let rule = rule();
        let mut circ = 0.0;
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let s = local_basis(SpaceKind::BrVec, &g, b);
            circ += w * g.area * (0..9).map(|i| coeffs[i] * s[i].rot()).sum::<f64>();
        }
        assert!((edge.iter().sum::<f64>() - circ).abs() < 1e-13);
    }
}
