use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::basis::{self, BasisEval, ElementGeometry};
use super::dofmap::{DofMap, SpaceKind};
use crate::forms::material::Tensor2;
use crate::forms::quadrature::quadrature;
use crate::{Error, Result};

/// Local shape functions of `kind` on one triangle, in counterclockwise
/// local orientation.
pub fn local_basis(kind: SpaceKind, geom: &ElementGeometry, bary: &[f64; 3]) -> Vec<BasisEval> {
    match kind {
        SpaceKind::P1 | SpaceKind::P1Zero | SpaceKind::P1HoleConstant => {
            basis::p1(geom, bary).to_vec()
        }
        SpaceKind::BrVec => basis::bernardi_raugel(geom, bary).to_vec(),
        SpaceKind::RtRot => basis::raviart_thomas(geom, bary).to_vec(),
        SpaceKind::P0MeanZero => vec![BasisEval {
            value: [1.0, 0.0],
            grad: [[0.0; 2]; 2],
        }],
    }
}

/// A discrete function: coefficients with respect to a [`DofMap`].
#[derive(Debug, Clone)]
pub struct FieldFunction {
    dofmap: Arc<DofMap>,
    coefficients: Vec<f64>,
}

/// Serialized form of a [`FieldFunction`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldDump {
    pub kind: SpaceKind,
    pub n_dofs: usize,
    pub coefficients: Vec<f64>,
}

impl FieldFunction {
    pub fn new(dofmap: Arc<DofMap>, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != dofmap.n_dofs() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} with {} dofs",
                coefficients.len(),
                dofmap.kind(),
                dofmap.n_dofs()
            )));
        }
        Ok(Self {
            dofmap,
            coefficients,
        })
    }

    pub fn zeros(dofmap: Arc<DofMap>) -> Self {
        let n = dofmap.n_dofs();
        Self {
            dofmap,
            coefficients: vec![0.0; n],
        }
    }

    pub fn dofmap(&self) -> &Arc<DofMap> {
        &self.dofmap
    }

    pub fn kind(&self) -> SpaceKind {
        self.dofmap.kind()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    /// Value and gradient at barycentric point `bary` of triangle `t`.
    pub fn eval(&self, t: usize, geom: &ElementGeometry, bary: &[f64; 3]) -> BasisEval {
        let local = self.dofmap.gather(t, &self.coefficients);
        let shapes = local_basis(self.kind(), geom, bary);
        let mut out = BasisEval::default();
        for (c, s) in local.iter().zip(&shapes) {
            if *c == 0.0 {
                continue;
            }
            for i in 0..2 {
                out.value[i] += c * s.value[i];
                for j in 0..2 {
                    out.grad[i][j] += c * s.grad[i][j];
                }
            }
        }
        out
    }

    pub fn value_at(&self, t: usize, bary: &[f64; 3]) -> [f64; 2] {
        let geom = ElementGeometry::new(self.dofmap.mesh(), t);
        self.eval(t, &geom, bary).value
    }

    pub fn gradient_at(&self, t: usize, bary: &[f64; 3]) -> Tensor2 {
        let geom = ElementGeometry::new(self.dofmap.mesh(), t);
        self.eval(t, &geom, bary).grad
    }

    /// `(||f||_0^2, |f|_1^2, ||rot f||_0^2)`, integrated exactly.
    pub fn squared_norms(&self) -> [f64; 3] {
        let mesh = self.dofmap.mesh();
        let rule = quadrature(4).expect("degree 4 rule");
        let mut out = [0.0; 3];
        for t in 0..mesh.n_triangles() {
            let g = ElementGeometry::new(mesh, t);
            for (b, w) in rule.points.iter().zip(&rule.weights) {
                let e = self.eval(t, &g, b);
                let wk = w * g.area;
                out[0] += wk * (e.value[0].powi(2) + e.value[1].powi(2));
                out[1] += wk * e.grad.iter().flatten().map(|x| x * x).sum::<f64>();
                out[2] += wk * e.rot().powi(2);
            }
        }
        out
    }

    pub fn l2_norm(&self) -> f64 {
        self.squared_norms()[0].sqrt()
    }

    /// Full H1 norm `(||f||_0^2 + |f|_1^2)^(1/2)`.
    pub fn h1_norm(&self) -> f64 {
        let [l2, h1, _] = self.squared_norms();
        (l2 + h1).sqrt()
    }

    /// Linear combination `a * self + b * other` on the same DOF map.
    pub fn axpby(&self, a: f64, other: &FieldFunction, b: f64) -> Result<FieldFunction> {
        if !Arc::ptr_eq(&self.dofmap, &other.dofmap)
            && self.dofmap.n_dofs() != other.dofmap.n_dofs()
        {
            return Err(Error::DimensionMismatch(
                "fields on different spaces".into(),
            ));
        }
        let c = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(x, y)| a * x + b * y)
            .collect();
        FieldFunction::new(self.dofmap.clone(), c)
    }

    pub fn dump(&self) -> FieldDump {
        FieldDump {
            kind: self.kind(),
            n_dofs: self.dofmap.n_dofs(),
            coefficients: self.coefficients.clone(),
        }
    }

    pub fn from_dump(dofmap: Arc<DofMap>, dump: FieldDump) -> Result<Self> {
        if dump.kind != dofmap.kind() || dump.n_dofs != dofmap.n_dofs() {
            return Err(Error::DimensionMismatch(format!(
                "dump of {} with {} dofs does not fit {} with {} dofs",
                dump.kind,
                dump.n_dofs,
                dofmap.kind(),
                dofmap.n_dofs()
            )));
        }
        Self::new(dofmap, dump.coefficients)
    }
}
