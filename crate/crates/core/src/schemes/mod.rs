//! The discrete plate systems.
//!
//! Every mixed system is assembled as a symmetric block matrix whose block
//! rows are the test functions and block columns the unknowns, in the order
//! given by [`SchemeKind::fields`]. Only one of each pair of off-diagonal
//! blocks is stored; [`BlockSystem::matrix`] holds the symmetric completion.

mod assemble;
mod bfs;
mod solution;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::forms::PlateMaterial;
use crate::mesh::Point;
use crate::spaces::{SpaceKind, SpaceSet};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

pub use assemble::assemble_scheme;
pub use bfs::{bfs_cross_check, BfsReport};
pub use solution::{recover_shear, solve_scheme, solve_scheme_with, SolutionFields};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Mixed Reissner-Mindlin scheme.
    #[serde(rename = "rm-mixed")]
    RmMixed,
    /// Mixed Reissner-Mindlin scheme with the edge interpolant on the
    /// rotation in the gradient coupling.
    #[serde(rename = "rm-reduced")]
    RmMixedReduced,
    /// Primal Reissner-Mindlin scheme in rotation and deflection.
    #[serde(rename = "rm-primal")]
    RmPrimal,
    /// Mixed Kirchhoff scheme.
    #[serde(rename = "k-mixed")]
    KMixed,
    /// Mixed Kirchhoff scheme with the edge interpolant.
    #[serde(rename = "k-reduced")]
    KMixedReduced,
    /// Alternative multiplier formulation used as a cross-check.
    #[serde(rename = "bfs-check")]
    BfsCheck,
}

/// Names of the unknown blocks.
pub mod field {
    pub const PHI: &str = "phi";
    pub const ZETA: &str = "zeta";
    pub const ALPHA: &str = "alpha";
    pub const OMEGA: &str = "omega";
    pub const Y: &str = "y";
    pub const P: &str = "p";
    pub const MEAN: &str = "mean";
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 6] = [
        SchemeKind::RmMixed,
        SchemeKind::RmMixedReduced,
        SchemeKind::RmPrimal,
        SchemeKind::KMixed,
        SchemeKind::KMixedReduced,
        SchemeKind::BfsCheck,
    ];

    pub fn is_rm(self) -> bool {
        !self.is_kirchhoff()
    }

    pub fn is_kirchhoff(self) -> bool {
        matches!(self, SchemeKind::KMixed | SchemeKind::KMixedReduced)
    }

    pub fn is_reduced(self) -> bool {
        matches!(self, SchemeKind::RmMixedReduced | SchemeKind::KMixedReduced)
    }

    /// A zero thickness turns a mixed RM scheme into its Kirchhoff
    /// counterpart.
    pub fn for_thickness(self, t: f64) -> SchemeKind {
        if t == 0.0 {
            match self {
                SchemeKind::RmMixed => SchemeKind::KMixed,
                SchemeKind::RmMixedReduced | SchemeKind::RmPrimal => SchemeKind::KMixedReduced,
                other => other,
            }
        } else {
            self
        }
    }

    /// Unknown blocks in order, with their spaces (`None` for the scalar
    /// mean multiplier).
    pub fn fields(self) -> Vec<(&'static str, Option<SpaceKind>)> {
        use field::*;
        let br = (PHI, Some(SpaceKind::BrVec));
        let om = (OMEGA, Some(SpaceKind::P1Zero));
        let y = (Y, Some(SpaceKind::P1HoleConstant));
        let p = (P, Some(SpaceKind::P0MeanZero));
        let mean = (MEAN, None);
        match self {
            SchemeKind::RmMixed | SchemeKind::RmMixedReduced => {
                vec![br, (ZETA, Some(SpaceKind::RtRot)), om, y, p, mean]
            }
            SchemeKind::RmPrimal => vec![br, om],
            SchemeKind::KMixed | SchemeKind::KMixedReduced => vec![br, om, y, p, mean],
            SchemeKind::BfsCheck => vec![br, (ALPHA, Some(SpaceKind::RtRot)), om, y, p, mean],
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeKind::RmMixed => "rm-mixed",
            SchemeKind::RmMixedReduced => "rm-reduced",
            SchemeKind::RmPrimal => "rm-primal",
            SchemeKind::KMixed => "k-mixed",
            SchemeKind::KMixedReduced => "k-reduced",
            SchemeKind::BfsCheck => "bfs-check",
        };
        f.write_str(s)
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scheme '{s}'")))
    }
}

pub type VectorLoad = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
pub type ScalarLoad = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Material, thickness and loads. `load_f` is the moment load paired with
/// rotations, `load_g` the transverse load paired with deflections.
#[derive(Clone)]
pub struct PlateProblem {
    pub material: PlateMaterial,
    pub load_f: VectorLoad,
    pub load_g: ScalarLoad,
    /// Quadrature degree for the load functionals.
    pub load_degree: usize,
}

impl fmt::Debug for PlateProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlateProblem")
            .field("material", &self.material)
            .field("load_degree", &self.load_degree)
            .finish_non_exhaustive()
    }
}

impl PlateProblem {
    pub fn new(material: PlateMaterial, load_f: VectorLoad, load_g: ScalarLoad) -> Self {
        Self {
            material,
            load_f,
            load_g,
            load_degree: 10,
        }
    }

    pub fn unloaded(material: PlateMaterial) -> Self {
        Self::new(material, Arc::new(|_| [0.0; 2]), Arc::new(|_| 0.0))
    }

    pub fn thickness(&self) -> f64 {
        self.material.thickness
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldLayout {
    pub name: &'static str,
    pub space: Option<SpaceKind>,
    pub offset: usize,
    pub len: usize,
}

/// One stored block `(row field, column field)`; its transpose is implied
/// when the fields differ.
#[derive(Debug, Clone)]
pub struct Block {
    pub row: &'static str,
    pub col: &'static str,
    pub matrix: CsrMatrix,
}

#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub kind: SchemeKind,
    pub thickness: f64,
    pub spaces: SpaceSet,
    pub layout: Vec<FieldLayout>,
    pub blocks: Vec<Block>,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub symmetric: bool,
}

impl BlockSystem {
    pub fn n_unknowns(&self) -> usize {
        self.rhs.len()
    }

    pub fn field(&self, name: &str) -> Option<&FieldLayout> {
        self.layout.iter().find(|f| f.name == name)
    }

    pub fn block(&self, row: &str, col: &str) -> Option<&CsrMatrix> {
        self.blocks
            .iter()
            .find(|b| b.row == row && b.col == col)
            .map(|b| &b.matrix)
    }

    /// Slice of a full vector belonging to `name`.
    pub fn slice<'a>(&self, name: &str, x: &'a [f64]) -> Option<&'a [f64]> {
        self.field(name).map(|f| &x[f.offset..f.offset + f.len])
    }

    /// Residual `b - A x` restricted to the test rows of `name`.
    pub fn row_residual(&self, name: &str, x: &[f64]) -> Option<Vec<f64>> {
        let f = self.field(name)?;
        let ax = self.matrix.mul_vec(x);
        Some(
            (f.offset..f.offset + f.len)
                .map(|i| self.rhs[i] - ax[i])
                .collect(),
        )
    }

    /// Write the matrix (symmetric, lower triangle, 1-based) and the
    /// right-hand side (one value per line).
    pub fn write_matrix_market<W: Write, V: Write>(&self, matrix: W, mut rhs: V) -> Result<()> {
        self.matrix.write_matrix_market(matrix, self.symmetric)?;
        for v in &self.rhs {
            writeln!(rhs, "{v:e}")?;
        }
        Ok(())
    }
}
