use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::mesh::{BoundaryTag, Mesh};

/// The finite element spaces used by the schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    /// Continuous piecewise linears.
    P1,
    /// Piecewise linears vanishing on the whole boundary.
    P1Zero,
    /// Piecewise linears vanishing on the outer boundary and constant (with
    /// one unknown each) on every hole boundary.
    P1HoleConstant,
    /// Vector piecewise linears plus tangential edge bubbles, vanishing on
    /// the boundary (rotated Bernardi-Raugel).
    BrVec,
    /// Lowest-order H(rot) edge elements with vanishing tangential trace
    /// (rotated Raviart-Thomas).
    RtRot,
    /// Piecewise constants; the zero-mean constraint is imposed by the
    /// schemes through a multiplier.
    P0MeanZero,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 6] = [
        SpaceKind::P1,
        SpaceKind::P1Zero,
        SpaceKind::P1HoleConstant,
        SpaceKind::BrVec,
        SpaceKind::RtRot,
        SpaceKind::P0MeanZero,
    ];

    pub fn n_local(self) -> usize {
        match self {
            SpaceKind::P1 | SpaceKind::P1Zero | SpaceKind::P1HoleConstant | SpaceKind::RtRot => 3,
            SpaceKind::BrVec => 9,
            SpaceKind::P0MeanZero => 1,
        }
    }

    pub fn is_vector(self) -> bool {
        matches!(self, SpaceKind::BrVec | SpaceKind::RtRot)
    }

    pub fn is_p1(self) -> bool {
        matches!(
            self,
            SpaceKind::P1 | SpaceKind::P1Zero | SpaceKind::P1HoleConstant
        )
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceKind::P1 => "P1",
            SpaceKind::P1Zero => "P1_zero",
            SpaceKind::P1HoleConstant => "P1_hole_constant",
            SpaceKind::BrVec => "BR_vec",
            SpaceKind::RtRot => "RT_rot",
            SpaceKind::P0MeanZero => "P0_meanzero",
        };
        f.write_str(s)
    }
}

/// Global index of a local shape function, or `None` when the function is
/// removed by a homogeneous boundary condition. `sign` converts the local
/// (counterclockwise) edge orientation to the global one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDof {
    pub global: Option<usize>,
    pub sign: f64,
}

#[derive(Debug, Clone)]
pub struct DofMap {
    kind: SpaceKind,
    mesh: Arc<Mesh>,
    n_dofs: usize,
    cell_dofs: Vec<LocalDof>,
    vertex_dofs: Vec<Option<usize>>,
    edge_dofs: Vec<Option<usize>>,
}

impl DofMap {
    /// Number vertices first, then edges, both by ascending mesh index.
    pub fn build(mesh: Arc<Mesh>, kind: SpaceKind) -> Self {
        let nv = mesh.n_vertices();
        let ne = mesh.n_edges();
        let mut vertex_dofs = vec![None; nv];
        let mut edge_dofs = vec![None; ne];
        let mut n = 0usize;
        let interior_vertices = || (0..nv).filter(|&v| mesh.vertex_tags()[v].is_interior());
        let interior_edges = || (0..ne).filter(|&e| mesh.edge_tags()[e].is_interior());
        match kind {
            SpaceKind::P1 => {
                for (v, d) in vertex_dofs.iter_mut().enumerate() {
                    *d = Some(v);
                }
                n = nv;
            }
            SpaceKind::P1Zero | SpaceKind::P1HoleConstant => {
                for v in interior_vertices() {
                    vertex_dofs[v] = Some(n);
                    n += 1;
                }
                if kind == SpaceKind::P1HoleConstant {
                    let base = n;
                    for v in 0..nv {
                        if let BoundaryTag::Component(k) = mesh.vertex_tags()[v] {
                            if k > 0 {
                                vertex_dofs[v] = Some(base + k - 1);
                            }
                        }
                    }
                    n += mesh.n_holes();
                }
            }
            SpaceKind::BrVec => {
                // vertex_dofs holds the x-component index; y follows it
                for v in interior_vertices() {
                    vertex_dofs[v] = Some(n);
                    n += 2;
                }
                for e in interior_edges() {
                    edge_dofs[e] = Some(n);
                    n += 1;
                }
            }
            SpaceKind::RtRot => {
                for e in interior_edges() {
                    edge_dofs[e] = Some(n);
                    n += 1;
                }
            }
            SpaceKind::P0MeanZero => {
                n = mesh.n_triangles();
            }
        }

        let nl = kind.n_local();
        let mut cell_dofs = Vec::with_capacity(nl * mesh.n_triangles());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let te = mesh.triangle_edges()[t];
            let plain = |g: Option<usize>| LocalDof {
                global: g,
                sign: 1.0,
            };
            match kind {
                SpaceKind::P1 | SpaceKind::P1Zero | SpaceKind::P1HoleConstant => {
                    cell_dofs.extend(tri.iter().map(|&v| plain(vertex_dofs[v])));
                }
                SpaceKind::BrVec => {
                    for &v in tri {
                        let g = vertex_dofs[v];
                        cell_dofs.push(plain(g));
                        cell_dofs.push(plain(g.map(|g| g + 1)));
                    }
                    for k in 0..3 {
                        cell_dofs.push(LocalDof {
                            global: edge_dofs[te[k]],
                            sign: mesh.edge_sign(t, k),
                        });
                    }
                }
                SpaceKind::RtRot => {
                    for k in 0..3 {
                        cell_dofs.push(LocalDof {
                            global: edge_dofs[te[k]],
                            sign: mesh.edge_sign(t, k),
                        });
                    }
                }
                SpaceKind::P0MeanZero => cell_dofs.push(plain(Some(t))),
            }
        }
        Self {
            kind,
            mesh,
            n_dofs: n,
            cell_dofs,
            vertex_dofs,
            edge_dofs,
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_local(&self) -> usize {
        self.kind.n_local()
    }

    pub fn cell(&self, t: usize) -> &[LocalDof] {
        let nl = self.n_local();
        &self.cell_dofs[t * nl..(t + 1) * nl]
    }

    /// For P1 kinds the vertex DOF; for `BrVec` the x-component DOF (the
    /// y-component is the next index).
    pub fn vertex_dof(&self, v: usize) -> Option<usize> {
        self.vertex_dofs[v]
    }

    pub fn edge_dof(&self, e: usize) -> Option<usize> {
        self.edge_dofs[e]
    }

    /// Coefficients of `local` shape values gathered from a global vector.
    pub fn gather(&self, t: usize, coefficients: &[f64]) -> Vec<f64> {
        self.cell(t)
            .iter()
            .map(|d| d.global.map_or(0.0, |g| d.sign * coefficients[g]))
            .collect()
    }
}

/// The five spaces of the mixed schemes on one mesh.
#[derive(Debug, Clone)]
pub struct SpaceSet {
    pub mesh: Arc<Mesh>,
    pub br: Arc<DofMap>,
    pub rt: Arc<DofMap>,
    pub p1_zero: Arc<DofMap>,
    pub p1_hole: Arc<DofMap>,
    pub p0: Arc<DofMap>,
}

impl SpaceSet {
    pub fn new(mesh: Arc<Mesh>) -> Self {
        let build = |k| Arc::new(DofMap::build(mesh.clone(), k));
        Self {
            br: build(SpaceKind::BrVec),
            rt: build(SpaceKind::RtRot),
            p1_zero: build(SpaceKind::P1Zero),
            p1_hole: build(SpaceKind::P1HoleConstant),
            p0: build(SpaceKind::P0MeanZero),
            mesh,
        }
    }
}
