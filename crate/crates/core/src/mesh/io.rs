use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BoundaryTag, Mesh, Point};
use crate::{Error, Result};

pub const MESH_FORMAT_VERSION: u32 = 1;

/// On-disk mesh representation. Boundary tags use `-1` for interior and the
/// component index otherwise; edge tags are listed for boundary edges only.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeshFile {
    pub version: u32,
    pub n_holes: usize,
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_tags: BoundaryTagsFile,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundaryTagsFile {
    pub vertices: Vec<i64>,
    /// `[low vertex, high vertex, component]` per boundary edge.
    pub edges: Vec<[usize; 3]>,
}

fn tag_code(t: BoundaryTag) -> i64 {
    match t {
        BoundaryTag::Interior => -1,
        BoundaryTag::Component(k) => k as i64,
    }
}

impl From<&Mesh> for MeshFile {
    fn from(m: &Mesh) -> Self {
        let edges = m
            .edges()
            .iter()
            .zip(m.edge_tags())
            .filter_map(|(&[a, b], t)| t.component().map(|k| [a, b, k]))
            .collect();
        MeshFile {
            version: MESH_FORMAT_VERSION,
            n_holes: m.n_holes(),
            vertices: m.vertices().to_vec(),
            triangles: m.triangles().to_vec(),
            boundary_tags: BoundaryTagsFile {
                vertices: m.vertex_tags().iter().map(|&t| tag_code(t)).collect(),
                edges,
            },
        }
    }
}

impl MeshFile {
    /// Rebuild the mesh; stored tags must agree with the recomputed topology.
    pub fn into_mesh(self) -> Result<Mesh> {
        if self.version != MESH_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported mesh version {}",
                self.version
            )));
        }
        let mesh = Mesh::from_parts(self.vertices, self.triangles, self.n_holes);
        let recomputed = MeshFile::from(&mesh);
        if recomputed.boundary_tags != self.boundary_tags {
            return Err(Error::InvalidMesh(
                "stored boundary tags disagree with mesh topology".into(),
            ));
        }
        Ok(mesh)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_square_hole_mesh, HoleBox};

    #[test]
    fn json_round_trip_preserves_mesh() {
        let m = generate_square_hole_mesh(3.0, &[HoleBox::new(1.0, 1.0, 2.0, 2.0)], 2).unwrap();
        let text = serde_json::to_string(&MeshFile::from(&m)).unwrap();
        let back: MeshFile = serde_json::from_str(&text).unwrap();
        let m2 = back.into_mesh().unwrap();
        assert_eq!(m2.triangles(), m.triangles());
        assert_eq!(m2.vertex_tags(), m.vertex_tags());
        assert_eq!(m2.n_holes(), 1);
    }

    #[test]
    fn tampered_tags_are_rejected() {
        let m = generate_square_hole_mesh(1.0, &[], 1).unwrap();
        let mut f = MeshFile::from(&m);
        f.boundary_tags.vertices[0] = -1;
        assert!(f.into_mesh().is_err());
    }
}
