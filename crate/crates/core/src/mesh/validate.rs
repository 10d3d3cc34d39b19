use std::fmt;

use super::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveArea { triangle: usize, area: f64 },
    EdgeValence { edge: usize, triangles: usize },
    Euler { expected: i64, actual: i64 },
    InteriorEdgeCount { expected: i64, actual: i64 },
    BoundaryComponentCount { expected: usize, actual: usize },
    BoundaryNotCycle(String),
    IndexOutOfRange { triangle: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveArea { triangle, area } => {
                write!(
                    f,
                    "triangle {triangle} has non-positive signed area {area:e}"
                )
            }
            Violation::EdgeValence { edge, triangles } => {
                write!(f, "edge {edge} is shared by {triangles} triangles")
            }
            Violation::Euler { expected, actual } => {
                write!(
                    f,
                    "Euler characteristic V-E+T = {actual}, expected 1-J = {expected}"
                )
            }
            Violation::InteriorEdgeCount { expected, actual } => {
                write!(
                    f,
                    "interior edge count {actual}, expected V_int+T+J-1 = {expected}"
                )
            }
            Violation::BoundaryComponentCount { expected, actual } => {
                write!(f, "{actual} boundary components, expected J+1 = {expected}")
            }
            Violation::BoundaryNotCycle(msg) => write!(f, "boundary is not a set of cycles: {msg}"),
            Violation::IndexOutOfRange { triangle } => {
                write!(f, "triangle {triangle} references a missing vertex")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every structural invariant of a triangulation of a domain with
/// `m.n_holes()` holes.
pub fn validate(m: &Mesh) -> ValidationReport {
    let mut violations = Vec::new();
    let nv = m.n_vertices();
    for (t, tri) in m.triangles().iter().enumerate() {
        if tri.iter().any(|&v| v >= nv) {
            violations.push(Violation::IndexOutOfRange { triangle: t });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    for t in 0..m.n_triangles() {
        let area = m.signed_area(t);
        if area <= 0.0 {
            violations.push(Violation::NonPositiveArea { triangle: t, area });
        }
    }
    for e in 0..m.n_edges() {
        let count = m.edge_triangles(e).len();
        if count == 0 || count > 2 {
            violations.push(Violation::EdgeValence {
                edge: e,
                triangles: count,
            });
        }
    }

    let j = m.n_holes() as i64;
    let euler = nv as i64 - m.n_edges() as i64 + m.n_triangles() as i64;
    if euler != 1 - j {
        violations.push(Violation::Euler {
            expected: 1 - j,
            actual: euler,
        });
    }
    let e_int = m.n_interior_edges() as i64;
    let expected = m.n_interior_vertices() as i64 + m.n_triangles() as i64 + j - 1;
    if e_int != expected {
        violations.push(Violation::InteriorEdgeCount {
            expected,
            actual: e_int,
        });
    }

    match m.boundary_components() {
        Ok(cycles) => {
            if cycles.len() != m.n_holes() + 1 {
                violations.push(Violation::BoundaryComponentCount {
                    expected: m.n_holes() + 1,
                    actual: cycles.len(),
                });
            }
        }
        Err(err) => violations.push(Violation::BoundaryNotCycle(err.to_string())),
    }
    ValidationReport { violations }
}
