use super::{Domain, Mesh, Point};
use crate::{Error, Result};

/// Axis-aligned rectangular hole `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl HoleBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    /// Clockwise corner list.
    fn polygon(&self) -> Vec<Point> {
        vec![
            [self.x0, self.y0],
            [self.x0, self.y1],
            [self.x1, self.y1],
            [self.x1, self.y0],
        ]
    }
}

/// Hole box snapped to grid indices `[i0, i1) x [j0, j1)` of cells.
struct GridBox {
    i0: usize,
    j0: usize,
    i1: usize,
    j1: usize,
}

fn to_grid(v: f64, n: usize, what: &str) -> Result<usize> {
    let g = v * n as f64;
    let r = g.round();
    if (g - r).abs() > 1e-9 || r < 0.0 {
        return Err(Error::InvalidDomain(format!(
            "{what} = {v} is not aligned to the 1/{n} grid"
        )));
    }
    Ok(r as usize)
}

impl Domain {
    /// The square `[0, side]^2` with rectangular holes.
    pub fn square_with_boxes(side: f64, holes: &[HoleBox]) -> Self {
        Domain {
            outer: vec![[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]],
            holes: holes.iter().map(HoleBox::polygon).collect(),
        }
    }
}

/// Structured triangulation of `[0, outer_side]^2` minus the given boxes.
///
/// The square is divided into `outer_side * n` cells per direction, cells
/// covered by a hole are removed, and every remaining cell is split along
/// its bottom-left to top-right diagonal. Vertices are numbered row by row
/// from the bottom; triangles cell by cell in the same order.
pub fn generate_square_hole_mesh(outer_side: f64, holes: &[HoleBox], n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidDomain("n must be positive".into()));
    }
    let cells = to_grid(outer_side, n, "outer side")?;
    if cells == 0 {
        return Err(Error::InvalidDomain("outer side must be positive".into()));
    }
    let mut boxes = Vec::with_capacity(holes.len());
    for h in holes {
        let b = GridBox {
            i0: to_grid(h.x0, n, "hole x0")?,
            j0: to_grid(h.y0, n, "hole y0")?,
            i1: to_grid(h.x1, n, "hole x1")?,
            j1: to_grid(h.y1, n, "hole y1")?,
        };
        if b.i0 >= b.i1 || b.j0 >= b.j1 {
            return Err(Error::InvalidDomain(format!("empty hole box {h:?}")));
        }
        if b.i0 == 0 || b.j0 == 0 || b.i1 >= cells || b.j1 >= cells {
            return Err(Error::InvalidDomain(format!(
                "hole {h:?} touches or leaves the outer boundary"
            )));
        }
        boxes.push(b);
    }
    for (a, ba) in boxes.iter().enumerate() {
        for bb in &boxes[a + 1..] {
            // closed boxes must be disjoint
            let apart = ba.i1 < bb.i0 || bb.i1 < ba.i0 || ba.j1 < bb.j0 || bb.j1 < ba.j0;
            if !apart {
                return Err(Error::InvalidDomain("holes overlap or touch".into()));
            }
        }
    }

    let in_hole = |i: usize, j: usize| {
        boxes
            .iter()
            .any(|b| i >= b.i0 && i < b.i1 && j >= b.j0 && j < b.j1)
    };
    let np = cells + 1;
    let mut used = vec![false; np * np];
    for j in 0..cells {
        for i in 0..cells {
            if !in_hole(i, j) {
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    used[(j + dj) * np + i + di] = true;
                }
            }
        }
    }
    let h = 1.0 / n as f64;
    let mut index = vec![usize::MAX; np * np];
    let mut vertices = Vec::new();
    for j in 0..np {
        for i in 0..np {
            if used[j * np + i] {
                index[j * np + i] = vertices.len();
                vertices.push([i as f64 * h, j as f64 * h]);
            }
        }
    }
    let mut triangles = Vec::new();
    for j in 0..cells {
        for i in 0..cells {
            if in_hole(i, j) {
                continue;
            }
            let v00 = index[j * np + i];
            let v10 = index[j * np + i + 1];
            let v01 = index[(j + 1) * np + i];
            let v11 = index[(j + 1) * np + i + 1];
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    Ok(Mesh::from_parts(vertices, triangles, holes.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryTag;

    #[test]
    fn unit_square_single_cell() {
        let m = generate_square_hole_mesh(1.0, &[], 1).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_triangles()), (4, 5, 2));
    }

    #[test]
    fn three_by_three_without_holes() {
        let m = generate_square_hole_mesh(3.0, &[], 1).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_triangles()), (16, 33, 18));
        assert_eq!(m.n_interior_vertices(), 4);
    }

    #[test]
    fn three_by_three_with_center_hole() {
        let m = generate_square_hole_mesh(3.0, &[HoleBox::new(1.0, 1.0, 2.0, 2.0)], 1).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_triangles()), (16, 32, 16));
        assert_eq!(m.n_interior_vertices(), 0);
        assert_eq!(m.n_interior_edges(), 16);
        assert_eq!(m.n_holes(), 1);
        // the hole corner (1,1) has index 5 in row-major numbering
        assert_eq!(m.vertex_tags()[5], BoundaryTag::Component(1));
        assert_eq!(m.vertex_tags()[0], BoundaryTag::Component(0));
    }

    #[test]
    fn rejects_misaligned_and_touching_holes() {
        let misaligned = generate_square_hole_mesh(3.0, &[HoleBox::new(1.2, 1.0, 2.0, 2.0)], 1);
        assert!(matches!(misaligned, Err(Error::InvalidDomain(_))));
        let touching = generate_square_hole_mesh(3.0, &[HoleBox::new(0.0, 1.0, 2.0, 2.0)], 1);
        assert!(matches!(touching, Err(Error::InvalidDomain(_))));
        let overlap = generate_square_hole_mesh(
            4.0,
            &[
                HoleBox::new(1.0, 1.0, 2.0, 2.0),
                HoleBox::new(2.0, 1.0, 3.0, 2.0),
            ],
            1,
        );
        assert!(matches!(overlap, Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn domain_from_boxes_counts_holes() {
        let d = Domain::square_with_boxes(3.0, &[HoleBox::new(1.0, 1.0, 2.0, 2.0)]);
        assert_eq!(d.n_holes(), 1);
        assert_eq!(d.outer.len(), 4);
    }
}
