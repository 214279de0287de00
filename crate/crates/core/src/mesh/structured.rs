use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Mesh, Point2};
use crate::{Error, Result};

/// Diagonal direction of the cells of a structured grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// Lower-left to upper-right.
    #[default]
    Right,
    /// Upper-left to lower-right.
    Left,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Pattern::Right),
            "left" => Ok(Pattern::Left),
            _ => Err(Error::InvalidArgument(format!("unknown pattern '{s}' (expected right|left)"))),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Right => "right",
            Pattern::Left => "left",
        })
    }
}

/// Uniform `n x n` triangulation of the unit square with every cell cut by the
/// same diagonal.
///
/// With a single diagonal direction two of the four corner cells produce an
/// element with two boundary sides.
pub fn generate_structured(n: usize, pattern: Pattern) -> Result<Mesh> {
    build(n, |_, _| pattern)
}

/// Like [`generate_structured`], but the four corner cells are cut by the
/// diagonal through the domain corner, so no element has two boundary sides.
pub fn generate_into_corners(n: usize, pattern: Pattern) -> Result<Mesh> {
    build(n, |i, j| {
        let last = n - 1;
        match (i, j) {
            (0, 0) => Pattern::Right,
            (i, 0) if i == last => Pattern::Left,
            (0, j) if j == last => Pattern::Left,
            (i, j) if i == last && j == last => Pattern::Right,
            _ => pattern,
        }
    })
}

fn build(n: usize, cell_pattern: impl Fn(usize, usize) -> Pattern) -> Result<Mesh> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("grid needs at least 2 cells per side, got {n}")));
    }
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // exact 1.0 on the far sides
            let x = if i == n { 1.0 } else { i as f64 * h };
            let y = if j == n { 1.0 } else { j as f64 * h };
            vertices.push(Point2::new(x, y));
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            match cell_pattern(i, j) {
                Pattern::Right => {
                    triangles.push([a, b, c]);
                    triangles.push([a, c, d]);
                }
                Pattern::Left => {
                    triangles.push([a, b, d]);
                    triangles.push([b, c, d]);
                }
            }
        }
    }
    Mesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{corner_elements, regularity_ratio};

    #[test]
    fn counts_for_four_by_four() {
        let m = generate_structured(4, Pattern::Right).unwrap();
        assert_eq!(m.num_triangles(), 32);
        assert_eq!(m.num_vertices(), 25);
        assert_eq!(m.num_edges(), 56);
    }

    #[test]
    fn two_by_two_areas() {
        let m = generate_structured(2, Pattern::Right).unwrap();
        for t in m.triangles() {
            assert!((t.area - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn too_small_grid_is_rejected() {
        assert!(matches!(generate_structured(1, Pattern::Right), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn corner_elements_by_pattern() {
        // right pattern: bottom-right and top-left corner cells
        let m = generate_structured(4, Pattern::Right).unwrap();
        let corners = corner_elements(&m).unwrap();
        assert_eq!(corners.len(), 2);
        let c: Vec<_> = corners.iter().map(|&t| m.centroid(t)).collect();
        assert!(c[0].x > 0.75 && c[0].y < 0.25);
        assert!(c[1].x < 0.25 && c[1].y > 0.75);

        let m = generate_structured(4, Pattern::Left).unwrap();
        assert_eq!(corner_elements(&m).unwrap().len(), 2);

        for pattern in [Pattern::Right, Pattern::Left] {
            for n in 2..6 {
                let m = generate_into_corners(n, pattern).unwrap();
                assert!(corner_elements(&m).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn euler_and_area() {
        for n in [2, 3, 4, 7, 16] {
            for m in [generate_structured(n, Pattern::Left).unwrap(), generate_into_corners(n, Pattern::Right).unwrap()] {
                let euler = m.num_vertices() as i64 - m.num_edges() as i64 + m.num_triangles() as i64;
                assert_eq!(euler, 1);
                assert!((m.total_area() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn regularity_independent_of_n() {
        let r4 = regularity_ratio(&generate_structured(4, Pattern::Right).unwrap());
        let r16 = regularity_ratio(&generate_structured(16, Pattern::Right).unwrap());
        assert!((r4 - r16).abs() < 1e-12 * r4);
    }
}
