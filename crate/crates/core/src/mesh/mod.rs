//! Triangulations, element geometry and macroelement patches.

mod io;
mod patch;
mod structured;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use io::{parse_mesh, read_mesh, write_mesh};
pub use patch::{extract_patch, LocalNode, Patch, PatchClass};
pub use structured::{generate_into_corners, generate_structured, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

/// Signed area and edge-normal vectors of a triangle.
///
/// `b[j] = (y[j+1] - y[j+2], x[j+2] - x[j+1])` with indices taken cyclically,
/// so that on a counter-clockwise triangle `grad L_j = b[j] / (2 area)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    pub area: f64,
    pub b: [[f64; 2]; 3],
}

/// Computes the signed area and b-vectors of the triangle `p`.
///
/// Fails with [`Error::DegenerateTriangle`] when the vertices are collinear
/// relative to the square of the longest side.
pub fn triangle_geometry(p: &[Point2; 3]) -> Result<TriangleGeometry> {
    let twice_area = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    let longest = (0..3)
        .map(|j| p[j].distance(&p[(j + 1) % 3]))
        .fold(0.0_f64, f64::max);
    if !twice_area.is_finite() || twice_area.abs() <= 1e-12 * longest * longest {
        return Err(Error::DegenerateTriangle([0, 1, 2]));
    }
    let mut b = [[0.0; 2]; 3];
    for (j, bj) in b.iter_mut().enumerate() {
        let p1 = p[(j + 1) % 3];
        let p2 = p[(j + 2) % 3];
        *bj = [p1.y - p2.y, p2.x - p1.x];
    }
    Ok(TriangleGeometry { area: 0.5 * twice_area, b })
}

/// Longest side over inscribed-circle diameter.
pub fn shape_ratio(p: &[Point2; 3]) -> f64 {
    let sides = [p[1].distance(&p[2]), p[2].distance(&p[0]), p[0].distance(&p[1])];
    let perimeter: f64 = sides.iter().sum();
    let twice_area = ((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y)).abs();
    // inradius = area / semi-perimeter, so the diameter is 4 area / perimeter
    let rho = 2.0 * twice_area / perimeter;
    sides.iter().cloned().fold(0.0, f64::max) / rho
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    /// Vertex ids, counter-clockwise.
    pub v: [usize; 3],
    pub area: f64,
    pub b: [[f64; 2]; 3],
    /// `edges[j]` is the edge opposite local vertex `j`.
    pub edges: [usize; 3],
    pub boundary_edge_count: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub v: [usize; 2],
    /// One entry for boundary edges, two for interior ones.
    pub triangles: Vec<usize>,
    /// P2 node id of the edge midpoint (`num_vertices + edge id`).
    pub midpoint: usize,
    pub boundary: bool,
}

/// A conforming triangulation with derived edges and boundary flags.
///
/// Quadratic nodes are numbered vertices first (`0..V`), then edge midpoints
/// (`V..V+E`) in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point2>,
    vertex_boundary: Vec<bool>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
}

impl Mesh {
    /// Builds a mesh from vertex coordinates and triangle connectivity.
    ///
    /// Clockwise triangles are reordered. Boundary edges are those used by a
    /// single triangle; a vertex is on the boundary when it touches one.
    pub fn new(vertices: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        Self::with_boundary_flags(vertices, triangles, None)
    }

    /// Like [`Mesh::new`], additionally marking the given vertices as boundary.
    pub fn with_boundary_flags(
        vertices: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        flags: Option<Vec<bool>>,
    ) -> Result<Mesh> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if let Some(p) = vertices.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidMesh(format!("vertex {p} has non-finite coordinates")));
        }
        let nv = vertices.len();
        let mut tris = Vec::with_capacity(triangles.len());
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();

        for (t, &conn) in triangles.iter().enumerate() {
            if let Some(&bad) = conn.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("triangle {t} references vertex {bad} (only {nv} vertices)")));
            }
            if conn[0] == conn[1] || conn[1] == conn[2] || conn[0] == conn[2] {
                return Err(Error::DegenerateTriangle(conn));
            }
            let mut v = conn;
            let pts = [vertices[v[0]], vertices[v[1]], vertices[v[2]]];
            let mut geo = triangle_geometry(&pts).map_err(|_| Error::DegenerateTriangle(conn))?;
            if geo.area < 0.0 {
                v.swap(1, 2);
                geo = triangle_geometry(&[vertices[v[0]], vertices[v[1]], vertices[v[2]]])?;
            }
            let mut tri_edges = [0; 3];
            for j in 0..3 {
                let a = v[(j + 1) % 3];
                let b = v[(j + 2) % 3];
                let key = (a.min(b), a.max(b));
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(Edge { v: [key.0, key.1], triangles: Vec::new(), midpoint: 0, boundary: false });
                    edges.len() - 1
                });
                if edges[id].triangles.len() == 2 {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) is shared by more than two triangles",
                        key.0, key.1
                    )));
                }
                edges[id].triangles.push(t);
                tri_edges[j] = id;
            }
            tris.push(Triangle { v, area: geo.area, b: geo.b, edges: tri_edges, boundary_edge_count: 0 });
        }

        let mut vertex_boundary = flags.unwrap_or_else(|| vec![false; nv]);
        if vertex_boundary.len() != nv {
            return Err(Error::InvalidMesh("boundary flag count differs from vertex count".into()));
        }
        for (id, e) in edges.iter_mut().enumerate() {
            e.midpoint = nv + id;
            e.boundary = e.triangles.len() == 1;
            if e.boundary {
                vertex_boundary[e.v[0]] = true;
                vertex_boundary[e.v[1]] = true;
            }
        }
        for t in tris.iter_mut() {
            t.boundary_edge_count = t.edges.iter().filter(|&&e| edges[e].boundary).count() as u8;
        }
        Ok(Mesh { vertices, vertex_boundary, triangles: tris, edges })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of quadratic nodes (vertices plus edge midpoints).
    pub fn num_nodes(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_boundary[v]
    }

    /// Whether quadratic node `node` lies on the boundary.
    pub fn is_boundary_node(&self, node: usize) -> bool {
        if node < self.vertices.len() {
            self.vertex_boundary[node]
        } else {
            self.edges[node - self.vertices.len()].boundary
        }
    }

    /// Coordinates of quadratic node `node`.
    pub fn node_position(&self, node: usize) -> Point2 {
        let nv = self.vertices.len();
        if node < nv {
            self.vertices[node]
        } else {
            let e = &self.edges[node - nv];
            self.vertices[e.v[0]].midpoint(&self.vertices[e.v[1]])
        }
    }

    /// Six quadratic node ids of a triangle: vertices, then midpoints opposite
    /// each vertex.
    pub fn element_nodes(&self, t: usize) -> [usize; 6] {
        let tri = &self.triangles[t];
        [
            tri.v[0],
            tri.v[1],
            tri.v[2],
            self.edges[tri.edges[0]].midpoint,
            self.edges[tri.edges[1]].midpoint,
            self.edges[tri.edges[2]].midpoint,
        ]
    }

    pub fn triangle_points(&self, t: usize) -> [Point2; 3] {
        let v = self.triangles[t].v;
        [self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]]]
    }

    pub fn centroid(&self, t: usize) -> Point2 {
        let p = self.triangle_points(t);
        Point2::new((p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0)
    }

    /// Triangles sharing an edge with `t`, in increasing id order.
    pub fn neighbors(&self, t: usize) -> Vec<usize> {
        let mut n: Vec<usize> = self.triangles[t]
            .edges
            .iter()
            .flat_map(|&e| self.edges[e].triangles.iter().copied())
            .filter(|&o| o != t)
            .collect();
        n.sort_unstable();
        n
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.triangles[a].edges.iter().any(|e| self.triangles[b].edges.contains(e))
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| t.area).sum()
    }

    /// Applies `f` to every vertex, keeping the connectivity.
    pub fn map_vertices(&self, f: impl Fn(Point2) -> Point2) -> Result<Mesh> {
        let vertices = self.vertices.iter().map(|&p| f(p)).collect();
        let tris = self.triangles.iter().map(|t| t.v).collect();
        Mesh::with_boundary_flags(vertices, tris, Some(self.vertex_boundary.clone()))
    }
}

/// Largest `h / rho` over the mesh, where `h` is the longest side and `rho`
/// the diameter of the inscribed circle.
pub fn regularity_ratio(mesh: &Mesh) -> f64 {
    (0..mesh.num_triangles())
        .map(|t| shape_ratio(&mesh.triangle_points(t)))
        .fold(0.0, f64::max)
}

/// Elements with exactly two sides on the boundary.
pub fn corner_elements(mesh: &Mesh) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (id, t) in mesh.triangles().iter().enumerate() {
        match t.boundary_edge_count {
            3 => {
                return Err(Error::InvalidMesh(format!("element {id} has all three sides on the boundary")));
            }
            2 => out.push(id),
            _ => {}
        }
    }
    Ok(out)
}

/// Vertex of a corner element shared by its two boundary sides.
pub fn corner_vertex(mesh: &Mesh, t: usize) -> Option<usize> {
    let tri = &mesh.triangles()[t];
    if tri.boundary_edge_count != 2 {
        return None;
    }
    // the interior side is opposite the corner vertex
    (0..3).find(|&j| !mesh.edges()[tri.edges[j]].boundary).map(|j| tri.v[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> [Point2; 3] {
        [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)]
    }

    #[test]
    fn reference_triangle_geometry() {
        let g = triangle_geometry(&unit()).unwrap();
        assert_eq!(g.area, 0.5);
        assert_eq!(g.b, [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn scaled_triangle_doubles_b() {
        let p = unit().map(|p| Point2::new(2.0 * p.x, 2.0 * p.y));
        let g = triangle_geometry(&p).unwrap();
        assert_eq!(g.area, 2.0);
        assert_eq!(g.b, [[-2.0, -2.0], [2.0, 0.0], [0.0, 2.0]]);
    }

    #[test]
    fn b_vectors_sum_to_zero() {
        let p = [Point2::new(0.3, -1.2), Point2::new(2.7, 0.4), Point2::new(-0.5, 1.9)];
        let g = triangle_geometry(&p).unwrap();
        let s: [f64; 2] = [g.b[0][0] + g.b[1][0] + g.b[2][0], g.b[0][1] + g.b[1][1] + g.b[2][1]];
        assert!(s[0].abs() < 1e-15 && s[1].abs() < 1e-15);
    }

    #[test]
    fn collinear_is_degenerate() {
        let p = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0)];
        assert!(matches!(triangle_geometry(&p), Err(Error::DegenerateTriangle(_))));
    }

    #[test]
    fn shape_ratios() {
        let s2 = 2f64.sqrt();
        assert_relative_eq!(shape_ratio(&unit()), s2 / (2.0 - s2), max_relative = 1e-14);
        let eq = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.5, 3f64.sqrt() / 2.0)];
        assert_relative_eq!(shape_ratio(&eq), 3f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn clockwise_input_is_reordered() {
        let m = Mesh::new(unit().to_vec(), vec![[0, 2, 1]]).unwrap();
        assert!(m.triangles()[0].area > 0.0);
    }

    #[test]
    fn overshared_edge_is_rejected() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.0, -1.0),
            Point2::new(1.0, 1.0),
        ];
        let err = Mesh::new(pts, vec![[0, 1, 2], [0, 3, 1], [0, 1, 4]]).unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)));
    }

    #[test]
    fn single_triangle_has_no_valid_corner_list() {
        let m = Mesh::new(unit().to_vec(), vec![[0, 1, 2]]).unwrap();
        assert!(matches!(corner_elements(&m), Err(Error::InvalidMesh(_))));
    }
}
