//! Three-element macroelement patches.
//!
//! Local numbering follows one convention everywhere:
//!
//! * Type 1 (closed fan around an interior vertex): outer vertices
//!   `P1 = △1∩△3`, `P2 = △1∩△2`, `P3 = △2∩△3`, central vertex `P4`, then the
//!   element constants of △1, △2, △3.
//! * Type 2 and 3 (open fan of three elements around `P5`, △2 in the middle):
//!   `P1` is the vertex of △1 off the shared edge, `P2 = △1∩△2`,
//!   `P3 = △2∩△3`, `P4` the vertex of △3 off the shared edge, then the
//!   element constants. Type 3 has a single constant on △1∪△2.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{triangle_geometry, Mesh, Point2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatchClass {
    Type1,
    Type2,
    Type3,
}

impl PatchClass {
    pub fn number(self) -> u8 {
        match self {
            PatchClass::Type1 => 1,
            PatchClass::Type2 => 2,
            PatchClass::Type3 => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(PatchClass::Type1),
            2 => Ok(PatchClass::Type2),
            3 => Ok(PatchClass::Type3),
            _ => Err(Error::InvalidArgument(format!("patch class must be 1, 2 or 3, got {n}"))),
        }
    }
}

impl FromStr for PatchClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n: u8 = s.trim_start_matches("type").parse().map_err(|_| Error::InvalidArgument(format!("bad patch class '{s}'")))?;
        Self::from_number(n)
    }
}

impl fmt::Display for PatchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type{}", self.number())
    }
}

/// A quadratic node of a patch in terms of local vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalNode {
    Vertex(usize),
    /// Midpoint of the edge between two local vertices (smaller index first).
    Midpoint(usize, usize),
}

impl LocalNode {
    pub fn midpoint(a: usize, b: usize) -> Self {
        LocalNode::Midpoint(a.min(b), a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub class: PatchClass,
    /// Mesh element ids in the order △1, △2, △3.
    pub elements: [usize; 3],
    /// Mesh vertex ids in local pressure-vertex order.
    pub mesh_vertices: Vec<usize>,
    /// Local vertex coordinates.
    pub points: Vec<Point2>,
    /// Local vertex indices of each element, counter-clockwise.
    pub triangles: [[usize; 3]; 3],
    /// Velocity nodes strictly inside the patch.
    pub interior: Vec<LocalNode>,
    /// Mesh quadratic node ids of `interior`.
    pub interior_mesh_nodes: Vec<usize>,
}

impl Patch {
    /// Builds a patch of the given class from three mesh elements listed as
    /// △1, △2, △3.
    pub fn from_mesh(mesh: &Mesh, elements: [usize; 3], class: PatchClass) -> Result<Patch> {
        let [e1, e2, e3] = elements;
        if let Some(&bad) = elements.iter().find(|&&e| e >= mesh.num_triangles()) {
            return Err(Error::InvalidArgument(format!("element {bad} does not exist")));
        }
        if e1 == e2 || e2 == e3 || e1 == e3 {
            return Err(Error::InvalidArgument("patch elements must be distinct".into()));
        }
        let tv = |e: usize| mesh.triangles()[e].v;
        let shared = |a: usize, b: usize| -> Vec<usize> { tv(a).iter().copied().filter(|v| tv(b).contains(v)).collect() };
        let adj12 = mesh.are_adjacent(e1, e2);
        let adj23 = mesh.are_adjacent(e2, e3);
        let adj13 = mesh.are_adjacent(e1, e3);
        let other = |e: usize, not: &[usize]| tv(e).iter().copied().find(|v| !not.contains(v)).unwrap();

        let (mesh_vertices, interior) = match class {
            PatchClass::Type1 => {
                if !(adj12 && adj23 && adj13) {
                    return Err(Error::InvalidArgument("type 1 patch needs three mutually adjacent elements".into()));
                }
                let common: Vec<usize> = shared(e1, e2).into_iter().filter(|v| tv(e3).contains(v)).collect();
                if common.len() != 1 {
                    return Err(Error::InvalidArgument("type 1 elements do not surround a single vertex".into()));
                }
                let c = common[0];
                let o1 = other(e1, &[c, other_shared(&shared(e1, e2), c)]);
                let o2 = other_shared(&shared(e1, e2), c);
                let o3 = other_shared(&shared(e2, e3), c);
                if o1 != other_shared(&shared(e1, e3), c) {
                    return Err(Error::InvalidArgument("type 1 elements are not a closed fan".into()));
                }
                let interior = vec![
                    LocalNode::Vertex(3),
                    LocalNode::midpoint(0, 3),
                    LocalNode::midpoint(1, 3),
                    LocalNode::midpoint(2, 3),
                ];
                (vec![o1, o2, o3, c], interior)
            }
            PatchClass::Type2 | PatchClass::Type3 => {
                if !(adj12 && adj23) || adj13 {
                    return Err(Error::InvalidArgument(
                        "strip patch needs △2 adjacent to △1 and △3, which must not be adjacent".into(),
                    ));
                }
                let s12 = shared(e1, e2);
                let s23 = shared(e2, e3);
                let p5 = *s12.iter().find(|v| s23.contains(v)).ok_or_else(|| {
                    Error::InvalidArgument("shared edges of △2 have no common vertex".into())
                })?;
                let p2 = other_shared(&s12, p5);
                let p3 = other_shared(&s23, p5);
                let p1 = other(e1, &[p2, p5]);
                let p4 = other(e3, &[p3, p5]);
                if class == PatchClass::Type3 && mesh.triangles()[e1].boundary_edge_count != 2 {
                    return Err(Error::InvalidArgument("type 3 patch needs △1 with two boundary sides".into()));
                }
                (vec![p1, p2, p3, p4, p5], vec![LocalNode::midpoint(1, 4), LocalNode::midpoint(2, 4)])
            }
        };

        let local = |v: usize| mesh_vertices.iter().position(|&m| m == v).unwrap();
        let triangles = elements.map(|e| tv(e).map(local));
        let points = mesh_vertices.iter().map(|&v| mesh.vertices()[v]).collect();
        let interior_mesh_nodes = interior
            .iter()
            .map(|n| match *n {
                LocalNode::Vertex(a) => mesh_vertices[a],
                LocalNode::Midpoint(a, b) => {
                    let (va, vb) = (mesh_vertices[a], mesh_vertices[b]);
                    let key = [va.min(vb), va.max(vb)];
                    mesh.edges().iter().find(|e| e.v == key).map(|e| e.midpoint).unwrap()
                }
            })
            .collect();
        Ok(Patch { class, elements, mesh_vertices, points, triangles, interior, interior_mesh_nodes })
    }

    /// Determines the class of three mesh elements and returns them as a
    /// patch in canonical △1, △2, △3 order.
    pub fn classify(mesh: &Mesh, elements: [usize; 3]) -> Result<Patch> {
        let [a, b, c] = elements;
        let adj = |x, y| mesh.are_adjacent(x, y);
        match (adj(a, b), adj(b, c), adj(a, c)) {
            (true, true, true) => Patch::from_mesh(mesh, elements, PatchClass::Type1),
            (ab, bc, ac) if [ab, bc, ac].iter().filter(|&&x| x).count() == 2 => {
                let (e1, e2, e3) = if !ac {
                    (a, b, c)
                } else if !bc {
                    (b, a, c)
                } else {
                    (a, c, b)
                };
                let corner = |e: usize| mesh.triangles()[e].boundary_edge_count == 2;
                if corner(e1) {
                    Patch::from_mesh(mesh, [e1, e2, e3], PatchClass::Type3)
                } else if corner(e3) {
                    Patch::from_mesh(mesh, [e3, e2, e1], PatchClass::Type3)
                } else {
                    Patch::from_mesh(mesh, [e1, e2, e3], PatchClass::Type2)
                }
            }
            _ => Err(Error::InvalidArgument("elements are not edge-connected".into())),
        }
    }

    /// A standalone patch built from local vertex coordinates in pressure
    /// order: `[P1, P2, P3, P4]` for type 1 (P4 central) or `[P1, ..., P5]`
    /// for types 2 and 3 (P5 the common vertex).
    pub fn from_points(points: &[Point2], class: PatchClass) -> Result<Patch> {
        let tris = match (class, points.len()) {
            (PatchClass::Type1, 4) => vec![[3, 0, 1], [3, 1, 2], [3, 2, 0]],
            (PatchClass::Type2 | PatchClass::Type3, 5) => vec![[4, 0, 1], [4, 1, 2], [4, 2, 3]],
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "{class} patch cannot be built from {} points",
                    points.len()
                )))
            }
        };
        let mesh = Mesh::new(points.to_vec(), tris)?;
        Patch::from_mesh(&mesh, [0, 1, 2], class)
    }

    /// Applies an orientation-preserving map to the patch geometry.
    pub fn transformed(&self, f: impl Fn(Point2) -> Point2) -> Result<Patch> {
        let mut out = self.clone();
        out.points = self.points.iter().map(|&p| f(p)).collect();
        for t in &out.triangles {
            let g = triangle_geometry(&t.map(|v| out.points[v]))?;
            if g.area <= 0.0 {
                return Err(Error::InvalidArgument("transformation reverses orientation".into()));
            }
        }
        Ok(out)
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    /// Number of pressure unknowns (vertex values then element constants).
    pub fn num_pressure(&self) -> usize {
        match self.class {
            PatchClass::Type1 => 7,
            PatchClass::Type2 => 8,
            PatchClass::Type3 => 7,
        }
    }

    /// Pressure column of the constant on element `k` (0-based △ index).
    pub fn constant_dof(&self, k: usize) -> usize {
        let nv = self.num_vertices();
        match self.class {
            PatchClass::Type3 => nv + usize::from(k == 2),
            _ => nv + k,
        }
    }

    pub fn element_points(&self, k: usize) -> [Point2; 3] {
        self.triangles[k].map(|v| self.points[v])
    }

    pub fn area(&self, k: usize) -> f64 {
        triangle_geometry(&self.element_points(k)).map(|g| g.area).unwrap_or(0.0)
    }

    pub fn total_area(&self) -> f64 {
        (0..3).map(|k| self.area(k)).sum()
    }

    /// The six local nodes of element `k` in element order (vertices, then
    /// midpoints opposite each vertex).
    pub fn element_nodes(&self, k: usize) -> [LocalNode; 6] {
        let t = self.triangles[k];
        [
            LocalNode::Vertex(t[0]),
            LocalNode::Vertex(t[1]),
            LocalNode::Vertex(t[2]),
            LocalNode::midpoint(t[1], t[2]),
            LocalNode::midpoint(t[2], t[0]),
            LocalNode::midpoint(t[0], t[1]),
        ]
    }

    /// Largest shape ratio among the three elements.
    pub fn regularity_ratio(&self) -> f64 {
        (0..3).map(|k| super::shape_ratio(&self.element_points(k))).fold(0.0, f64::max)
    }
}

fn other_shared(pair: &[usize], not: usize) -> usize {
    *pair.iter().find(|&&v| v != not).unwrap()
}

/// Chooses the macroelement patch used to analyse element `t`.
///
/// Elements with at most one boundary side sit as △2 of a type 2 patch whose
/// outer elements are the lexicographically smallest non-adjacent pair of
/// neighbours; when every pair is adjacent a type 1 patch is returned.
/// Elements with two boundary sides become △1 of a type 3 patch.
pub fn extract_patch(mesh: &Mesh, t: usize) -> Result<Patch> {
    if t >= mesh.num_triangles() {
        return Err(Error::InvalidArgument(format!("element {t} does not exist")));
    }
    let unavailable = |reason: &str| Error::PatchUnavailable { element: t, reason: reason.to_string() };
    let neighbors = mesh.neighbors(t);
    match mesh.triangles()[t].boundary_edge_count {
        2 => {
            let n = neighbors[0];
            let third = mesh
                .neighbors(n)
                .into_iter()
                .find(|&o| o != t)
                .ok_or_else(|| unavailable("the neighbour of the corner element has no other neighbour"))?;
            Patch::from_mesh(mesh, [t, n, third], PatchClass::Type3)
        }
        3 => Err(unavailable("element has three boundary sides")),
        _ => {
            if neighbors.len() < 2 {
                return Err(unavailable("fewer than two neighbours"));
            }
            let mut first_pair = None;
            for i in 0..neighbors.len() {
                for j in i + 1..neighbors.len() {
                    let (a, b) = (neighbors[i], neighbors[j]);
                    if !mesh.are_adjacent(a, b) {
                        return Patch::from_mesh(mesh, [a, t, b], PatchClass::Type2);
                    }
                    first_pair.get_or_insert((a, b));
                }
            }
            let (a, b) = first_pair.unwrap();
            Patch::from_mesh(mesh, [t, a, b], PatchClass::Type1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured, Pattern};

    fn fan3() -> Mesh {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(-0.5, 0.9),
            Point2::new(-0.6, -0.8),
        ];
        Mesh::new(pts, vec![[0, 1, 2], [0, 2, 3], [0, 3, 1]]).unwrap()
    }

    #[test]
    fn closed_fan_is_type1() {
        let m = fan3();
        let p = extract_patch(&m, 0).unwrap();
        assert_eq!(p.class, PatchClass::Type1);
        assert_eq!(p.interior.len(), 4);
        assert_eq!(p.mesh_vertices[3], 0);
        assert_eq!(p.interior_mesh_nodes[0], 0);
        for n in &p.interior_mesh_nodes[1..] {
            assert!(*n >= m.num_vertices());
            assert!(!m.is_boundary_node(*n));
        }
    }

    #[test]
    fn interior_element_is_type2() {
        let m = generate_structured(8, Pattern::Right).unwrap();
        let t = (0..m.num_triangles()).find(|&t| m.triangles()[t].boundary_edge_count == 0).unwrap();
        let p = extract_patch(&m, t).unwrap();
        assert_eq!(p.class, PatchClass::Type2);
        assert_eq!(p.elements[1], t);
        assert_eq!(p.interior.len(), 2);
        // the two interior nodes are the midpoints of the edges △2 shares
        for n in &p.interior_mesh_nodes {
            let e = &m.edges()[n - m.num_vertices()];
            assert!(e.triangles.contains(&t));
        }
    }

    #[test]
    fn corner_element_is_type3() {
        let m = generate_structured(4, Pattern::Right).unwrap();
        for t in crate::mesh::corner_elements(&m).unwrap() {
            let p = extract_patch(&m, t).unwrap();
            assert_eq!(p.class, PatchClass::Type3);
            assert_eq!(p.elements[0], t);
            assert_eq!(p.num_pressure(), 7);
        }
    }

    #[test]
    fn classify_matches_extraction() {
        let m = generate_structured(5, Pattern::Left).unwrap();
        let corners = crate::mesh::corner_elements(&m).unwrap();
        for t in 0..m.num_triangles() {
            let p = extract_patch(&m, t).unwrap();
            // classification prefers type 3 whenever a domain corner sits at an end
            if p.class == PatchClass::Type2 && p.elements.iter().any(|e| corners.contains(e)) {
                continue;
            }
            let q = Patch::classify(&m, [p.elements[2], p.elements[0], p.elements[1]]).unwrap();
            assert_eq!(p.class, q.class);
        }
    }

    #[test]
    fn from_points_orders_vertices() {
        let pts = [
            Point2::new(1.0, 0.0),
            Point2::new(0.7, 0.7),
            Point2::new(-0.7, 0.7),
            Point2::new(-1.0, 0.0),
            Point2::new(0.0, 0.0),
        ];
        let p = Patch::from_points(&pts, PatchClass::Type2).unwrap();
        assert_eq!(p.points, pts.to_vec());
        assert!((p.total_area() - (0.35 + 0.49 + 0.35)).abs() < 1e-14);
    }

    #[test]
    fn isolated_element_has_no_patch() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 1.0)];
        let m = Mesh::new(pts, vec![[0, 1, 2], [1, 3, 2]]).unwrap();
        assert!(matches!(extract_patch(&m, 0), Err(Error::PatchUnavailable { .. })));
    }
}
