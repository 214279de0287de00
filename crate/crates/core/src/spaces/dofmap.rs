use super::PressureSpaceKind;
use crate::mesh::{corner_elements, Mesh};
use crate::{Error, Result};

/// How pressure unknowns collapse into solver columns.
///
/// Every full pressure dof maps to a *merged* column (tied constants share
/// the column of their master). Pinned merged columns are removed from the
/// solve and carry a prescribed value.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureLayout {
    pub full_to_merged: Vec<usize>,
    pub num_merged: usize,
    /// `(merged column, value)`, sorted by column.
    pub pins: Vec<(usize, f64)>,
}

impl PressureLayout {
    /// Position of each merged column among the unpinned ones.
    pub fn free_index(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.num_merged];
        let mut next = 0;
        for (c, slot) in out.iter_mut().enumerate() {
            if self.pins.binary_search_by_key(&c, |p| p.0).is_err() {
                *slot = Some(next);
                next += 1;
            }
        }
        out
    }

    pub fn num_free(&self) -> usize {
        self.num_merged - self.pins.len()
    }

    /// Expands merged-column values back to full pressure coefficients.
    pub fn expand(&self, merged: &[f64]) -> Vec<f64> {
        self.full_to_merged.iter().map(|&c| merged[c]).collect()
    }
}

/// Velocity and pressure numbering on a mesh.
///
/// Velocity dof of quadratic node `k`, component `c` is `2k + c`. Pressure
/// dofs are the vertex values `0..V`, followed for the LC kinds by one
/// constant per element (`V + e`).
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub kind: PressureSpaceKind,
    pub enclosed: bool,
    num_nodes: usize,
    num_vertices: usize,
    num_elements: usize,
    velocity_boundary: Vec<bool>,
    /// `(pressure dof, value)`.
    pins: Vec<(usize, f64)>,
    /// `(slave constant dof, master constant dof)`.
    ties: Vec<(usize, usize)>,
    corners: Vec<usize>,
}

/// Numbers the unknowns of `mesh` for the given pressure space.
///
/// In enclosed mode one vertex pressure is pinned to zero and, for the LC
/// kinds, one element constant as well; the pinned dofs avoid corner
/// elements and their neighbours. `LcTied` ties the constant of each element with
/// two boundary sides to the constant of its single neighbour.
pub fn build_dof_map(mesh: &Mesh, kind: PressureSpaceKind, enclosed: bool) -> Result<DofMap> {
    let corners = corner_elements(mesh)?;
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();

    let mut velocity_boundary = vec![false; 2 * mesh.num_nodes()];
    for node in 0..mesh.num_nodes() {
        if mesh.is_boundary_node(node) {
            velocity_boundary[2 * node] = true;
            velocity_boundary[2 * node + 1] = true;
        }
    }

    let mut ties = Vec::new();
    if kind == PressureSpaceKind::LcTied {
        let mut masters: Vec<usize> = Vec::new();
        for &c in &corners {
            let n = mesh.neighbors(c)[0];
            if corners.contains(&n) {
                return Err(Error::UnsupportedGrid(format!(
                    "corner element {c} borders corner element {n}; its constant cannot be tied"
                )));
            }
            if masters.contains(&n) {
                return Err(Error::UnsupportedGrid(format!(
                    "two elements with two boundary sides share the neighbour {n}"
                )));
            }
            masters.push(n);
            ties.push((nv + c, nv + n));
        }
    }

    let mut pins = Vec::new();
    if enclosed {
        let in_corner = |v: usize| corners.iter().any(|&c| mesh.triangles()[c].v.contains(&v));
        let vertex = (0..nv).find(|&v| !in_corner(v)).unwrap_or(0);
        pins.push((vertex, 0.0));
        if kind.has_constants() {
            let near_corner = |e: usize| corners.contains(&e) || corners.iter().any(|&c| mesh.are_adjacent(c, e));
            let element = (0..nt).find(|&e| !near_corner(e)).ok_or_else(|| {
                Error::UnsupportedGrid("no element constant available to pin".into())
            })?;
            pins.push((nv + element, 0.0));
        }
    }

    Ok(DofMap {
        kind,
        enclosed,
        num_nodes: mesh.num_nodes(),
        num_vertices: nv,
        num_elements: nt,
        velocity_boundary,
        pins,
        ties,
        corners,
    })
}

impl DofMap {
    pub fn num_velocity(&self) -> usize {
        2 * self.num_nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_pressure(&self) -> usize {
        if self.kind.has_constants() {
            self.num_vertices + self.num_elements
        } else {
            self.num_vertices
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn velocity_dof(&self, node: usize, component: usize) -> usize {
        2 * node + component
    }

    pub fn is_boundary_velocity(&self, dof: usize) -> bool {
        self.velocity_boundary[dof]
    }

    pub fn vertex_pressure_dof(&self, vertex: usize) -> usize {
        vertex
    }

    /// Pressure dof of the constant on element `e`, if the space has one.
    pub fn constant_dof(&self, e: usize) -> Option<usize> {
        self.kind.has_constants().then_some(self.num_vertices + e)
    }

    /// Local-to-global pressure dofs of element `e` in local order
    /// (`L1, L2, L3[, 1]`).
    pub fn element_pressure_dofs(&self, mesh: &Mesh, e: usize) -> Vec<usize> {
        let mut dofs: Vec<usize> = mesh.triangles()[e].v.to_vec();
        dofs.extend(self.constant_dof(e));
        dofs
    }

    pub fn pins(&self) -> &[(usize, f64)] {
        &self.pins
    }

    pub fn ties(&self) -> &[(usize, usize)] {
        &self.ties
    }

    /// Elements with two boundary sides.
    pub fn corner_elements(&self) -> &[usize] {
        &self.corners
    }

    /// Pins the constant of every corner element to zero, the alternative to
    /// tying for plain LC.
    pub fn pin_corner_constants(&mut self) -> Result<()> {
        if self.kind != PressureSpaceKind::Lc {
            return Err(Error::InvalidArgument("corner constants can only be pinned for the LC space".into()));
        }
        for &c in &self.corners {
            let dof = self.num_vertices + c;
            if self.pins.iter().any(|&(d, _)| d == dof) {
                continue;
            }
            self.pins.push((dof, 0.0));
        }
        self.pins.sort_by_key(|p| p.0);
        Ok(())
    }

    pub fn pressure_layout(&self) -> PressureLayout {
        let n = self.num_pressure();
        let mut master_of: Vec<usize> = (0..n).collect();
        for &(slave, master) in &self.ties {
            master_of[slave] = master;
        }
        let mut merged_of = vec![usize::MAX; n];
        let mut next = 0;
        for d in 0..n {
            if master_of[d] == d {
                merged_of[d] = next;
                next += 1;
            }
        }
        let full_to_merged: Vec<usize> = (0..n).map(|d| merged_of[master_of[d]]).collect();
        let mut pins: Vec<(usize, f64)> = self.pins.iter().map(|&(d, v)| (full_to_merged[d], v)).collect();
        pins.sort_by_key(|p| p.0);
        PressureLayout { full_to_merged, num_merged: next, pins }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_into_corners, generate_structured, Pattern};

    #[test]
    fn taylor_hood_counts() {
        let m = generate_structured(4, Pattern::Right).unwrap();
        let d = build_dof_map(&m, PressureSpaceKind::TaylorHood, true).unwrap();
        assert_eq!(d.num_velocity(), 162);
        assert_eq!(d.num_pressure(), 25);
        assert_eq!(d.pins().len(), 1);
    }

    #[test]
    fn lc_counts() {
        let m = generate_structured(4, Pattern::Right).unwrap();
        let d = build_dof_map(&m, PressureSpaceKind::Lc, true).unwrap();
        assert_eq!(d.num_pressure(), 57);
        assert_eq!(d.pins().len(), 2);
        assert!(d.ties().is_empty());
    }

    #[test]
    fn tied_corners() {
        let m = generate_structured(4, Pattern::Right).unwrap();
        let d = build_dof_map(&m, PressureSpaceKind::LcTied, true).unwrap();
        assert_eq!(d.ties().len(), 2);
        let layout = d.pressure_layout();
        assert_eq!(layout.num_merged, 57 - 2);
        for &(slave, master) in d.ties() {
            assert_eq!(layout.full_to_merged[slave], layout.full_to_merged[master]);
            assert!(d.pins().iter().all(|&(p, _)| p != slave && p != master));
        }
    }

    #[test]
    fn pins_avoid_corner_elements() {
        let m = generate_structured(4, Pattern::Left).unwrap();
        let d = build_dof_map(&m, PressureSpaceKind::Lc, true).unwrap();
        for &c in d.corner_elements() {
            for &(p, _) in d.pins() {
                assert!(!m.triangles()[c].v.contains(&p));
                assert_ne!(p, m.num_vertices() + c);
            }
        }
    }

    #[test]
    fn free_layout_is_a_bijection() {
        let m = generate_into_corners(3, Pattern::Right).unwrap();
        let d = build_dof_map(&m, PressureSpaceKind::Lc, true).unwrap();
        let layout = d.pressure_layout();
        let free: Vec<usize> = layout.free_index().into_iter().flatten().collect();
        assert_eq!(free, (0..layout.num_free()).collect::<Vec<_>>());
    }

    #[test]
    fn unenclosed_has_no_pins() {
        let m = generate_structured(4, Pattern::Right).unwrap();
        let mut d = build_dof_map(&m, PressureSpaceKind::Lc, false).unwrap();
        assert!(d.pins().is_empty());
        d.pin_corner_constants().unwrap();
        assert_eq!(d.pins().len(), 2);
    }

    #[test]
    fn tie_to_corner_neighbour_is_unsupported() {
        // two triangles, both with two boundary sides
        let pts = vec![
            crate::mesh::Point2::new(0.0, 0.0),
            crate::mesh::Point2::new(1.0, 0.0),
            crate::mesh::Point2::new(1.0, 1.0),
            crate::mesh::Point2::new(0.0, 1.0),
        ];
        let m = Mesh::new(pts, vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        assert!(matches!(build_dof_map(&m, PressureSpaceKind::LcTied, true), Err(Error::UnsupportedGrid(_))));
    }
}
