//! Global saddle-point system `[A, -B; B^T, 0] [u; p] = [f; g]`.
//!
//! `A` is the viscous block and `B_ij = int div(phi_i) psi_j`. Pressure
//! columns live in the merged space of the dof map's [`PressureLayout`]:
//! tied constants share their master's column, pinned columns are kept and
//! removed only by the solver.

mod element;

pub use element::{element_divergence, element_load, element_pressure_mass, element_viscous, local_velocity};

use crate::linalg::CsrMatrix;
use crate::mesh::{Mesh, Point2, TriangleGeometry};
use crate::spaces::{DofMap, PressureLayout, PressureSpaceKind};
use crate::{Error, Result};

/// Discrete Stokes system before or after Dirichlet elimination.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub kind: PressureSpaceKind,
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub layout: PressureLayout,
    /// Global velocity dof of each row of `a` and `b`.
    pub velocity_dofs: Vec<usize>,
    /// Total number of velocity dofs on the mesh.
    pub num_velocity: usize,
    /// Eliminated `(dof, value)` pairs; empty before [`apply_dirichlet`].
    pub boundary_values: Vec<(usize, f64)>,
    pub reduced: bool,
}

/// Prescribed values for every boundary velocity dof.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    values: Vec<Option<f64>>,
}

impl BoundaryData {
    pub fn zero(dofmap: &DofMap) -> BoundaryData {
        BoundaryData::from_fn(dofmap, |_| 0.0)
    }

    /// Values given per boundary dof.
    pub fn from_fn(dofmap: &DofMap, mut value: impl FnMut(usize) -> f64) -> BoundaryData {
        let values = (0..dofmap.num_velocity()).map(|d| dofmap.is_boundary_velocity(d).then(|| value(d))).collect();
        BoundaryData { values }
    }

    /// Nodal values of a velocity field at the boundary nodes.
    pub fn from_field(mesh: &Mesh, dofmap: &DofMap, field: impl Fn(Point2) -> [f64; 2]) -> BoundaryData {
        BoundaryData::from_fn(dofmap, |d| field(mesh.node_position(d / 2))[d % 2])
    }

    /// Explicit per-dof values; `None` marks dofs without data.
    pub fn from_values(values: Vec<Option<f64>>) -> BoundaryData {
        BoundaryData { values }
    }

    pub fn get(&self, dof: usize) -> Option<f64> {
        self.values.get(dof).copied().flatten()
    }
}

fn geometry(mesh: &Mesh, t: usize) -> TriangleGeometry {
    let tri = &mesh.triangles()[t];
    TriangleGeometry { area: tri.area, b: tri.b }
}

fn global_velocity_dofs(mesh: &Mesh, t: usize) -> [usize; 12] {
    let nodes = mesh.element_nodes(t);
    let mut dofs = [0; 12];
    for (node, &g) in nodes.iter().enumerate() {
        for comp in 0..2 {
            dofs[local_velocity(node, comp)] = 2 * g + comp;
        }
    }
    dofs
}

fn check_kind(dofmap: &DofMap, kind: PressureSpaceKind) -> Result<()> {
    if dofmap.kind != kind {
        return Err(Error::InvalidArgument(format!(
            "dof map was built for {} but {} was requested",
            dofmap.kind, kind
        )));
    }
    Ok(())
}

/// Assembles the full system, boundary dofs included.
pub fn assemble(
    mesh: &Mesh,
    dofmap: &DofMap,
    kind: PressureSpaceKind,
    nu: f64,
    body_force: impl Fn(Point2) -> [f64; 2],
) -> Result<SaddleSystem> {
    check_kind(dofmap, kind)?;
    if dofmap.num_velocity() != 2 * mesh.num_nodes() {
        return Err(Error::InvalidArgument("dof map does not belong to this mesh".into()));
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidArgument(format!("viscosity must be positive, got {nu}")));
    }
    let layout = dofmap.pressure_layout();
    let nu_dofs = dofmap.num_velocity();
    let mut a_t = Vec::with_capacity(mesh.num_triangles() * 72);
    let mut b_t = Vec::with_capacity(mesh.num_triangles() * 48);
    let mut f = vec![0.0; nu_dofs];

    for t in 0..mesh.num_triangles() {
        let geo = geometry(mesh, t);
        let vdofs = global_velocity_dofs(mesh, t);
        let pdofs: Vec<usize> =
            dofmap.element_pressure_dofs(mesh, t).iter().map(|&d| layout.full_to_merged[d]).collect();
        let ke = element_viscous(&geo, nu);
        for i in 0..12 {
            for j in 0..12 {
                if ke[(i, j)] != 0.0 {
                    a_t.push((vdofs[i], vdofs[j], ke[(i, j)]));
                }
            }
        }
        let be = element_divergence(&geo, kind);
        for i in 0..12 {
            for (j, &pd) in pdofs.iter().enumerate() {
                b_t.push((vdofs[i], pd, be[(i, j)]));
            }
        }
        let pts = mesh.triangle_points(t);
        let fe = element_load(&geo, |l| {
            body_force(Point2::new(
                l[0] * pts[0].x + l[1] * pts[1].x + l[2] * pts[2].x,
                l[0] * pts[0].y + l[1] * pts[1].y + l[2] * pts[2].y,
            ))
        });
        for i in 0..12 {
            f[vdofs[i]] += fe[i];
        }
    }

    Ok(SaddleSystem {
        kind,
        a: CsrMatrix::from_triplets(nu_dofs, nu_dofs, a_t),
        b: CsrMatrix::from_triplets(nu_dofs, layout.num_merged, b_t),
        f,
        g: vec![0.0; layout.num_merged],
        layout,
        velocity_dofs: (0..nu_dofs).collect(),
        num_velocity: nu_dofs,
        boundary_values: Vec::new(),
        reduced: false,
    })
}

/// Eliminates the boundary velocity dofs, moving their contributions into
/// `f` and `g`.
pub fn apply_dirichlet(system: &SaddleSystem, dofmap: &DofMap, boundary: &BoundaryData) -> Result<SaddleSystem> {
    if system.reduced {
        return Err(Error::InvalidArgument("boundary conditions already applied".into()));
    }
    let n = system.num_velocity;
    let mut known = vec![None; n];
    let mut boundary_values = Vec::new();
    for (d, slot) in known.iter_mut().enumerate() {
        if dofmap.is_boundary_velocity(d) {
            let v = boundary.get(d).ok_or_else(|| {
                Error::InvalidArgument(format!("no boundary value for velocity dof {d}"))
            })?;
            *slot = Some(v);
            boundary_values.push((d, v));
        }
    }
    let free: Vec<usize> = (0..n).filter(|&d| known[d].is_none()).collect();
    let ub: Vec<f64> = known.iter().map(|v| v.unwrap_or(0.0)).collect();

    let a_ub = system.a.mul_vec(&ub);
    let f: Vec<f64> = free.iter().map(|&d| system.f[d] - a_ub[d]).collect();
    let bt_ub = system.b.tr_mul_vec(&ub);
    let g: Vec<f64> = system.g.iter().zip(&bt_ub).map(|(g, c)| g - c).collect();
    let cols: Vec<usize> = (0..system.b.ncols()).collect();

    Ok(SaddleSystem {
        kind: system.kind,
        a: system.a.select(&free, &free),
        b: system.b.select(&free, &cols),
        f,
        g,
        layout: system.layout.clone(),
        velocity_dofs: free,
        num_velocity: n,
        boundary_values,
        reduced: true,
    })
}

/// Pressure mass matrix `int psi_i psi_j` in the merged pressure space.
pub fn pressure_mass(mesh: &Mesh, dofmap: &DofMap) -> CsrMatrix {
    let layout = dofmap.pressure_layout();
    let mut t = Vec::new();
    for e in 0..mesh.num_triangles() {
        let m = element_pressure_mass(&geometry(mesh, e), dofmap.kind);
        let dofs: Vec<usize> =
            dofmap.element_pressure_dofs(mesh, e).iter().map(|&d| layout.full_to_merged[d]).collect();
        for (i, &di) in dofs.iter().enumerate() {
            for (j, &dj) in dofs.iter().enumerate() {
                t.push((di, dj, m[(i, j)]));
            }
        }
    }
    CsrMatrix::from_triplets(layout.num_merged, layout.num_merged, t)
}

/// `int_E div(u)` for every element, from the full velocity coefficients.
pub fn element_divergence_integrals(mesh: &Mesh, u: &[f64]) -> Vec<f64> {
    (0..mesh.num_triangles())
        .map(|t| {
            let b = element_divergence(&geometry(mesh, t), PressureSpaceKind::Lc);
            global_velocity_dofs(mesh, t).iter().enumerate().map(|(i, &d)| b[(i, 3)] * u[d]).sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_into_corners, generate_structured, Pattern};
    use crate::spaces::build_dof_map;

    fn unit(n: usize) -> Mesh {
        generate_structured(n, Pattern::Right).unwrap()
    }

    #[test]
    fn interpolant_energy() {
        let m = unit(4);
        let d = build_dof_map(&m, PressureSpaceKind::TaylorHood, true).unwrap();
        let s = assemble(&m, &d, PressureSpaceKind::TaylorHood, 1.0, |_| [0.0, 0.0]).unwrap();
        let u: Vec<f64> = (0..d.num_velocity())
            .map(|k| {
                let p = m.node_position(k / 2);
                if k % 2 == 0 {
                    p.y * p.y
                } else {
                    p.x * p.x
                }
            })
            .collect();
        let au = s.a.mul_vec(&u);
        let energy: f64 = u.iter().zip(&au).map(|(a, b)| a * b).sum();
        assert!((energy - 8.0 / 3.0).abs() < 1e-12, "{energy}");
        assert!(s.a.asymmetry() < 1e-12);
        assert!(s.f.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_field_in_kernel() {
        let m = unit(3);
        let d = build_dof_map(&m, PressureSpaceKind::Lc, true).unwrap();
        let s = assemble(&m, &d, PressureSpaceKind::Lc, 1.0, |_| [0.0, 0.0]).unwrap();
        let ones: Vec<f64> = (0..d.num_velocity()).map(|k| if k % 2 == 0 { 1.0 } else { 0.0 }).collect();
        assert!(s.a.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn constant_pressure_orthogonal_to_interior_velocities() {
        let m = unit(4);
        let d = build_dof_map(&m, PressureSpaceKind::Lc, true).unwrap();
        let s = assemble(&m, &d, PressureSpaceKind::Lc, 1.0, |_| [0.0, 0.0]).unwrap();
        let r = apply_dirichlet(&s, &d, &BoundaryData::zero(&d)).unwrap();
        let nv = m.num_vertices();
        for p in [
            (0..r.b.ncols()).map(|c| if c < nv { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
            (0..r.b.ncols()).map(|c| if c < nv { 0.0 } else { 1.0 }).collect(),
        ] {
            assert!(r.b.mul_vec(&p).iter().all(|v| v.abs() < 1e-13));
        }
    }

    #[test]
    fn tied_merge_shrinks_columns() {
        let m = unit(4);
        let d = build_dof_map(&m, PressureSpaceKind::LcTied, true).unwrap();
        let s = assemble(&m, &d, PressureSpaceKind::LcTied, 1.0, |_| [0.0, 0.0]).unwrap();
        assert_eq!(s.b.ncols(), d.num_pressure() - 2);
        assert!(assemble(&m, &d, PressureSpaceKind::Lc, 1.0, |_| [0.0, 0.0]).is_err());
    }

    #[test]
    fn reduced_viscous_block_is_definite() {
        let m = unit(4);
        let d = build_dof_map(&m, PressureSpaceKind::TaylorHood, true).unwrap();
        let s = assemble(&m, &d, PressureSpaceKind::TaylorHood, 1.0, |_| [0.0, 0.0]).unwrap();
        let r = apply_dirichlet(&s, &d, &BoundaryData::zero(&d)).unwrap();
        assert_eq!(r.f, s.f.iter().enumerate().filter(|(k, _)| !d.is_boundary_velocity(*k)).map(|(_, v)| *v).collect::<Vec<_>>());
        assert!(r.g.iter().all(|&v| v == 0.0));
        let eig = r.a.to_dense().symmetric_eigenvalues();
        assert!(eig.min() > 0.0);
    }

    #[test]
    fn divergence_free_boundary_data_is_compatible() {
        let m = generate_into_corners(4, Pattern::Right).unwrap();
        let d = build_dof_map(&m, PressureSpaceKind::Lc, true).unwrap();
        let s = assemble(&m, &d, PressureSpaceKind::Lc, 1.0, |_| [0.0, 0.0]).unwrap();
        let bc = BoundaryData::from_field(&m, &d, |p| {
            [-20.0 * p.x * p.y.powi(3), 5.0 * p.y.powi(4) - 5.0 * p.x.powi(4)]
        });
        let r = apply_dirichlet(&s, &d, &bc).unwrap();
        let nv = m.num_vertices();
        let vertex_sum: f64 = r.g[..nv].iter().sum();
        let constant_sum: f64 = r.g[nv..].iter().sum();
        assert!(vertex_sum.abs() < 1e-12 && constant_sum.abs() < 1e-12);
        assert!(r.g.iter().any(|v| v.abs() > 1e-3));
    }

    #[test]
    fn missing_boundary_value_is_rejected() {
        let m = unit(2);
        let d = build_dof_map(&m, PressureSpaceKind::TaylorHood, true).unwrap();
        let s = assemble(&m, &d, PressureSpaceKind::TaylorHood, 1.0, |_| [0.0, 0.0]).unwrap();
        let bc = BoundaryData::from_values(vec![None; d.num_velocity()]);
        assert!(matches!(apply_dirichlet(&s, &d, &bc), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn mass_matrix_integrates_constants() {
        let m = unit(3);
        let d = build_dof_map(&m, PressureSpaceKind::TaylorHood, false).unwrap();
        let mp = pressure_mass(&m, &d);
        let ones = vec![1.0; mp.ncols()];
        let total: f64 = mp.mul_vec(&ones).iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}
