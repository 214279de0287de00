use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::algebra::{constraint_rows, patch_divergence, patch_pressure_mass, patch_viscous, NULL_TOLERANCE};
use super::projection::pi_project;
use crate::assembly::{apply_dirichlet, assemble, pressure_mass, BoundaryData};
use crate::linalg::{min_generalized_eigenvalue, null_space, null_space_split};
use crate::mesh::{Mesh, Patch};
use crate::spaces::{DofMap, PressureSpaceKind};
use crate::{Error, Result};

/// `B^T A^{-1} B` through a Cholesky factor of `A`.
fn schur(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DegeneratePatch("viscous matrix is not positive definite".into()))?;
    let w = chol.l().solve_lower_triangular(b).expect("Cholesky factor is nonsingular");
    Ok(w.transpose() * w)
}

fn restricted_min_eigenvalue(s: &DMatrix<f64>, m: &DMatrix<f64>, z: &DMatrix<f64>) -> Result<f64> {
    let k = z.transpose() * s * z;
    let mz = z.transpose() * m * z;
    min_generalized_eigenvalue(&k, &mz)
}

/// Patch inf-sup constant `beta_M`: the square root of the smallest
/// `p^T B^T A^{-1} B p / p^T M p` over pressures satisfying the patch
/// constraints.
pub fn patch_inf_sup(patch: &Patch) -> Result<f64> {
    let b = patch_divergence(patch)?;
    let a = patch_viscous(patch)?;
    let m = patch_pressure_mass(patch)?;
    let z = null_space(&constraint_rows(patch), NULL_TOLERANCE);
    if z.ncols() == 0 {
        return Err(Error::DegeneratePatch("constraints leave no admissible pressure".into()));
    }
    let s = schur(&a, &b)?;
    let lambda = restricted_min_eigenvalue(&s, &m, &z)
        .map_err(|e| Error::DegeneratePatch(format!("pressure mass on the constraint space: {e}")))?;
    Ok(lambda.max(0.0).sqrt())
}

/// Energy bound implied by the projection: for any patch pressure,
/// `p^T B^T A^{-1} B p >= beta_M^2 |p - Πp|^2_M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBound {
    pub energy: f64,
    pub bound: f64,
}

impl EnergyBound {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.energy + rel_tol * self.energy.abs().max(self.bound) >= self.bound
    }
}

pub fn projection_energy_bound(patch: &Patch, p: &[f64], beta: f64) -> Result<EnergyBound> {
    let b = patch_divergence(patch)?;
    let a = patch_viscous(patch)?;
    let m = patch_pressure_mass(patch)?;
    let pv = DVector::from_column_slice(p);
    let r = &pv - DVector::from_vec(pi_project(patch, p, patch.class)?.coeff);
    let energy = (pv.transpose() * schur(&a, &b)? * &pv)[(0, 0)];
    let bound = beta * beta * (r.transpose() * &m * &r)[(0, 0)];
    Ok(EnergyBound { energy, bound })
}

/// Global discrete inf-sup constant.
#[derive(Debug, Clone, Serialize)]
pub struct InfSupReport {
    pub kind: PressureSpaceKind,
    pub beta: f64,
    /// Dimension of `{p : B p = 0}` among the unpinned pressures.
    pub null_dimension: usize,
    pub pressure_unknowns: usize,
    pub velocity_unknowns: usize,
}

/// `M - M N (N^T M N)^+ N^T M`: the mass form of the L2 distance to the
/// span of `n`.
fn quotient_mass(m: &DMatrix<f64>, n: &DMatrix<f64>) -> DMatrix<f64> {
    if n.ncols() == 0 {
        return m.clone();
    }
    let mn = m * n;
    let gram = n.transpose() * &mn;
    let eps = NULL_TOLERANCE * gram.amax();
    let pinv = gram.pseudo_inverse(eps).expect("tolerance is non-negative");
    m - &mn * pinv * mn.transpose()
}

/// Computes `beta_h` on the pressure space modulo the discrete kernel `N`,
/// measuring pressures by their L2 distance to `N`.
///
/// The dof map must not carry the enclosed-flow pins; ties and pinned
/// corner constants are honoured.
pub fn global_inf_sup(mesh: &Mesh, dofmap: &DofMap) -> Result<InfSupReport> {
    if dofmap.enclosed {
        return Err(Error::InvalidArgument("global inf-sup needs a dof map built without enclosed-flow pins".into()));
    }
    let kind = dofmap.kind;
    let full = assemble(mesh, dofmap, kind, 1.0, |_| [0.0, 0.0])?;
    let system = apply_dirichlet(&full, dofmap, &BoundaryData::zero(dofmap))?;
    let layout = &system.layout;
    let free: Vec<usize> = (0..layout.num_merged).filter(|&c| layout.free_index()[c].is_some()).collect();
    let rows: Vec<usize> = (0..system.b.nrows()).collect();
    let b = system.b.select(&rows, &free).to_dense();
    let m = pressure_mass(mesh, dofmap).select(&free, &free).to_dense();
    let a = system.a.to_dense();

    let split = null_space_split(&b, NULL_TOLERANCE);
    let q = split.range;
    if q.ncols() == 0 {
        return Err(Error::InvalidArgument("divergence matrix vanishes".into()));
    }
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("viscous matrix is not positive definite".into()))?;
    let w = chol.l().solve_lower_triangular(&(&b * &q)).expect("Cholesky factor is nonsingular");
    let k = w.transpose() * &w;
    let mq = q.transpose() * quotient_mass(&m, &split.null) * &q;
    let lambda = min_generalized_eigenvalue(&k, &mq)?;
    Ok(InfSupReport {
        kind,
        beta: lambda.max(0.0).sqrt(),
        null_dimension: split.null.ncols(),
        pressure_unknowns: free.len(),
        velocity_unknowns: b.nrows(),
    })
}

/// Dimension of the discrete pressure kernel only.
pub fn pressure_null_dimension(mesh: &Mesh, dofmap: &DofMap) -> Result<usize> {
    let full = assemble(mesh, dofmap, dofmap.kind, 1.0, |_| [0.0, 0.0])?;
    let system = apply_dirichlet(&full, dofmap, &BoundaryData::zero(dofmap))?;
    let layout = &system.layout;
    let free: Vec<usize> = (0..layout.num_merged).filter(|&c| layout.free_index()[c].is_some()).collect();
    let rows: Vec<usize> = (0..system.b.nrows()).collect();
    Ok(null_space(&system.b.select(&rows, &free).to_dense(), NULL_TOLERANCE).ncols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_into_corners, generate_structured, PatchClass, Pattern, Point2};
    use crate::spaces::build_dof_map;

    fn strip(class: PatchClass) -> Patch {
        let pts = [
            Point2::new(1.0, -0.2),
            Point2::new(0.9, 0.8),
            Point2::new(-0.3, 1.1),
            Point2::new(-1.0, 0.1),
            Point2::new(0.0, 0.0),
        ];
        Patch::from_points(&pts, class).unwrap()
    }

    #[test]
    fn patch_beta_is_positive_and_similarity_invariant() {
        for class in [PatchClass::Type2, PatchClass::Type3] {
            let p = strip(class);
            let beta = patch_inf_sup(&p).unwrap();
            assert!(beta > 0.0);
            let (c, s) = (0.7f64.cos(), 0.7f64.sin());
            let q = p.transformed(|x| Point2::new(3.0 * (c * x.x - s * x.y) + 5.0, 3.0 * (s * x.x + c * x.y) - 2.0)).unwrap();
            let beta_q = patch_inf_sup(&q).unwrap();
            assert!((beta - beta_q).abs() < 1e-9 * beta);
        }
    }

    #[test]
    fn energy_bound_holds() {
        let p = strip(PatchClass::Type2);
        let beta = patch_inf_sup(&p).unwrap();
        let e = projection_energy_bound(&p, &[0.3, -1.0, 2.0, 0.7, 0.1, 1.5, -0.4, 0.9], beta).unwrap();
        assert!(e.bound > 0.0 && e.holds(1e-10), "{e:?}");
    }

    #[test]
    fn kernel_dimensions() {
        let into = generate_into_corners(4, Pattern::Right).unwrap();
        let raw = generate_structured(4, Pattern::Right).unwrap();
        let th = build_dof_map(&raw, PressureSpaceKind::TaylorHood, false).unwrap();
        assert_eq!(pressure_null_dimension(&raw, &th).unwrap(), 1);
        let lc = build_dof_map(&into, PressureSpaceKind::Lc, false).unwrap();
        assert_eq!(pressure_null_dimension(&into, &lc).unwrap(), 2);
        let lc_raw = build_dof_map(&raw, PressureSpaceKind::Lc, false).unwrap();
        assert_eq!(pressure_null_dimension(&raw, &lc_raw).unwrap(), 4);
        let tied = build_dof_map(&raw, PressureSpaceKind::LcTied, false).unwrap();
        assert_eq!(pressure_null_dimension(&raw, &tied).unwrap(), 2);
    }

    #[test]
    fn enclosed_dof_map_is_rejected() {
        let m = generate_into_corners(2, Pattern::Right).unwrap();
        let d = build_dof_map(&m, PressureSpaceKind::TaylorHood, true).unwrap();
        assert!(global_inf_sup(&m, &d).is_err());
        let d = build_dof_map(&m, PressureSpaceKind::TaylorHood, false).unwrap();
        let r = global_inf_sup(&m, &d).unwrap();
        assert!(r.beta > 0.0 && r.null_dimension == 1);
    }
}
