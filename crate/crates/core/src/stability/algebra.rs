use nalgebra::DMatrix;
use serde::Serialize;

use crate::assembly::{element_divergence, element_pressure_mass, element_viscous, local_velocity};
use crate::linalg::null_space;
use crate::mesh::{triangle_geometry, LocalNode, Patch, PatchClass};
use crate::spaces::PressureSpaceKind;
use crate::Result;

/// Relative singular value cutoff for kernels.
pub const NULL_TOLERANCE: f64 = 1e-10;

/// Dense matrices of one patch.
#[derive(Debug, Clone)]
pub struct PatchMatrices {
    pub class: PatchClass,
    /// Interior velocity dofs by patch pressure dofs.
    pub b: DMatrix<f64>,
    /// Analytic kernel basis of `b`, one column per null vector.
    pub s: DMatrix<f64>,
    /// Constraint rows defining the subspace the stability argument works in.
    pub h: DMatrix<f64>,
    /// `h * s`.
    pub c: DMatrix<f64>,
}

impl PatchMatrices {
    pub fn new(patch: &Patch) -> Result<PatchMatrices> {
        let b = patch_divergence(patch)?;
        let s = analytic_null_basis(patch.class);
        let h = constraint_rows(patch);
        let c = &h * &s;
        Ok(PatchMatrices { class: patch.class, b, s, h, c })
    }

    /// Dimension of the numerically computed kernel of `b`.
    pub fn nullity(&self) -> usize {
        null_space(&self.b, NULL_TOLERANCE).ncols()
    }
}

/// Row index of interior node `k`, component `comp`.
fn interior_row(k: usize, comp: usize) -> usize {
    2 * k + comp
}

fn pressure_columns(patch: &Patch, k: usize) -> [usize; 4] {
    let t = patch.triangles[k];
    [t[0], t[1], t[2], patch.constant_dof(k)]
}

fn element_geometry(patch: &Patch, k: usize) -> Result<crate::mesh::TriangleGeometry> {
    triangle_geometry(&patch.element_points(k))
}

fn interior_index(patch: &Patch, node: &LocalNode) -> Option<usize> {
    patch.interior.iter().position(|n| n == node)
}

/// Divergence matrix restricted to interior velocity dofs (two rows per
/// interior node) and the patch pressure dofs.
pub fn patch_divergence(patch: &Patch) -> Result<DMatrix<f64>> {
    let mut b = DMatrix::zeros(2 * patch.interior.len(), patch.num_pressure());
    for k in 0..3 {
        let be = element_divergence(&element_geometry(patch, k)?, PressureSpaceKind::Lc);
        let cols = pressure_columns(patch, k);
        for (node, ln) in patch.element_nodes(k).iter().enumerate() {
            let Some(r) = interior_index(patch, ln) else { continue };
            for comp in 0..2 {
                for (j, &c) in cols.iter().enumerate() {
                    b[(interior_row(r, comp), c)] += be[(local_velocity(node, comp), j)];
                }
            }
        }
    }
    Ok(b)
}

/// Viscous matrix (`nu = 1`) on the interior velocity dofs.
pub fn patch_viscous(patch: &Patch) -> Result<DMatrix<f64>> {
    let n = 2 * patch.interior.len();
    let mut a = DMatrix::zeros(n, n);
    for k in 0..3 {
        let ke = element_viscous(&element_geometry(patch, k)?, 1.0);
        let nodes = patch.element_nodes(k);
        for (i, ni) in nodes.iter().enumerate() {
            let Some(ri) = interior_index(patch, ni) else { continue };
            for (j, nj) in nodes.iter().enumerate() {
                let Some(rj) = interior_index(patch, nj) else { continue };
                for ci in 0..2 {
                    for cj in 0..2 {
                        a[(interior_row(ri, ci), interior_row(rj, cj))] +=
                            ke[(local_velocity(i, ci), local_velocity(j, cj))];
                    }
                }
            }
        }
    }
    Ok(a)
}

/// Pressure mass matrix on the patch pressure dofs.
pub fn patch_pressure_mass(patch: &Patch) -> Result<DMatrix<f64>> {
    let np = patch.num_pressure();
    let mut m = DMatrix::zeros(np, np);
    for k in 0..3 {
        let me = element_pressure_mass(&element_geometry(patch, k)?, PressureSpaceKind::Lc);
        let cols = pressure_columns(patch, k);
        for i in 0..4 {
            for j in 0..4 {
                m[(cols[i], cols[j])] += me[(i, j)];
            }
        }
    }
    Ok(m)
}

/// Kernel vectors of the patch divergence matrix, valid for every geometry.
pub fn analytic_null_basis(class: PatchClass) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = match class {
        PatchClass::Type1 => vec![vec![1., 1., 1., 1., 0., 0., 0.], vec![0., 0., 0., 0., 1., 1., 1.]],
        PatchClass::Type2 => vec![
            vec![1., 1., 1., 1., 1., 0., 0., 0.],
            vec![0., 0., 0., 0., 0., 1., 1., 1.],
            vec![4., 0., 0., 0., 0., -1., 0., 0.],
            vec![0., 0., 0., 4., 0., 0., 0., -1.],
        ],
        PatchClass::Type3 => vec![
            vec![1., 1., 1., 1., 1., 0., 0.],
            vec![0., 0., 0., 0., 0., 1., 1.],
            vec![0., 0., 0., 4., 0., 0., -1.],
        ],
    };
    let n = cols[0].len();
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Area-weighted constraints: zero mean of the constant part, zero mean of
/// the linear part, and zero mean over each outer element with two sides on
/// the patch boundary.
pub fn constraint_rows(patch: &Patch) -> DMatrix<f64> {
    let (a1, a2, a3) = (patch.area(0), patch.area(1), patch.area(2));
    let m = a1 + a2 + a3;
    let rows: Vec<Vec<f64>> = match patch.class {
        PatchClass::Type1 => vec![vec![0., 0., 0., 0., a1, a2, a3], vec![a1 + a3, a2 + a1, a3 + a2, m, 0., 0., 0.]],
        PatchClass::Type2 => vec![
            vec![0., 0., 0., 0., 0., a1, a2, a3],
            vec![a1, a1 + a2, a2 + a3, a3, m, 0., 0., 0.],
            vec![1., 1., 0., 0., 1., 3., 0., 0.],
            vec![0., 0., 1., 1., 1., 0., 0., 3.],
        ],
        PatchClass::Type3 => vec![
            vec![0., 0., 0., 0., 0., a1 + a2, a3],
            vec![a1, a1 + a2, a2 + a3, a3, m, 0., 0.],
            vec![0., 0., 1., 1., 1., 0., 3.],
        ],
    };
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

/// Constraint matrix and its rank verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CMatrixReport {
    pub c: Vec<Vec<f64>>,
    pub determinant: f64,
    pub smallest_singular_value: f64,
    pub stable: bool,
}

/// `C = H S` with the analytic kernel basis. Stable when the smallest
/// singular value exceeds `1e-10` times the largest.
pub fn c_matrix(patch: &Patch) -> CMatrixReport {
    let c = constraint_rows(patch) * analytic_null_basis(patch.class);
    let sv = c.clone().singular_values();
    let (max, min) = (sv.max(), sv.min());
    CMatrixReport {
        c: c.row_iter().map(|r| r.iter().copied().collect()).collect(),
        determinant: c.determinant(),
        smallest_singular_value: min,
        stable: min > NULL_TOLERANCE * max,
    }
}
