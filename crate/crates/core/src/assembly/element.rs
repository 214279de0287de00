use nalgebra::{DMatrix, SMatrix};

use crate::mesh::TriangleGeometry;
use crate::spaces::{p2_basis, pressure_basis, quadrature, PressureSpaceKind};

pub(crate) const QUADRATURE_DEGREE: usize = 5;

/// Local velocity index of node `node` (0..6), component `comp` (0..2).
pub fn local_velocity(node: usize, comp: usize) -> usize {
    comp * 6 + node
}

/// `nu * int grad(phi_i) . grad(phi_j)` over the triangle.
///
/// Rows and columns follow [`local_velocity`], so the matrix is two copies of
/// the scalar quadratic stiffness matrix on the diagonal.
pub fn element_viscous(geo: &TriangleGeometry, nu: f64) -> SMatrix<f64, 12, 12> {
    let rule = quadrature(QUADRATURE_DEGREE).expect("supported degree");
    let mut k = SMatrix::<f64, 6, 6>::zeros();
    for (bary, w) in rule.iter() {
        let s = p2_basis(bary, geo).expect("quadrature points are valid barycentrics");
        let scale = w * geo.area * nu;
        for i in 0..6 {
            for j in 0..6 {
                let gi = s.gradients[i];
                let gj = s.gradients[j];
                k[(i, j)] += scale * (gi[0] * gj[0] + gi[1] * gj[1]);
            }
        }
    }
    let mut out = SMatrix::<f64, 12, 12>::zeros();
    out.fixed_view_mut::<6, 6>(0, 0).copy_from(&k);
    out.fixed_view_mut::<6, 6>(6, 6).copy_from(&k);
    out
}

/// `int div(phi_i) psi_j` over the triangle, 12 rows by 3 or 4 columns.
pub fn element_divergence(geo: &TriangleGeometry, kind: PressureSpaceKind) -> DMatrix<f64> {
    let rule = quadrature(QUADRATURE_DEGREE).expect("supported degree");
    let np = kind.local_dofs();
    let mut b = DMatrix::zeros(12, np);
    for (bary, w) in rule.iter() {
        let s = p2_basis(bary, geo).expect("quadrature points are valid barycentrics");
        let psi = pressure_basis(kind, bary);
        let scale = w * geo.area;
        for node in 0..6 {
            for comp in 0..2 {
                let d = s.gradients[node][comp];
                for (j, &q) in psi.as_slice().iter().enumerate() {
                    b[(local_velocity(node, comp), j)] += scale * d * q;
                }
            }
        }
    }
    b
}

/// `int psi_i psi_j` over the triangle.
pub fn element_pressure_mass(geo: &TriangleGeometry, kind: PressureSpaceKind) -> DMatrix<f64> {
    let rule = quadrature(QUADRATURE_DEGREE).expect("supported degree");
    let np = kind.local_dofs();
    let mut m = DMatrix::zeros(np, np);
    for (bary, w) in rule.iter() {
        let psi = pressure_basis(kind, bary);
        let v = psi.as_slice();
        for i in 0..np {
            for j in 0..np {
                m[(i, j)] += w * geo.area * v[i] * v[j];
            }
        }
    }
    m
}

/// `int f . phi_i` over the triangle for a force evaluated at barycentric points.
pub fn element_load(geo: &TriangleGeometry, force: impl Fn([f64; 3]) -> [f64; 2]) -> [f64; 12] {
    let rule = quadrature(QUADRATURE_DEGREE).expect("supported degree");
    let mut out = [0.0; 12];
    for (bary, w) in rule.iter() {
        let s = p2_basis(bary, geo).expect("quadrature points are valid barycentrics");
        let f = force(bary);
        for node in 0..6 {
            for comp in 0..2 {
                out[local_velocity(node, comp)] += w * geo.area * f[comp] * s.values[node];
            }
        }
    }
    out
}
