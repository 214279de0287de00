use super::PressureSpaceKind;
use crate::mesh::TriangleGeometry;
use crate::{Error, Result};

/// Values and physical gradients of the six quadratic shape functions at one
/// point: three vertex functions `L_i (2 L_i - 1)`, then the midside
/// functions `4 L_j L_k` opposite vertices 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSet {
    pub values: [f64; 6],
    pub gradients: [[f64; 2]; 6],
}

pub fn p2_basis(bary: [f64; 3], geo: &TriangleGeometry) -> Result<ShapeSet> {
    let sum = bary[0] + bary[1] + bary[2];
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("barycentric coordinates sum to {sum}, not 1")));
    }
    let inv = 1.0 / (2.0 * geo.area);
    let grad_l = geo.b.map(|b| [b[0] * inv, b[1] * inv]);
    let l = bary;

    let mut values = [0.0; 6];
    let mut gradients = [[0.0; 2]; 6];
    for i in 0..3 {
        values[i] = l[i] * (2.0 * l[i] - 1.0);
        let s = 4.0 * l[i] - 1.0;
        gradients[i] = [s * grad_l[i][0], s * grad_l[i][1]];

        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        values[3 + i] = 4.0 * l[j] * l[k];
        gradients[3 + i] = [
            4.0 * (l[j] * grad_l[k][0] + l[k] * grad_l[j][0]),
            4.0 * (l[j] * grad_l[k][1] + l[k] * grad_l[j][1]),
        ];
    }
    Ok(ShapeSet { values, gradients })
}

/// Local pressure function values: `(L1, L2, L3)` or `(L1, L2, L3, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPressure {
    values: [f64; 4],
    len: usize,
}

impl LocalPressure {
    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.len]
    }
}

pub fn pressure_basis(kind: PressureSpaceKind, bary: [f64; 3]) -> LocalPressure {
    LocalPressure { values: [bary[0], bary[1], bary[2], 1.0], len: kind.local_dofs() }
}
