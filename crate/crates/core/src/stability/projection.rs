use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::algebra::{analytic_null_basis, constraint_rows, patch_divergence};
use crate::mesh::{Mesh, Patch, PatchClass};
use crate::spaces::DofMap;
use crate::{Error, Result};

/// Projection of a patch pressure onto the kernel of the patch divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Patch pressure coefficients of the projection.
    pub coeff: Vec<f64>,
    /// Weights of the analytic kernel vectors that make up `coeff`.
    pub weights: Vec<f64>,
    /// Mean of `p` over △1, △2, △3.
    pub means: [f64; 3],
    /// Free parameter of the split into constant and linear parts: for type 2
    /// the fraction of the △2 mean carried by the linear part (undefined when
    /// that mean is zero), for type 3 the value of the linear part on △1∪△2.
    pub alpha: Option<f64>,
}

/// Mean of a patch pressure over element `k`.
pub fn element_mean(patch: &Patch, p: &[f64], k: usize) -> f64 {
    let t = patch.triangles[k];
    (p[t[0]] + p[t[1]] + p[t[2]]) / 3.0 + p[patch.constant_dof(k)]
}

fn integrals(patch: &Patch, p: &[f64]) -> (f64, f64) {
    let areas = [patch.area(0), patch.area(1), patch.area(2)];
    let mut p0 = 0.0;
    let mut p1 = 0.0;
    for k in 0..3 {
        let t = patch.triangles[k];
        p1 += areas[k] * (p[t[0]] + p[t[1]] + p[t[2]]) / 3.0;
        p0 += areas[k] * p[patch.constant_dof(k)];
    }
    (p0, p1)
}

/// Projects `p` onto the span of the analytic kernel vectors so that the
/// remainder `p - Πp` satisfies the patch constraints.
///
/// Type 1: the patch mean, split into its constant and linear parts.
/// Type 2: the mean of △2 on △2, corrected on △1 and △3 by multiples of the
/// functions `4 L - 1` that reproduce their means. Type 3: the mean of
/// △1∪△2 there, corrected on △3 the same way.
pub fn pi_project(patch: &Patch, p: &[f64], class: PatchClass) -> Result<Projection> {
    if class != patch.class {
        return Err(Error::InvalidArgument(format!("{class} projection requested on a {} patch", patch.class)));
    }
    if p.len() != patch.num_pressure() {
        return Err(Error::InvalidArgument(format!("expected {} pressure values, got {}", patch.num_pressure(), p.len())));
    }
    let (a1, a2, a3) = (patch.area(0), patch.area(1), patch.area(2));
    let m = a1 + a2 + a3;
    let (int0, int1) = integrals(patch, p);
    let k = [element_mean(patch, p, 0), element_mean(patch, p, 1), element_mean(patch, p, 2)];

    let (weights, alpha) = match class {
        PatchClass::Type1 => {
            let (k0, k1) = (int0 / m, int1 / m);
            (vec![k1, k0], None)
        }
        PatchClass::Type2 => {
            let t = (int1 + 4.0 * (k[1] - k[0]) * a1 + 4.0 * (k[1] - k[2]) * a3) / m;
            let alpha = (k[1] != 0.0).then(|| t / k[1]);
            (vec![t, k[1] - t, -3.0 * (k[1] - k[0]), -3.0 * (k[1] - k[2])], alpha)
        }
        PatchClass::Type3 => {
            let union = (k[0] * a1 + k[1] * a2) / (a1 + a2);
            let alpha = (union * m + 3.0 * (union - k[2]) * a3 - int0) / m;
            (vec![alpha, union - alpha, 3.0 * (k[2] - union)], Some(alpha))
        }
    };
    let s = analytic_null_basis(class);
    let coeff = &s * DVector::from_column_slice(&weights);
    Ok(Projection { coeff: coeff.iter().copied().collect(), weights, means: k, alpha })
}

/// Residuals of the two projection properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremResiduals {
    /// `|H (p - Πp)|_inf / (|H|_inf |p|_inf)`, zero for `p = 0`.
    pub constraints: f64,
    /// `|B Πp|_inf / |B|_inf`.
    pub divergence: f64,
}

impl TheoremResiduals {
    pub fn max(&self) -> f64 {
        self.constraints.max(self.divergence)
    }
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn verify_projection_theorems(patch: &Patch, p: &[f64], class: PatchClass) -> Result<TheoremResiduals> {
    let proj = pi_project(patch, p, class)?;
    let h = constraint_rows(patch);
    let b = patch_divergence(patch)?;
    let pv = DVector::from_column_slice(p);
    let pi = DVector::from_column_slice(&proj.coeff);
    let p_norm = pv.amax();
    let constraints = if p_norm == 0.0 { 0.0 } else { (&h * (&pv - &pi)).amax() / (inf_norm(&h) * p_norm) };
    let divergence = (&b * &pi).amax() / inf_norm(&b);
    Ok(TheoremResiduals { constraints, divergence })
}

/// Element means of a global pressure. Tied elements share the mean over
/// their union.
pub fn mu_project(mesh: &Mesh, dofmap: &DofMap, p: &[f64]) -> Vec<f64> {
    let nv = mesh.num_vertices();
    let mut mu: Vec<f64> = mesh
        .triangles()
        .iter()
        .enumerate()
        .map(|(e, t)| {
            let constant = dofmap.constant_dof(e).map_or(0.0, |d| p[d]);
            (p[t.v[0]] + p[t.v[1]] + p[t.v[2]]) / 3.0 + constant
        })
        .collect();
    for &(slave, master) in dofmap.ties() {
        let (s, m) = (slave - nv, master - nv);
        let (as_, am) = (mesh.triangles()[s].area, mesh.triangles()[m].area);
        let union = (mu[s] * as_ + mu[m] * am) / (as_ + am);
        mu[s] = union;
        mu[m] = union;
    }
    mu
}
