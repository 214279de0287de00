//! Patch algebra, projections and inf-sup constants.
//!
//! Patch pressure vectors use the local order of [`crate::mesh::Patch`]:
//! vertex values, then element constants.

mod algebra;
mod infsup;
mod projection;
mod random;

pub use algebra::{
    analytic_null_basis, c_matrix, constraint_rows, patch_divergence, patch_pressure_mass, patch_viscous,
    CMatrixReport, PatchMatrices, NULL_TOLERANCE,
};
pub use infsup::{
    global_inf_sup, patch_inf_sup, pressure_null_dimension, projection_energy_bound, EnergyBound, InfSupReport,
};
pub use projection::{element_mean, mu_project, pi_project, verify_projection_theorems, Projection, TheoremResiduals};
pub use random::{random_patch, random_patches, random_pressure, MAX_REGULARITY};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::mesh::{Patch, PatchClass};
use crate::Result;

/// Stability verdict for one patch.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub class: PatchClass,
    pub nullity: usize,
    /// `|B S|_max / |B|_max` for the analytic kernel vectors.
    pub null_residual: f64,
    pub c_matrix: CMatrixReport,
    pub stable: bool,
    pub beta: Option<f64>,
}

pub fn analyze_patch(patch: &Patch, with_beta: bool) -> Result<StabilityReport> {
    let m = PatchMatrices::new(patch)?;
    let c_matrix = c_matrix(patch);
    let beta = if with_beta { Some(patch_inf_sup(patch)?) } else { None };
    Ok(StabilityReport {
        class: patch.class,
        nullity: m.nullity(),
        null_residual: (&m.b * &m.s).amax() / m.b.amax(),
        stable: c_matrix.stable,
        c_matrix,
        beta,
    })
}

/// Summary of a randomized patch study.
#[derive(Debug, Clone, Serialize)]
pub struct PatchStudy {
    pub class: PatchClass,
    pub count: usize,
    pub seed: u64,
    pub stable: bool,
    pub nullity_min: usize,
    pub nullity_max: usize,
    pub max_null_residual: f64,
    pub max_theorem_residual: f64,
    /// Smallest patch inf-sup constant observed.
    pub beta_min: f64,
    pub max_regularity: f64,
}

/// Analyses `count` random patches, each with one random pressure field.
pub fn random_study(class: PatchClass, count: usize, seed: u64) -> Result<PatchStudy> {
    let patches = random_patches(class, count, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut study = PatchStudy {
        class,
        count,
        seed,
        stable: true,
        nullity_min: usize::MAX,
        nullity_max: 0,
        max_null_residual: 0.0,
        max_theorem_residual: 0.0,
        beta_min: f64::INFINITY,
        max_regularity: 0.0,
    };
    for patch in &patches {
        let r = analyze_patch(patch, true)?;
        let p = random_pressure(patch.num_pressure(), &mut rng);
        let t = verify_projection_theorems(patch, &p, class)?;
        study.stable &= r.stable;
        study.nullity_min = study.nullity_min.min(r.nullity);
        study.nullity_max = study.nullity_max.max(r.nullity);
        study.max_null_residual = study.max_null_residual.max(r.null_residual);
        study.max_theorem_residual = study.max_theorem_residual.max(t.max());
        study.beta_min = study.beta_min.min(r.beta.unwrap_or(f64::INFINITY));
        study.max_regularity = study.max_regularity.max(patch.regularity_ratio());
    }
    Ok(study)
}
