//! Direct solution of the reduced saddle-point system.
//!
//! The block matrix `[A, -B; B^T, 0]` (pinned pressure columns moved to the
//! right-hand side) is reordered by reverse Cuthill–McKee and factored by a
//! banded LU with partial pivoting, followed by iterative refinement.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::assembly::SaddleSystem;
use crate::linalg::{reverse_cuthill_mckee, BandedLu, CsrMatrix, FactorStats};
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Pivots at most this fraction of the largest pivot mark the system singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;
/// Largest accepted relative residual.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
const MAX_REFINEMENT: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub unknowns: usize,
    /// `|r| / (|K| |x| + |rhs|)` in the max norm.
    pub residual: f64,
    pub refinement_steps: usize,
    pub factor: Option<FactorStats>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Every velocity dof on the mesh, boundary values included.
    pub u: Vec<f64>,
    /// Full pressure coefficients, ties and pins expanded.
    pub p: Vec<f64>,
    pub report: SolveReport,
}

struct Block {
    k: CsrMatrix,
    rhs: Vec<f64>,
    n_u: usize,
    free: Vec<Option<usize>>,
}

fn block_system(system: &SaddleSystem) -> Result<Block> {
    if !system.reduced {
        return Err(Error::InvalidArgument("apply boundary conditions before solving".into()));
    }
    let layout = &system.layout;
    let free = layout.free_index();
    let n_u = system.velocity_dofs.len();
    let n = n_u + layout.num_free();
    let mut rhs = vec![0.0; n];
    rhs[..n_u].copy_from_slice(&system.f);
    for (c, slot) in free.iter().enumerate() {
        if let Some(k) = slot {
            rhs[n_u + k] = system.g[c];
        }
    }
    let pin_value = |c: usize| layout.pins.binary_search_by_key(&c, |p| p.0).ok().map(|k| layout.pins[k].1);
    let mut t: Vec<(usize, usize, f64)> = system.a.triplets().collect();
    for (r, c, v) in system.b.triplets() {
        match free[c] {
            Some(k) => {
                t.push((r, n_u + k, -v));
                t.push((n_u + k, r, v));
            }
            None => rhs[r] += v * pin_value(c).unwrap_or(0.0),
        }
    }
    Ok(Block { k: CsrMatrix::from_triplets(n, n, t), rhs, n_u, free })
}

fn expand(system: &SaddleSystem, block: &Block, x: &[f64], report: SolveReport) -> Solution {
    let mut u = vec![0.0; system.num_velocity];
    for &(d, v) in &system.boundary_values {
        u[d] = v;
    }
    for (k, &d) in system.velocity_dofs.iter().enumerate() {
        u[d] = x[k];
    }
    let mut merged = vec![0.0; system.layout.num_merged];
    for &(c, v) in &system.layout.pins {
        merged[c] = v;
    }
    for (c, slot) in block.free.iter().enumerate() {
        if let Some(k) = slot {
            merged[c] = x[block.n_u + k];
        }
    }
    Solution { u, p: system.layout.expand(&merged), report }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn backward_error(k: &CsrMatrix, x: &[f64], rhs: &[f64], k_norm: f64) -> (f64, Vec<f64>) {
    let r: Vec<f64> = k.mul_vec(x).iter().zip(rhs).map(|(a, b)| b - a).collect();
    let denom = k_norm * max_abs(x) + max_abs(rhs);
    let eta = if denom == 0.0 { 0.0 } else { max_abs(&r) / denom };
    (eta, r)
}

/// Solves a system reduced by [`crate::assembly::apply_dirichlet`].
pub fn solve(system: &SaddleSystem) -> Result<Solution> {
    let block = block_system(system)?;
    let n = block.k.nrows();
    let adjacency: Vec<Vec<usize>> =
        (0..n).map(|r| block.k.row(r).map(|(c, _)| c).filter(|&c| c != r).collect()).collect();
    let perm = reverse_cuthill_mckee(&adjacency);
    let mut pos = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        pos[old] = new;
    }
    let permuted = CsrMatrix::from_triplets(n, n, block.k.triplets().map(|(r, c, v)| (pos[r], pos[c], v)).collect());
    let rhs: Vec<f64> = perm.iter().map(|&old| block.rhs[old]).collect();

    let lu = BandedLu::factor(&permuted, SINGULAR_TOLERANCE).map_err(|e| match e {
        Error::SingularSystem { index, ratio } => Error::SingularSystem { index: perm[index], ratio },
        other => other,
    })?;
    let k_norm = permuted.norm_inf();
    let mut x = lu.solve(&rhs);
    let (mut eta, mut r) = backward_error(&permuted, &x, &rhs, k_norm);
    let mut steps = 0;
    while eta > 1e-15 && steps < MAX_REFINEMENT {
        let dx = lu.solve(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let (trial_eta, trial_r) = backward_error(&permuted, &trial, &rhs, k_norm);
        steps += 1;
        if trial_eta >= eta {
            break;
        }
        x = trial;
        eta = trial_eta;
        r = trial_r;
    }
    if eta > RESIDUAL_TOLERANCE {
        return Err(Error::InaccurateSolve { residual: eta });
    }
    let mut unpermuted = vec![0.0; n];
    for (new, &old) in perm.iter().enumerate() {
        unpermuted[old] = x[new];
    }
    let report = SolveReport { unknowns: n, residual: eta, refinement_steps: steps, factor: Some(lu.stats()) };
    Ok(expand(system, &block, &unpermuted, report))
}

/// Dense LU reference solve, for small systems.
pub fn solve_dense(system: &SaddleSystem) -> Result<Solution> {
    let block = block_system(system)?;
    let dense = block.k.to_dense();
    let lu = dense.clone().lu();
    let x = lu
        .solve(&DVector::from_column_slice(&block.rhs))
        .ok_or(Error::SingularSystem { index: 0, ratio: 0.0 })?;
    let x: Vec<f64> = x.iter().copied().collect();
    let (eta, _) = backward_error(&block.k, &x, &block.rhs, block.k.norm_inf());
    let report = SolveReport { unknowns: x.len(), residual: eta, refinement_steps: 0, factor: None };
    Ok(expand(system, &block, &x, report))
}

/// The block matrix actually factored by [`solve`], before reordering.
pub fn block_matrix(system: &SaddleSystem) -> Result<DMatrix<f64>> {
    Ok(block_system(system)?.k.to_dense())
}

/// `int_Omega p` for full pressure coefficients (vertex values, then
/// optional element constants).
pub fn pressure_integral(mesh: &Mesh, p: &[f64]) -> f64 {
    let nv = mesh.num_vertices();
    let with_constants = p.len() == nv + mesh.num_triangles();
    mesh.triangles()
        .iter()
        .enumerate()
        .map(|(e, t)| {
            let linear = (p[t.v[0]] + p[t.v[1]] + p[t.v[2]]) / 3.0;
            let constant = if with_constants { p[nv + e] } else { 0.0 };
            t.area * (linear + constant)
        })
        .sum()
}

/// Shifts the vertex pressures so that the total pressure has zero mean.
pub fn normalize_pressure(mut solution: Solution, mesh: &Mesh) -> Solution {
    let shift = pressure_integral(mesh, &solution.p) / mesh.total_area();
    for v in solution.p.iter_mut().take(mesh.num_vertices()) {
        *v -= shift;
    }
    solution
}
