use serde::{Deserialize, Serialize};

use super::Problem;
use crate::mesh::{Mesh, Point2, TriangleGeometry};
use crate::solver::Solution;
use crate::spaces::{p2_basis, quadrature};

/// Errors of one discrete solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    /// L2 norm of the pressure error after removing its mean.
    #[serde(rename = "p_l2_modR")]
    pub p_l2_mod_r: f64,
    /// Full H1 norm of the velocity error.
    pub v_h1: f64,
    pub v_h1_semi: f64,
    pub v_l2: f64,
}

/// Velocity and pressure errors against `problem`, integrated with the
/// degree 5 rule.
pub fn error_norms(mesh: &Mesh, solution: &Solution, problem: Problem) -> ErrorNorms {
    let rule = quadrature(5).expect("supported degree");
    let nv = mesh.num_vertices();
    let with_constants = solution.p.len() == nv + mesh.num_triangles();
    let mut p_err = Vec::new();
    let (mut v_sq, mut g_sq) = (0.0, 0.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let geo = TriangleGeometry { area: tri.area, b: tri.b };
        let nodes = mesh.element_nodes(t);
        let pts = mesh.triangle_points(t);
        let constant = if with_constants { solution.p[nv + t] } else { 0.0 };
        for (bary, w) in rule.iter() {
            let s = p2_basis(bary, &geo).expect("quadrature points are valid barycentrics");
            let x = Point2::new(
                bary[0] * pts[0].x + bary[1] * pts[1].x + bary[2] * pts[2].x,
                bary[0] * pts[0].y + bary[1] * pts[1].y + bary[2] * pts[2].y,
            );
            let exact = problem.exact(x);
            let wa = w * tri.area;
            let ph: f64 = (0..3).map(|i| bary[i] * solution.p[tri.v[i]]).sum::<f64>() + constant;
            p_err.push((wa, exact.p - ph));
            for c in 0..2 {
                let mut u = 0.0;
                let mut g = [0.0; 2];
                for (k, &node) in nodes.iter().enumerate() {
                    let coef = solution.u[2 * node + c];
                    u += coef * s.values[k];
                    g[0] += coef * s.gradients[k][0];
                    g[1] += coef * s.gradients[k][1];
                }
                v_sq += wa * (exact.v[c] - u).powi(2);
                g_sq += wa * ((exact.grad_v[c][0] - g[0]).powi(2) + (exact.grad_v[c][1] - g[1]).powi(2));
            }
        }
    }
    let area: f64 = p_err.iter().map(|e| e.0).sum();
    let mean = p_err.iter().map(|(w, e)| w * e).sum::<f64>() / area;
    let p_mod: f64 = p_err.iter().map(|(w, e)| w * (e - mean).powi(2)).sum();
    ErrorNorms { p_l2_mod_r: p_mod.sqrt(), v_h1: (v_sq + g_sq).sqrt(), v_h1_semi: g_sq.sqrt(), v_l2: v_sq.sqrt() }
}
